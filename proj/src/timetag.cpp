#include "franson/timetag.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "franson/correlator.hpp"
#include "franson/rng.hpp"
#include "franson/umzi.hpp"

namespace franson {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::uint64_t to_ps(double t_seconds) {
  if (t_seconds <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::llround(t_seconds * 1e12));
}

// Detector-pair order for cumulative sampling: (D1,D3),(D1,D4),(D2,D3),(D2,D4)
constexpr int kPairChA[4] = {1, 1, 2, 2};
constexpr int kPairChB[4] = {3, 4, 3, 4};

struct ChunkTags {
  std::vector<TimeTag> a, b;
};

ChunkTags simulate_chunk(const ExperimentConfig& cfg, const StreamChunk& chunk,
                         std::uint64_t chunk_index, const std::array<double, 4>& coinc_cdf,
                         double dT) {
  CounterRng rng(cfg.seed, {stream_tag::kDetection, chunk_index});
  ChunkTags out;

  auto push = [&](int channel, double t) {
    const double jittered = t + cfg.t_res * rng.normal();
    TimeTag tag{static_cast<std::uint8_t>(channel), to_ps(jittered)};
    if (channel <= 2)
      out.a.push_back(tag);
    else
      out.b.push_back(tag);
  };

  for (const EmissionEvent& ev : chunk.events) {
    switch (ev.kind) {
      case EventKind::Pair: {
        const double u = rng.uniform01();
        if (u < 0.5) {
          // coincident: SS/LL fused; shared slot keeps absolute times honest
          const double v = rng.uniform01();
          int pair = 3;
          for (int i = 0; i < 4; ++i) {
            if (v < coinc_cdf[i]) {
              pair = i;
              break;
            }
          }
          const double slot = (rng.uniform01() < 0.5) ? 0.0 : dT;
          push(kPairChA[pair], ev.t_emit + slot);
          push(kPairChB[pair], ev.t_emit + slot);
        } else {
          const bool alice_early = u < 0.75;  // SL: Alice short, Bob long
          const int pair = static_cast<int>(rng.uniform01() * 4.0) & 3;
          push(kPairChA[pair], ev.t_emit + (alice_early ? 0.0 : dT));
          push(kPairChB[pair], ev.t_emit + (alice_early ? dT : 0.0));
        }
        break;
      }
      case EventKind::SingleA: {
        const int ch = (rng.uniform01() < 0.5) ? 1 : 2;
        const double slot = (rng.uniform01() < 0.5) ? 0.0 : dT;
        push(ch, ev.t_emit + slot);
        break;
      }
      case EventKind::SingleB: {
        const int ch = (rng.uniform01() < 0.5) ? 3 : 4;
        const double slot = (rng.uniform01() < 0.5) ? 0.0 : dT;
        push(ch, ev.t_emit + slot);
        break;
      }
    }
  }
  return out;
}

void sort_and_apply_dead_time(std::vector<TimeTag>& tags, double dead_time) {
  std::stable_sort(tags.begin(), tags.end(), [](const TimeTag& x, const TimeTag& y) {
    return x.t_ps != y.t_ps ? x.t_ps < y.t_ps : x.channel < y.channel;
  });
  if (dead_time <= 0.0) return;
  const std::uint64_t dead_ps = to_ps(dead_time);
  std::uint64_t last[5] = {0, 0, 0, 0, 0};
  bool seen[5] = {false, false, false, false, false};
  std::vector<TimeTag> kept;
  kept.reserve(tags.size());
  for (const TimeTag& t : tags) {
    const int ch = t.channel;
    if (seen[ch] && t.t_ps - last[ch] < dead_ps) continue;
    seen[ch] = true;
    last[ch] = t.t_ps;
    kept.push_back(t);
  }
  tags.swap(kept);
}

}  // namespace

void DelayHistogram::add(std::int64_t delay_ps) {
  const std::int64_t center = floor_div(delay_ps + bin_width_ps / 2, bin_width_ps) * bin_width_ps;
  ++bins[center];
}

std::uint64_t DelayHistogram::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, v] : bins) t += v;
  return t;
}

TagStreams simulate_tags(const ExperimentConfig& cfg, const PhaseSettings& settings,
                         const std::vector<StreamChunk>& stream, int n_threads) {
  const double dT = delay_dT(cfg);

  // Coincident detector-pair law at tau = 0 is detuning-independent, so the
  // cumulative table is fixed per run.
  std::array<double, 4> cdf{};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    JointSetting js;
    js.det_a = detector_from_channel(kPairChA[i]);
    js.det_b = detector_from_channel(kPairChB[i]);
    js.settings = settings;
    js.tau_ab = 0.0;
    acc += joint_coincident_prob(js, 0.0, cfg.mode);
    cdf[i] = acc;
  }
  cdf[3] = 1.0 + 1e-12;  // guard against rounding at the top

  std::vector<ChunkTags> per_chunk(stream.size());
  if (n_threads <= 1 || stream.size() <= 1) {
    for (std::size_t k = 0; k < stream.size(); ++k)
      per_chunk[k] = simulate_chunk(cfg, stream[k], k, cdf, dT);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= stream.size()) return;
        per_chunk[k] = simulate_chunk(cfg, stream[k], k, cdf, dT);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(n_threads, static_cast<int>(stream.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  TagStreams out;
  std::size_t na = 0, nb = 0;
  for (const auto& c : per_chunk) {
    na += c.a.size();
    nb += c.b.size();
  }
  out.side_a.reserve(na);
  out.side_b.reserve(nb);
  for (const auto& c : per_chunk) {
    out.side_a.insert(out.side_a.end(), c.a.begin(), c.a.end());
    out.side_b.insert(out.side_b.end(), c.b.begin(), c.b.end());
  }
  sort_and_apply_dead_time(out.side_a, cfg.dead_time);
  sort_and_apply_dead_time(out.side_b, cfg.dead_time);
  return out;
}

namespace {

void check_sorted(const std::vector<TimeTag>& tags, const char* name) {
  for (std::size_t i = 1; i < tags.size(); ++i)
    if (tags[i].t_ps < tags[i - 1].t_ps)
      throw std::invalid_argument(std::string("count_coincidences: unsorted input: ") + name);
}

}  // namespace

CoincidenceResult count_coincidences(const std::vector<TimeTag>& tags_a,
                                     const std::vector<TimeTag>& tags_b,
                                     const CoincidenceOptions& opts) {
  check_sorted(tags_a, "tags_a");
  check_sorted(tags_b, "tags_b");

  const std::int64_t window_ps = static_cast<std::int64_t>(std::llround(opts.window * 1e12));
  const std::int64_t offset_ps = static_cast<std::int64_t>(std::llround(opts.offset * 1e12));
  const std::int64_t hist_half_ps =
      opts.hist_half_range > 0.0 ? static_cast<std::int64_t>(std::llround(opts.hist_half_range * 1e12))
                                 : window_ps;
  // Pairing range covers both the selection window and the histogram range.
  const std::int64_t reach = std::max((window_ps + 1) / 2, hist_half_ps);

  CoincidenceResult res;
  res.histogram.bin_width_ps =
      opts.bin_width_ps > 0 ? opts.bin_width_ps : std::max<std::int64_t>(1, hist_half_ps / 100);

  std::vector<char> used(tags_b.size(), 0);
  std::size_t jlo = 0;
  for (std::size_t i = 0; i < tags_a.size(); ++i) {
    const std::int64_t ta = static_cast<std::int64_t>(tags_a[i].t_ps) + offset_ps;
    while (jlo < tags_b.size() &&
           (used[jlo] || static_cast<std::int64_t>(tags_b[jlo].t_ps) < ta - reach))
      ++jlo;
    std::size_t best = tags_b.size();
    std::int64_t best_abs = reach + 1;
    for (std::size_t j = jlo; j < tags_b.size(); ++j) {
      const std::int64_t tb = static_cast<std::int64_t>(tags_b[j].t_ps);
      if (tb > ta + reach) break;
      if (used[j]) continue;
      const std::int64_t d = tb - ta;
      const std::int64_t ad = d < 0 ? -d : d;
      if (ad < best_abs) {
        best_abs = ad;
        best = j;
      }
    }
    if (best == tags_b.size()) continue;
    used[best] = 1;

    MatchRecord rec;
    rec.channel_a = tags_a[i].channel;
    rec.channel_b = tags_b[best].channel;
    rec.t_a_ps = tags_a[i].t_ps;
    rec.t_b_ps = tags_b[best].t_ps;
    rec.delay_ps = static_cast<std::int64_t>(tags_b[best].t_ps) - ta;
    res.records.push_back(rec);

    const std::int64_t ad = rec.delay_ps < 0 ? -rec.delay_ps : rec.delay_ps;
    if (ad <= hist_half_ps) res.histogram.add(rec.delay_ps);
    if (2 * ad <= window_ps) ++res.counts.at(rec.channel_a, rec.channel_b);
  }
  return res;
}

CentralPeakCounts select_central_peak(const std::vector<MatchRecord>& records, double window,
                                      double delta_t) {
  CentralPeakCounts out;
  if (window >= delta_t) out.warning = "post-selection loophole: satellites included (window >= delta_t)";
  const std::int64_t window_ps = static_cast<std::int64_t>(std::llround(window * 1e12));
  for (const MatchRecord& r : records) {
    const std::int64_t ad = r.delay_ps < 0 ? -r.delay_ps : r.delay_ps;
    if (2 * ad <= window_ps) ++out.counts.at(r.channel_a, r.channel_b);
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'F', 'T', 'T', '1'};
}

void write_tags_binary(const std::string& path, const std::vector<TimeTag>& tags) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f.write(kMagic, 4);
  for (const TimeTag& t : tags) {
    unsigned char rec[9];
    rec[0] = t.channel;
    for (int i = 0; i < 8; ++i) rec[1 + i] = static_cast<unsigned char>((t.t_ps >> (8 * i)) & 0xFF);
    f.write(reinterpret_cast<const char*>(rec), 9);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<TimeTag> read_tags_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (f.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + ": not a tag file (bad magic at byte 0)");
  std::vector<TimeTag> tags;
  std::uint64_t offset = 4;
  unsigned char rec[9];
  for (;;) {
    f.read(reinterpret_cast<char*>(rec), 9);
    const std::streamsize got = f.gcount();
    if (got == 0) break;
    if (got != 9)
      throw std::runtime_error(path + ": truncated record at byte " + std::to_string(offset));
    if (rec[0] < 1 || rec[0] > 4)
      throw std::runtime_error(path + ": bad channel " + std::to_string(int(rec[0])) +
                               " at byte " + std::to_string(offset));
    TimeTag t;
    t.channel = rec[0];
    t.t_ps = 0;
    for (int i = 7; i >= 0; --i) t.t_ps = (t.t_ps << 8) | rec[1 + i];
    tags.push_back(t);
    offset += 9;
  }
  return tags;
}

void write_tags_csv(const std::string& path, const std::vector<TimeTag>& tags) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << "channel,t_ps\n";
  char buf[48];
  for (const TimeTag& t : tags) {
    std::snprintf(buf, sizeof(buf), "%u,%llu\n", unsigned(t.channel),
                  static_cast<unsigned long long>(t.t_ps));
    f << buf;
  }
}

std::vector<TimeTag> read_tags_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line) || (line != "channel,t_ps" && line != "channel,t_ps\r"))
    throw std::runtime_error(path + ": not a tag CSV (bad header)");
  std::vector<TimeTag> tags;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    unsigned ch = 0;
    unsigned long long t = 0;
    if (std::sscanf(line.c_str(), "%u,%llu", &ch, &t) != 2 || ch < 1 || ch > 4)
      throw std::runtime_error(path + ": bad record at line " + std::to_string(lineno));
    tags.push_back(TimeTag{static_cast<std::uint8_t>(ch), t});
  }
  return tags;
}

std::vector<TimeTag> merge_streams(const TagStreams& streams) {
  std::vector<TimeTag> all;
  all.reserve(streams.side_a.size() + streams.side_b.size());
  all.insert(all.end(), streams.side_a.begin(), streams.side_a.end());
  all.insert(all.end(), streams.side_b.begin(), streams.side_b.end());
  std::stable_sort(all.begin(), all.end(), [](const TimeTag& x, const TimeTag& y) {
    return x.t_ps != y.t_ps ? x.t_ps < y.t_ps : x.channel < y.channel;
  });
  return all;
}

TagStreams split_sides(const std::vector<TimeTag>& tags) {
  TagStreams s;
  for (const TimeTag& t : tags) {
    if (t.channel <= 2)
      s.side_a.push_back(t);
    else
      s.side_b.push_back(t);
  }
  return s;
}

}  // namespace franson
