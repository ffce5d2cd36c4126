#include "franson/source.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace franson {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Pair: return "pair";
    case EventKind::SingleA: return "single_a";
    case EventKind::SingleB: return "single_b";
  }
  return "?";
}

double sample_detuning(const ExperimentConfig& cfg, CounterRng& rng) {
  // Resampling keeps the +/- branch assignment meaningful (delta_f >= 0).
  for (;;) {
    const double f = rng.normal(cfg.f_center, cfg.sigma_f);
    if (f >= 0.0) return f;
  }
}

std::pair<double, double> pair_detunings(double delta_f) {
  if (delta_f < 0.0) throw std::invalid_argument("pair_detunings: delta_f must be >= 0");
  return {+delta_f, -delta_f};
}

std::size_t count_chunks(const ExperimentConfig& cfg) {
  if (cfg.duration <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(cfg.duration / kChunkSeconds));
}

namespace {

// Poisson count then conditionally-uniform times; restriction of a Poisson
// process to an interval.
void emit_class(const ExperimentConfig& cfg, std::uint64_t chunk_index, std::uint64_t tag,
                EventKind kind, double rate, double t0, double t1,
                std::vector<EmissionEvent>& out) {
  CounterRng rng(cfg.seed, {tag, chunk_index});
  const double len = t1 - t0;
  const std::uint64_t n = rng.poisson(rate * len);
  std::vector<double> times(n);
  for (auto& t : times) t = rng.uniform(t0, t1);
  std::sort(times.begin(), times.end());
  for (double t : times) {
    EmissionEvent ev;
    ev.kind = kind;
    ev.t_emit = t;
    ev.delta_f = sample_detuning(cfg, rng);
    ev.eta = rng.uniform(0.0, kTwoPi);
    out.push_back(ev);
  }
}

}  // namespace

StreamChunk generate_chunk(const ExperimentConfig& cfg, std::uint64_t chunk_index) {
  StreamChunk chunk;
  chunk.t_start = static_cast<double>(chunk_index) * kChunkSeconds;
  chunk.t_end = std::min(chunk.t_start + kChunkSeconds, cfg.duration);

  std::vector<EmissionEvent> pairs, singles_a, singles_b;
  emit_class(cfg, chunk_index, stream_tag::kSourcePairs, EventKind::Pair, cfg.pair_rate,
             chunk.t_start, chunk.t_end, pairs);
  // singles_rate applies per side.
  emit_class(cfg, chunk_index, stream_tag::kSourceSinglesA, EventKind::SingleA,
             cfg.singles_rate, chunk.t_start, chunk.t_end, singles_a);
  emit_class(cfg, chunk_index, stream_tag::kSourceSinglesB, EventKind::SingleB,
             cfg.singles_rate, chunk.t_start, chunk.t_end, singles_b);

  chunk.events.reserve(pairs.size() + singles_a.size() + singles_b.size());
  chunk.events.insert(chunk.events.end(), pairs.begin(), pairs.end());
  chunk.events.insert(chunk.events.end(), singles_a.begin(), singles_a.end());
  chunk.events.insert(chunk.events.end(), singles_b.begin(), singles_b.end());
  std::stable_sort(chunk.events.begin(), chunk.events.end(),
                   [](const EmissionEvent& a, const EmissionEvent& b) { return a.t_emit < b.t_emit; });
  return chunk;
}

std::vector<StreamChunk> generate_stream(const ExperimentConfig& cfg, int n_threads) {
  const std::size_t n_chunks = count_chunks(cfg);
  std::vector<StreamChunk> chunks(n_chunks);
  if (n_chunks == 0) return chunks;

  if (n_threads <= 1 || n_chunks == 1) {
    for (std::size_t k = 0; k < n_chunks; ++k) chunks[k] = generate_chunk(cfg, k);
    return chunks;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      chunks[k] = generate_chunk(cfg, k);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(n_threads, static_cast<int>(n_chunks));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return chunks;
}

std::vector<EmissionEvent> flatten(const std::vector<StreamChunk>& chunks) {
  std::vector<EmissionEvent> out;
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.events.size();
  out.reserve(total);
  for (const auto& c : chunks) out.insert(out.end(), c.events.begin(), c.events.end());
  return out;
}

void write_events_csv(const std::string& path, const std::vector<StreamChunk>& chunks) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << "t_emit_ps,kind,delta_f_hz,eta_rad\n";
  char buf[160];
  for (const auto& c : chunks) {
    for (const auto& ev : c.events) {
      const auto t_ps = static_cast<unsigned long long>(std::llround(ev.t_emit * 1e12));
      std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g,%.17g\n", t_ps,
                    to_string(ev.kind).c_str(), ev.delta_f, ev.eta);
      f << buf;
    }
  }
}

}  // namespace franson
