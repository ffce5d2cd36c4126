#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "franson/model.hpp"
#include "franson/source.hpp"

namespace franson {

// One detector click. Channels 1..4 map to D1..D4.
struct TimeTag {
  std::uint8_t channel = 0;
  std::uint64_t t_ps = 0;

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

struct TagStreams {
  std::vector<TimeTag> side_a;  // channels 1,2; sorted by (t_ps, channel)
  std::vector<TimeTag> side_b;  // channels 3,4
};

// Cross-pair coincidence counts, row = D1/D2, col = D3/D4.
struct PairCounts {
  std::array<std::array<std::uint64_t, 2>, 2> n{{{0, 0}, {0, 0}}};

  std::uint64_t& at(int channel_a, int channel_b) { return n[channel_a - 1][channel_b - 3]; }
  std::uint64_t at(int channel_a, int channel_b) const { return n[channel_a - 1][channel_b - 3]; }
  std::uint64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
};

struct MatchRecord {
  std::uint8_t channel_a = 0;
  std::uint8_t channel_b = 0;
  std::uint64_t t_a_ps = 0;
  std::uint64_t t_b_ps = 0;
  std::int64_t delay_ps = 0;  // t_b - t_a - offset
};

// Frequency histogram of match delays, keyed by bin center.
struct DelayHistogram {
  std::int64_t bin_width_ps = 1;
  std::map<std::int64_t, std::uint64_t> bins;

  void add(std::int64_t delay_ps);
  std::uint64_t total() const;
};

// Samples detector clicks for every emission in the stream.
//
// Pair events draw the relative-arrival outcome from the path-product weights
// of the two UMZIs: coincident (SS or LL, indistinguishable) with probability
// 1/2, short-long 1/4, long-short 1/4. Coincident outcomes draw the detector
// pair from joint_coincident_prob at tau = 0 and place both clicks at
// t_emit + b*dT for one shared Bernoulli(1/2) b, which keeps absolute-time
// statistics right without revealing the SS/LL slot. Satellite outcomes and
// singles are detector-uniform (slot-resolved detection shows no local
// fringe). Every click gets independent Gaussian jitter (std t_res), is
// rounded to integer picoseconds, and per-channel dead time drops violators.
//
// Deterministic in (config, settings): per-chunk detection substreams, so the
// result is independent of n_threads.
TagStreams simulate_tags(const ExperimentConfig& cfg, const PhaseSettings& settings,
                         const std::vector<StreamChunk>& stream, int n_threads = 1);

struct CoincidenceOptions {
  double window = 2e-9;          // s; a match requires |delay| <= window/2
  double offset = 0.0;           // s, added to side-A times
  double hist_half_range = 0.0;  // s; 0 -> window. Callers wanting the full
                                 // three-peak histogram pass 2*delay_dT.
  std::int64_t bin_width_ps = 0; // 0 -> auto from the histogram range
};

struct CoincidenceResult {
  PairCounts counts;             // matches with |delay| <= window/2
  DelayHistogram histogram;      // matches with |delay| <= hist_half_range
  std::vector<MatchRecord> records;
};

// Two-pointer sweep over the time-sorted side streams; each tag participates
// in at most one match and ties go to the nearest candidate (greedy nearest,
// like hardware coincidence logic). The pairing range is the wider of
// window/2 and hist_half_range so the histogram always sees the satellite
// peaks. Throws on unsorted input.
CoincidenceResult count_coincidences(const std::vector<TimeTag>& tags_a,
                                     const std::vector<TimeTag>& tags_b,
                                     const CoincidenceOptions& opts);

struct CentralPeakCounts {
  PairCounts counts;
  std::string warning;  // non-empty iff window >= delta_t (satellite leak-in)
};

// Post-selection: keep only matches with |delay| <= window/2.
CentralPeakCounts select_central_peak(const std::vector<MatchRecord>& records, double window,
                                      double delta_t);

// Binary tag file: magic "FTT1", then little-endian records of
// 1 byte channel (1..4) + 8 bytes unsigned picosecond timestamp.
void write_tags_binary(const std::string& path, const std::vector<TimeTag>& tags);
std::vector<TimeTag> read_tags_binary(const std::string& path);

// CSV tag file, header: channel,t_ps
void write_tags_csv(const std::string& path, const std::vector<TimeTag>& tags);
std::vector<TimeTag> read_tags_csv(const std::string& path);

// Merge both sides into one stream ordered by (t_ps, channel).
std::vector<TimeTag> merge_streams(const TagStreams& streams);
TagStreams split_sides(const std::vector<TimeTag>& tags);

}  // namespace franson
