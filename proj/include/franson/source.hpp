#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "franson/model.hpp"
#include "franson/rng.hpp"

namespace franson {

enum class EventKind { Pair, SingleA, SingleB };

std::string to_string(EventKind k);

// One source emission. A Pair carries one shared detuning delta_f >= 0; the
// Alice-side photon is at +delta_f, the Bob-side photon at -delta_f. eta is
// the common pre-interferometer phase; it cancels in every intensity and is
// carried only so that invariance can be tested.
struct EmissionEvent {
  EventKind kind;
  double t_emit;   // s
  double delta_f;  // Hz, >= 0
  double eta;      // rad
};

struct StreamChunk {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<EmissionEvent> events;  // sorted by t_emit, all in [t_start, t_end)
};

// Internal generation granule. Fixed (not configurable) so that the stream is
// a pure function of (config, seed) no matter how generation is sharded.
inline constexpr double kChunkSeconds = 1e-3;

// Truncated Gaussian: Normal(f_center, sigma_f^2) with negative draws
// rejected.
double sample_detuning(const ExperimentConfig& cfg, CounterRng& rng);

// Anti-correlated pair detunings (+delta_f to Alice, -delta_f to Bob).
std::pair<double, double> pair_detunings(double delta_f);

// Poisson streams of pairs and per-side singles over [0, duration), chunked
// at kChunkSeconds. Deterministic in (config.seed, config); chunk k depends
// only on (seed, k).
std::vector<StreamChunk> generate_stream(const ExperimentConfig& cfg, int n_threads = 1);

// Single chunk, for sharded callers.
StreamChunk generate_chunk(const ExperimentConfig& cfg, std::uint64_t chunk_index);

std::size_t count_chunks(const ExperimentConfig& cfg);

std::vector<EmissionEvent> flatten(const std::vector<StreamChunk>& chunks);

// CSV dump, header: t_emit_ps,kind,delta_f_hz,eta_rad
void write_events_csv(const std::string& path, const std::vector<StreamChunk>& chunks);

}  // namespace franson
