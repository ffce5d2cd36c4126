#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "franson/model.hpp"

namespace franson {

// Parsed command-line state shared by every subcommand. Optionals override
// the config file; absent means "use the config value".
struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;  // <= 0: hardware concurrency
  std::optional<std::string> mode;
  double phi = 0.0;
  double psi = 0.0;
  std::optional<double> window;
  std::optional<double> tau;
  std::optional<double> duration;
  std::optional<double> pair_rate;
  std::optional<double> singles_rate;
  bool dump_events = false;  // simulate: also write events.csv
};

// Config file (if any) + overrides + validation; regime warnings are
// appended, not thrown.
ExperimentConfig resolve_config(const CliOptions& opt, std::vector<std::string>& warnings);

int effective_threads(const CliOptions& opt);

// "start:stop:n", n >= 2
std::vector<double> parse_grid_spec(const std::string& spec);

// "D1,D3": side-A detector first, side-B second
std::pair<Detector, Detector> parse_pair_spec(const std::string& spec);

// Every command writes all artifacts under opt.out_dir and finishes with a
// manifest.json listing config snapshot, settings, outputs (manifest
// included), warnings, and wall-clock seconds. Return value is the process
// exit code.
int cmd_simulate(const CliOptions& opt);
int cmd_coincide(const CliOptions& opt, const std::vector<std::string>& tag_files,
                 double offset_s);
int cmd_scan(const CliOptions& opt, const std::string& kind, const std::string& pipeline,
             const std::string& grid_spec, std::uint64_t n_per_point,
             const std::string& pair_spec);
int cmd_visibility(const CliOptions& opt, const std::string& variable,
                   const std::string& grid_spec, std::size_t phase_points,
                   const std::string& pair_spec);
int cmd_oracle(const CliOptions& opt);

}  // namespace franson
