#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "franson/constants.hpp"

namespace franson {

enum class Mode { BS, PBS };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// All physical and numerical parameters of one run. Immutable value type;
// validate() before use.
struct ExperimentConfig {
  double f0 = 1.934e14;         // carrier optical frequency, Hz
  double sigma_f = 1.0e9;       // AOM modulation half-bandwidth (detuning std), Hz
  double f_center = 0.0;        // AOM center detuning, Hz
  double delta_l = 3.0;         // UMZI long-short path difference, m (both UMZIs)
  double laser_linewidth = 1.0e3;  // Hz; coherence length l_c = c / linewidth
  double pair_rate = 1.0e4;     // pair emissions per second
  double singles_rate = 1.0e6;  // uncorrelated singles per second per side
  double t_res = 100.0e-12;     // detector timing jitter std, s
  double dead_time = 0.0;       // detector dead time, s
  double window = 2.0e-9;       // coincidence window w, s
  double theta0 = 0.0;          // fixed joint-phase offset, rad
  Mode mode = Mode::BS;
  std::uint64_t seed = 1;
  double duration = 1.0;        // simulated wall time, s
};

// Alice/Bob local PZT phases plus the fixed joint offset.
struct PhaseSettings {
  double phi = 0.0;
  double psi = 0.0;
  double theta0 = 0.0;
};

enum class Detector : int { D1 = 1, D2 = 2, D3 = 3, D4 = 4 };

enum class Side { A, B };

inline Side side_of(Detector d) {
  return (d == Detector::D1 || d == Detector::D2) ? Side::A : Side::B;
}

// Sign of the long-arm term in the output amplitude: the bar ports (D1, D3)
// carry the minus sign, the cross ports (D2, D4) the plus sign. Products of
// these signs give the fringe-sign structure of the joint correlations.
inline int l_sign(Detector d) {
  return (d == Detector::D1 || d == Detector::D3) ? -1 : +1;
}

Detector detector_from_channel(int ch);
inline int channel_of(Detector d) { return static_cast<int>(d); }
std::string to_string(Detector d);

// Long-arm detuning phase xi = 2*pi * delta_f * delta_l / c. Linear in both
// arguments; a signed delta_f gives a signed phase.
inline double xi_phase(double delta_f_hz, double delta_l_m) {
  return kTwoPi * delta_f_hz * delta_l_m / kSpeedOfLight;
}

// Arrival-time split between the S and L slots.
inline double delay_dT(const ExperimentConfig& cfg) { return cfg.delta_l / kSpeedOfLight; }

// Regime checks are warnings, not errors: the simulation still runs outside
// the ensemble-dephasing regime (and the local-uniformity tests are expected
// to fail there). Non-finite or negative parameters throw.
std::vector<std::string> validate(const ExperimentConfig& cfg);

// Flat TOML key/value file mirroring ExperimentConfig field names.
// Unknown keys are fatal.
ExperimentConfig load_config_toml(const std::string& path);
ExperimentConfig parse_config_toml(const std::string& text, const std::string& origin);
std::string config_to_toml(const ExperimentConfig& cfg);

}  // namespace franson
