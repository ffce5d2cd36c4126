#pragma once

#include <complex>

#include "franson/model.hpp"
#include "franson/rng.hpp"

namespace franson {

// Port amplitudes of one UMZI output in units of the input amplitude, global
// per-detector phases dropped (the i on the cross ports, e^{i eta}, plane-wave
// factors; none survives squaring). |a_short|^2 + |a_long|^2 = 1/2 in BS mode.
struct ArmAmplitudes {
  std::complex<double> a_short;
  std::complex<double> a_long;
};

// Detuning as seen by one side: the AOMs scan oppositely, so a photon on the
// Bob side carries the negated detuning.
inline double signed_detuning(Side side, double delta_f) {
  return side == Side::A ? +delta_f : -delta_f;
}

// Long-arm phase for a photon of signed detuning delta_f_signed:
//   side A: xi + phi + theta0/2,  side B (delta_f_signed = -|df|): -xi + psi + theta0/2.
// theta0 is the neglected fixed S_A/S_B offset, split evenly across the two
// long arms so local, joint and product pipelines stay consistent.
double long_arm_phase(Detector det, double delta_f_signed, const PhaseSettings& s,
                      const ExperimentConfig& cfg);

// a_short = 1/2, a_long = l_sign(det) * (1/2) e^{i theta_L}.
ArmAmplitudes arm_amplitudes(Detector det, double delta_f_signed, const PhaseSettings& s,
                             const ExperimentConfig& cfg);

// BS mode: |a_short + a_long|^2 = (1 + l_sign(det) cos theta_L) / 2, in units
// of I0. PBS mode: the paths are distinguishable and the cosine vanishes; 1/2.
double local_intensity(Detector det, double delta_f_signed, const PhaseSettings& s,
                       const ExperimentConfig& cfg);

// Monte Carlo mean of local_intensity over the detuning distribution. In the
// dephasing regime this converges to 1/2 for every phase setting.
double local_mean(Detector det, const PhaseSettings& s, const ExperimentConfig& cfg,
                  std::size_t n_samples, std::uint64_t substream = 0);

}  // namespace franson
