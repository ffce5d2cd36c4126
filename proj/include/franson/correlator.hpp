#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "franson/model.hpp"

namespace franson {

// One joint-detection configuration: a cross-UMZI detector pair, the phase
// settings, and the coincidence delay tau_ab.
struct JointSetting {
  Detector det_a = Detector::D1;  // side A
  Detector det_b = Detector::D3;  // side B
  PhaseSettings settings;
  double tau_ab = 0.0;  // s
};

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
};

// Conditional probability of detector pair (det_a, det_b) given a
// post-selected coincident pair with detuning delta_f:
//   BS:  (1 + l_a l_b cos(phi + psi + theta0 + 4 pi delta_f tau_ab)) / 4
//   PBS: 1/4 (no product-basis superposition).
// The pair's beams differ in frequency by 2 delta_f, so a detection delay tau
// contributes beat phase 4 pi delta_f tau to the LL-SS cross term.
double joint_coincident_prob(const JointSetting& js, double delta_f, Mode mode);

// E[e^{i s delta_f}] over the truncated-Gaussian detuning distribution,
// trapezoid quadrature on [max(0, f_center - 6 sigma), f_center + 6 sigma],
// >= 2048 points, refined to relative error <= 1e-6. Lambda(0) = 1 exactly.
std::complex<double> pair_beat_characteristic(const ExperimentConfig& cfg, double s);

// Fringe visibility after detuning averaging: V(tau) = |Lambda(4 pi tau)|.
double fringe_visibility_tau(const ExperimentConfig& cfg, double tau_ab);

// Detuning-averaged post-selected correlation in units of <I0^2>:
//   (1/8) (1 + l_a l_b Re[ e^{i(phi+psi+theta0)} Lambda(4 pi tau_ab) ]).
// At tau_ab = 0 this is exactly (1/8)(1 +/- cos(phi+psi+theta0)); at large
// tau the fringe decays with V(tau) (and picks up the phase of Lambda, which
// the Monte Carlo estimator reproduces). PBS mode: 1/8 flat.
double mean_correlation(const JointSetting& js, const ExperimentConfig& cfg);

// Monte Carlo mean over shared detunings of the plain local-intensity product
// with no post-selection (all four path products kept). Converges to
// (1/4)(1 + (1/2) l_a l_b cos(phi+psi+theta0)) in the dephasing regime:
// visibility 1/2 against the post-selected 1.
McEstimate baseline_product_correlation(const JointSetting& js, const ExperimentConfig& cfg,
                                        std::uint64_t n_samples, std::uint64_t substream = 0);

// Monte Carlo estimator of mean_correlation: averages joint_coincident_prob
// over sampled detunings times the 1/2 coincident-outcome fraction.
McEstimate mc_mean_correlation(const JointSetting& js, const ExperimentConfig& cfg,
                               std::uint64_t n_events, std::uint64_t substream = 0);

// {setting, tau_ab, value, stderr, n} JSON document.
std::string correlation_result_json(const JointSetting& js, double value, double stderr_,
                                    std::uint64_t n);

}  // namespace franson
