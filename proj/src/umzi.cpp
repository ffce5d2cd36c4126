#include "franson/umzi.hpp"

#include <cmath>

#include "franson/source.hpp"

namespace franson {

double long_arm_phase(Detector det, double delta_f_signed, const PhaseSettings& s,
                      const ExperimentConfig& cfg) {
  const double local = side_of(det) == Side::A ? s.phi : s.psi;
  return xi_phase(delta_f_signed, cfg.delta_l) + local + 0.5 * s.theta0;
}

ArmAmplitudes arm_amplitudes(Detector det, double delta_f_signed, const PhaseSettings& s,
                             const ExperimentConfig& cfg) {
  const double theta = long_arm_phase(det, delta_f_signed, s, cfg);
  ArmAmplitudes a;
  a.a_short = {0.5, 0.0};
  a.a_long = static_cast<double>(l_sign(det)) * 0.5 * std::complex<double>(std::cos(theta), std::sin(theta));
  return a;
}

double local_intensity(Detector det, double delta_f_signed, const PhaseSettings& s,
                       const ExperimentConfig& cfg) {
  if (cfg.mode == Mode::PBS) return 0.5;
  const double theta = long_arm_phase(det, delta_f_signed, s, cfg);
  return 0.5 * (1.0 + l_sign(det) * std::cos(theta));
}

double local_mean(Detector det, const PhaseSettings& s, const ExperimentConfig& cfg,
                  std::size_t n_samples, std::uint64_t substream) {
  if (cfg.mode == Mode::PBS) return 0.5;
  CounterRng rng(cfg.seed, {stream_tag::kMonteCarlo, 0xA11ULL, substream});
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double df = sample_detuning(cfg, rng);
    sum += local_intensity(det, signed_detuning(side_of(det), df), s, cfg);
  }
  return sum / static_cast<double>(n_samples);
}

}  // namespace franson
