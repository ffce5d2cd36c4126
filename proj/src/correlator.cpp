#include "franson/correlator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "franson/rng.hpp"
#include "franson/source.hpp"
#include "franson/umzi.hpp"

namespace franson {

namespace {

void require_cross_pair(const JointSetting& js) {
  if (side_of(js.det_a) != Side::A || side_of(js.det_b) != Side::B)
    throw std::invalid_argument("not a cross-UMZI coincidence: " + to_string(js.det_a) + "," +
                                to_string(js.det_b));
}

double joint_phase(const JointSetting& js) {
  return js.settings.phi + js.settings.psi + js.settings.theta0;
}

}  // namespace

double joint_coincident_prob(const JointSetting& js, double delta_f, Mode mode) {
  require_cross_pair(js);
  if (delta_f < 0.0) throw std::invalid_argument("joint_coincident_prob: delta_f must be >= 0");
  if (mode == Mode::PBS) return 0.25;
  const double theta_tau = 2.0 * kTwoPi * delta_f * js.tau_ab;
  const int ll = l_sign(js.det_a) * l_sign(js.det_b);
  return 0.25 * (1.0 + ll * std::cos(joint_phase(js) + theta_tau));
}

std::complex<double> pair_beat_characteristic(const ExperimentConfig& cfg, double s) {
  const double lo = std::max(0.0, cfg.f_center - 6.0 * cfg.sigma_f);
  const double hi = cfg.f_center + 6.0 * cfg.sigma_f;

  // Resolve the oscillation: at least ~32 points per cycle of e^{isx}.
  const double cycles = std::abs(s) * (hi - lo) / kTwoPi;
  std::size_t n = 2048;
  while (static_cast<double>(n) < 32.0 * cycles && n < (1u << 22)) n *= 2;

  auto trapezoid = [&](std::size_t pts) {
    const double h = (hi - lo) / static_cast<double>(pts);
    std::complex<double> num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i <= pts; ++i) {
      const double x = lo + h * static_cast<double>(i);
      const double z = (x - cfg.f_center) / cfg.sigma_f;
      const double w = std::exp(-0.5 * z * z) * ((i == 0 || i == pts) ? 0.5 : 1.0);
      num += w * std::complex<double>(std::cos(s * x), std::sin(s * x));
      den += w;
    }
    return num / den;
  };

  std::complex<double> prev = trapezoid(n);
  for (int it = 0; it < 8; ++it) {
    n *= 2;
    const std::complex<double> cur = trapezoid(n);
    if (std::abs(cur - prev) <= 1e-7 * std::max(std::abs(cur), 1e-3)) return cur;
    prev = cur;
  }
  return prev;
}

double fringe_visibility_tau(const ExperimentConfig& cfg, double tau_ab) {
  return std::abs(pair_beat_characteristic(cfg, 2.0 * kTwoPi * tau_ab));
}

double mean_correlation(const JointSetting& js, const ExperimentConfig& cfg) {
  require_cross_pair(js);
  if (cfg.mode == Mode::PBS) return 0.125;
  const std::complex<double> lambda = pair_beat_characteristic(cfg, 2.0 * kTwoPi * js.tau_ab);
  const double phase = joint_phase(js);
  const std::complex<double> rot(std::cos(phase), std::sin(phase));
  const int ll = l_sign(js.det_a) * l_sign(js.det_b);
  return 0.125 * (1.0 + ll * (rot * lambda).real());
}

namespace {

McEstimate finish(double sum, double sumsq, std::uint64_t n) {
  McEstimate e;
  e.n = n;
  if (n == 0) return e;
  const double nd = static_cast<double>(n);
  e.value = sum / nd;
  const double var = std::max(0.0, sumsq / nd - e.value * e.value);
  e.stderr_ = std::sqrt(var / nd);
  return e;
}

}  // namespace

McEstimate baseline_product_correlation(const JointSetting& js, const ExperimentConfig& cfg,
                                        std::uint64_t n_samples, std::uint64_t substream) {
  require_cross_pair(js);
  CounterRng rng(cfg.seed, {stream_tag::kMonteCarlo, 0xBA5EULL, substream});
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double df = sample_detuning(cfg, rng);
    const double ia = local_intensity(js.det_a, signed_detuning(Side::A, df), js.settings, cfg);
    const double ib = local_intensity(js.det_b, signed_detuning(Side::B, df), js.settings, cfg);
    const double p = ia * ib;
    sum += p;
    sumsq += p * p;
  }
  return finish(sum, sumsq, n_samples);
}

McEstimate mc_mean_correlation(const JointSetting& js, const ExperimentConfig& cfg,
                               std::uint64_t n_events, std::uint64_t substream) {
  require_cross_pair(js);
  CounterRng rng(cfg.seed, {stream_tag::kMonteCarlo, 0x3C0ULL, substream});
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t i = 0; i < n_events; ++i) {
    const double df = sample_detuning(cfg, rng);
    // 1/2 = coincident-outcome fraction of the tag pipeline
    const double p = 0.5 * joint_coincident_prob(js, df, cfg.mode);
    sum += p;
    sumsq += p * p;
  }
  return finish(sum, sumsq, n_events);
}

std::string correlation_result_json(const JointSetting& js, double value, double stderr_,
                                    std::uint64_t n) {
  nlohmann::json j;
  j["setting"] = {{"det_a", to_string(js.det_a)},
                  {"det_b", to_string(js.det_b)},
                  {"phi", js.settings.phi},
                  {"psi", js.settings.psi},
                  {"theta0", js.settings.theta0}};
  j["tau_ab"] = js.tau_ab;
  j["value"] = value;
  j["stderr"] = stderr_;
  j["n"] = n;
  return j.dump(2);
}

}  // namespace franson
