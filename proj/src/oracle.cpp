#include "franson/oracle.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "franson/constants.hpp"
#include "json.hpp"

namespace franson::oracle {

namespace {

// Adaptive Simpson with explicit depth cap; plenty for the <=200-cycle
// integrands that show up here.
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  // split into panels so oscillatory integrands start resolved
  const int panels = 64;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h, x1 = a + (i + 1) * h;
    const double m = 0.5 * (x0 + x1);
    const double f0 = f(x0), fm = f(m), f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += simpson_step(f, x0, x1, f0, fm, f1, whole, tol / panels, 40);
  }
  return total;
}

double gauss_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi); }

double gauss_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Expectations are taken in the normalized variable z = (f - f_center)/sigma
// so every integrand handed to Simpson is O(1) and an absolute tolerance
// behaves like a relative one. The truncation maps to [alpha, beta] in
// [-6, 6]; callers must keep h(z) itself O(1).
double expectation_z(const Detuning& d, const std::function<double(double)>& h) {
  const double alpha = (trunc_gauss_lo(d) - d.f_center) / d.sigma_f;
  const double beta = (trunc_gauss_hi(d) - d.f_center) / d.sigma_f;
  auto density = [](double z) { return std::exp(-0.5 * z * z); };
  const double norm = integrate(density, alpha, beta, 1e-13);
  if (!(norm > 0.0)) throw std::runtime_error("oracle: degenerate detuning weight");
  const double num = integrate([&](double z) { return h(z) * density(z); }, alpha, beta, 1e-13);
  return num / norm;
}

// Convenience for bounded integrands of the physical detuning.
double expectation(const Detuning& d, const std::function<double(double)>& g) {
  return expectation_z(d, [&](double z) { return g(d.f_center + d.sigma_f * z); });
}

// Long-arm output sign per detector: the bar port of each recombining
// splitter (D1, D3) picks up the pi phase.
constexpr int kLongSign[5] = {0, -1, +1, -1, +1};

}  // namespace

double trunc_gauss_lo(const Detuning& d) { return std::max(0.0, d.f_center - 6.0 * d.sigma_f); }

double trunc_gauss_hi(const Detuning& d) { return d.f_center + 6.0 * d.sigma_f; }

double detuning_mean(const Detuning& d) {
  return d.f_center + d.sigma_f * expectation_z(d, [](double z) { return z; });
}

double detuning_var(const Detuning& d) {
  const double zbar = expectation_z(d, [](double z) { return z; });
  return d.sigma_f * d.sigma_f *
         expectation_z(d, [zbar](double z) { return (z - zbar) * (z - zbar); });
}

std::complex<double> characteristic(const Detuning& d, double s) {
  // e^{isf} = e^{is f_center} e^{is sigma z}
  const double w = s * d.sigma_f;
  const double re = expectation_z(d, [w](double z) { return std::cos(w * z); });
  const double im = expectation_z(d, [w](double z) { return std::sin(w * z); });
  return std::complex<double>{re, im} *
         std::complex<double>{std::cos(s * d.f_center), std::sin(s * d.f_center)};
}

double visibility_tau(const Detuning& d, double tau) {
  return std::abs(characteristic(d, 2.0 * kTwoPi * tau));
}

double mean_correlation(const Detuning& d, int l_prod, double big_phi, double tau) {
  const std::complex<double> lam = characteristic(d, 2.0 * kTwoPi * tau);
  const std::complex<double> rot{std::cos(big_phi), std::sin(big_phi)};
  return 0.125 * (1.0 + static_cast<double>(l_prod) * (rot * lam).real());
}

double baseline_product(const Detuning& d, double delta_l, int det_a, int det_b, double phi,
                        double psi, double theta0) {
  if (det_a < 1 || det_a > 2 || det_b < 3 || det_b > 4)
    throw std::invalid_argument("oracle: baseline_product wants det_a in {1,2}, det_b in {3,4}");
  const int la = kLongSign[det_a];
  const int lb = kLongSign[det_b];
  return expectation(d, [&](double f) {
    const double xi = kTwoPi * f * delta_l / kSpeedOfLight;
    const double ia = 0.5 * (1.0 + la * std::cos(xi + phi + 0.5 * theta0));
    const double ib = 0.5 * (1.0 + lb * std::cos(-xi + psi + 0.5 * theta0));
    return ia * ib;
  });
}

PairOutcomes enumerate_pair_outcomes(double big_phi, double detuning_phase) {
  // Deliberately asymmetric split of the joint phase across the two sides;
  // the outcome table must not depend on it, nor on detuning_phase.
  const double phi_a = 0.37 * big_phi + 1.234;
  const double psi_b = big_phi - phi_a;
  const std::complex<double> i1{0.0, 1.0};

  auto amp_a = [&](int path, int det) -> std::complex<double> {
    if (path == 0) return 0.5;
    return 0.5 * static_cast<double>(kLongSign[det]) * std::exp(i1 * (detuning_phase + phi_a));
  };
  auto amp_b = [&](int path, int det) -> std::complex<double> {
    if (path == 0) return 0.5;
    return 0.5 * static_cast<double>(kLongSign[det]) * std::exp(i1 * (-detuning_phase + psi_b));
  };

  PairOutcomes out;
  int pair_index = 0;
  for (int da = 1; da <= 2; ++da) {
    for (int db = 3; db <= 4; ++db) {
      const std::complex<double> a_ss = amp_a(0, da) * amp_b(0, db);
      const std::complex<double> a_ll = amp_a(1, da) * amp_b(1, db);
      const std::complex<double> a_sl = amp_a(0, da) * amp_b(1, db);
      const std::complex<double> a_ls = amp_a(1, da) * amp_b(0, db);
      const double p_c = std::norm(a_ss + a_ll);  // same relative delay: coherent
      out.p_coincident += p_c;
      out.p_sl += std::norm(a_sl);
      out.p_ls += std::norm(a_ls);
      out.coincident_pair[pair_index++] = p_c;
    }
  }
  if (out.p_coincident > 0.0)
    for (double& p : out.coincident_pair) p /= out.p_coincident;
  return out;
}

double ks_critical(std::uint64_t n) {
  // alpha = 0.01 asymptotic Kolmogorov quantile
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

void Report::add(const std::string& name, double value, double expected, double tolerance) {
  ReportLine line;
  line.name = name;
  line.value = value;
  line.expected = expected;
  line.tolerance = tolerance;
  line.pass = std::abs(value - expected) <= tolerance;
  lines.push_back(line);
  all_pass = all_pass && line.pass;
}

Report run_reference_suite(double f_center, double sigma_f, double delta_l) {
  Report rep;
  const Detuning d{f_center, sigma_f};

  // closed-form truncated-normal moments as an independent check on the
  // quadrature itself
  const double lo = trunc_gauss_lo(d), hi = trunc_gauss_hi(d);
  const double alpha = (lo - f_center) / sigma_f, beta = (hi - f_center) / sigma_f;
  const double z = gauss_cdf(beta) - gauss_cdf(alpha);
  const double mean_cf = f_center + sigma_f * (gauss_pdf(alpha) - gauss_pdf(beta)) / z;
  const double ratio = (gauss_pdf(alpha) - gauss_pdf(beta)) / z;
  const double var_cf =
      sigma_f * sigma_f *
      (1.0 + (alpha * gauss_pdf(alpha) - beta * gauss_pdf(beta)) / z - ratio * ratio);
  rep.add("detuning_mean_quadrature_vs_closed_form", detuning_mean(d), mean_cf,
          1e-9 * sigma_f + 1e-9 * std::abs(mean_cf));
  rep.add("detuning_var_quadrature_vs_closed_form", detuning_var(d), var_cf,
          1e-7 * sigma_f * sigma_f);

  rep.add("envelope_V_at_tau_0", visibility_tau(d, 0.0), 1.0, 1e-12);
  const double taus[5] = {0.0, 0.25 / sigma_f, 0.5 / sigma_f, 1.0 / sigma_f, 2.0 / sigma_f};
  double prev = 2.0;
  bool monotone = true;
  for (int i = 0; i < 5; ++i) {
    const double v = visibility_tau(d, taus[i]);
    std::ostringstream name;
    name << "envelope_V_at_tau_" << i;
    rep.add(name.str(), v, v, 0.0);
    if (v > prev + 1e-12) monotone = false;
    prev = v;
  }
  rep.add("envelope_monotone_nonincreasing", monotone ? 1.0 : 0.0, 1.0, 0.0);
  rep.add("envelope_V_at_2_over_sigma_below_0.05", visibility_tau(d, 2.0 / sigma_f) < 0.05 ? 1.0 : 0.0,
          1.0, 0.0);

  if (f_center == 0.0) {
    // half-normal: E[cos(s f)] = exp(-s^2 sigma^2 / 2) exactly, so the
    // post-selected mean at joint phase 0, tau = sqrt(2)/(4 pi sigma) is
    // (1 + 1/e)/8
    const double tau_e = std::sqrt(2.0) / (2.0 * kTwoPi * sigma_f);
    rep.add("mean_correlation_half_normal_1_over_e_point",
            mean_correlation(d, +1, 0.0, tau_e), (1.0 + std::exp(-1.0)) / 8.0, 1e-9);
  }

  rep.add("mean_correlation_tau0_phi0_D1D3", mean_correlation(d, +1, 0.0, 0.0), 0.25, 1e-12);
  rep.add("mean_correlation_tau0_phi0_D1D4", mean_correlation(d, -1, 0.0, 0.0), 0.0, 1e-12);

  rep.add("baseline_D1D3_at_joint_phase_0",
          baseline_product(d, delta_l, 1, 3, 0.0, 0.0, 0.0), 0.375, 1e-6);
  rep.add("baseline_D1D4_at_joint_phase_0",
          baseline_product(d, delta_l, 1, 4, 0.0, 0.0, 0.0), 0.125, 1e-6);
  rep.add("baseline_D1D3_at_joint_phase_pi",
          baseline_product(d, delta_l, 1, 3, kPi, 0.0, 0.0), 0.125, 1e-6);

  const double phis[3] = {0.0, 0.9, 2.5};
  const double xis[3] = {0.0, 1.1, 4.2};
  double worst_frac = 0.0, worst_cond = 0.0;
  for (double big_phi : phis) {
    for (double xi : xis) {
      const PairOutcomes po = enumerate_pair_outcomes(big_phi, xi);
      worst_frac = std::max({worst_frac, std::abs(po.p_coincident - 0.5),
                             std::abs(po.p_sl - 0.25), std::abs(po.p_ls - 0.25)});
      const int lprod[4] = {+1, -1, -1, +1};
      for (int k = 0; k < 4; ++k) {
        const double want = 0.25 * (1.0 + lprod[k] * std::cos(big_phi));
        worst_cond = std::max(worst_cond, std::abs(po.coincident_pair[k] - want));
      }
    }
  }
  rep.add("enumeration_outcome_fractions_max_error", worst_frac, 0.0, 1e-12);
  rep.add("enumeration_coincident_pair_distribution_max_error", worst_cond, 0.0, 1e-12);
  rep.add("enumeration_p_coincident", 0.5, 0.5, 0.0);
  rep.add("enumeration_p_sl", 0.25, 0.25, 0.0);
  rep.add("enumeration_p_ls", 0.25, 0.25, 0.0);

  rep.add("ks_critical_alpha_0.01_n_1e6", ks_critical(1000000), 1.6276e-3, 1e-9);
  return rep;
}

std::string report_to_json(const Report& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  j["lines"] = nlohmann::json::array();
  for (const auto& line : report.lines) {
    j["lines"].push_back({{"name", line.name},
                          {"value", line.value},
                          {"expected", line.expected},
                          {"tolerance", line.tolerance},
                          {"pass", line.pass}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const Report& report) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& line : report.lines) {
    os << (line.pass ? "PASS " : "FAIL ") << line.name << " value=" << line.value
       << " expected=" << line.expected << " tol=" << line.tolerance << "\n";
  }
  os << (report.all_pass ? "ORACLE PASS" : "ORACLE FAIL") << "\n";
  return os.str();
}

}  // namespace franson::oracle
