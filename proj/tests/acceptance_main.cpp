// End-to-end acceptance runner: eleven numbered checks, one PASS/FAIL line
// each, every tolerance pinned in the code next to the check. Exit code is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "franson/analysis.hpp"
#include "franson/commands.hpp"
#include "franson/correlator.hpp"
#include "franson/oracle.hpp"
#include "franson/rng.hpp"
#include "franson/source.hpp"
#include "franson/timetag.hpp"

using namespace franson;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++g_failures;
  std::printf("%s [%2d] %s [%.2f s]\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Dephasing-regime config: delta_l * sigma_f / c = 10.007, detuning band
// centered 5 sigma above zero so the truncation tail is immaterial.
ExperimentConfig regime_config() {
  ExperimentConfig cfg;
  cfg.sigma_f = 1e9;
  cfg.f_center = 5e9;
  cfg.delta_l = 3.0;
  cfg.seed = 20230815;
  return cfg;
}

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

JointSetting make_setting(Detector a, Detector b, double phi, double psi) {
  JointSetting js;
  js.det_a = a;
  js.det_b = b;
  js.settings.phi = phi;
  js.settings.psi = psi;
  return js;
}

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// 1. Analytic (D1,D3) fringe equals (1/8)(1 + cos(phi+psi)) and fits to V = 1.
void criterion_1() {
  Timer t;
  const auto cfg = regime_config();
  const auto grid = make_grid(0.0, kTwoPi, 24);
  double max_dev = 0.0;
  for (double x : grid) {
    const double got = mean_correlation(make_setting(Detector::D1, Detector::D3, x, 0.0), cfg);
    const double want = 0.125 * (1.0 + std::cos(x));
    max_dev = std::max(max_dev, std::abs(got - want) / std::max(std::abs(want), 0.25));
  }
  const auto pts = scan_fringe(Pipeline::Analytic, cfg,
                               make_setting(Detector::D1, Detector::D3, 0.0, 0.0), grid, 0);
  const double v = fit_fringe(pts).visibility;
  const double secs = t.seconds();
  const bool pass = max_dev <= 1e-9 && std::abs(v - 1.0) <= 1e-9 && secs < 1.0;
  report(1, pass,
         fmt("(D1,D3) fringe = (1+cos)/8: max rel dev %.2e (tol 1e-9), |V-1| = %.2e (tol 1e-9), "
             "runtime limit 1 s",
             max_dev, std::abs(v - 1.0)),
         secs);
}

// 2. (D1,D4) and (D2,D3) are pi-shifted from (D1,D3); (D2,D4) is in phase.
void criterion_2() {
  Timer t;
  const auto cfg = regime_config();
  const auto grid = make_grid(0.0, kTwoPi, 24);
  auto fitted_phase = [&](Detector a, Detector b) {
    return fit_fringe(scan_fringe(Pipeline::Analytic, cfg, make_setting(a, b, 0.0, 0.4), grid, 0))
        .phase;
  };
  const double p13 = fitted_phase(Detector::D1, Detector::D3);
  const double p14 = fitted_phase(Detector::D1, Detector::D4);
  const double p23 = fitted_phase(Detector::D2, Detector::D3);
  const double p24 = fitted_phase(Detector::D2, Detector::D4);
  const double d14 = std::abs(wrap_pi(p14 - p13 - kPi));
  const double d23 = std::abs(wrap_pi(p23 - p13 - kPi));
  const double d24 = std::abs(wrap_pi(p24 - p13));
  const double worst = std::max({d14, d23, d24});
  const bool pass = worst <= 1e-6;
  report(2, pass,
         fmt("pair phase offsets vs (D1,D3): |d14-pi| = %.2e, |d23-pi| = %.2e, |d24| = %.2e "
             "(tol 1e-6 rad)",
             d14, d23, d24),
         t.seconds());
}

// 3. R13 + R14 = 1/4: exact analytically, within 3 sigma for Monte Carlo.
void criterion_3() {
  Timer t;
  const auto cfg = regime_config();
  double max_dev = 0.0;
  for (double x : make_grid(0.0, kTwoPi, 24)) {
    const double sum = mean_correlation(make_setting(Detector::D1, Detector::D3, x, 0.0), cfg) +
                       mean_correlation(make_setting(Detector::D1, Detector::D4, x, 0.0), cfg);
    max_dev = std::max(max_dev, std::abs(sum - 0.25));
  }
  const auto mc13 =
      mc_mean_correlation(make_setting(Detector::D1, Detector::D3, 0.7, 0.0), cfg, 1000000, 11);
  const auto mc14 =
      mc_mean_correlation(make_setting(Detector::D1, Detector::D4, 0.7, 0.0), cfg, 1000000, 12);
  const double mc_dev = std::abs(mc13.value + mc14.value - 0.25);
  const double sig = std::hypot(mc13.stderr_, mc14.stderr_);
  const bool pass = max_dev <= 1e-15 && mc_dev <= 3.0 * sig;
  report(3, pass,
         fmt("R13+R14 = 1/4: analytic max dev %.2e (tol 1e-15), MC dev %.2e = %.1f sigma at "
             "N = 1e6 per pair (tol 3 sigma)",
             max_dev, mc_dev, sig > 0 ? mc_dev / sig : 0.0),
         t.seconds());
}

// 4. Local detection rates flat at 1e5 counts/point over 24-point scans on
// both sides; the same test must fail when the detuning spread collapses.
void criterion_4() {
  Timer t;
  auto cfg = regime_config();
  const auto grid = make_grid(0.0, kTwoPi, 24);
  const auto a = local_scan(cfg, Side::A, grid, 1e5, 0);
  const auto b = local_scan(cfg, Side::B, grid, 1e5, 1);
  const auto rep = flatness_report({a.counts[0], a.counts[1], b.counts[0], b.counts[1]});

  auto narrow = cfg;
  narrow.sigma_f = 1e3;  // delta_l * sigma_f / c ~ 1e-5: local fringe survives
  narrow.f_center = 0.0;
  const auto bad = flatness_report(local_scan(narrow, Side::A, grid, 1e5, 0).counts);
  const double secs = t.seconds();
  const bool pass = rep.pass && rep.max_abs_z < 4.0 && !bad.pass && secs < 30.0;
  report(4, pass,
         fmt("local uniformity at dL*sigma_f/c = %.1f: max |z| = %.2f (tol < 4), inverted "
             "sigma_f = 1e3 gives max |z| = %.0f (must fail), runtime limit 30 s",
             delay_dT(cfg) * cfg.sigma_f, rep.max_abs_z, bad.max_abs_z),
         secs);
}

// 5. Time-tag end to end at 1e6+ pairs: central-peak V, peak areas, satellite
// washout to V = 1/2.
void criterion_5() {
  Timer t;
  auto cfg = regime_config();
  cfg.singles_rate = 0.0;
  cfg.pair_rate = 1e4;
  cfg.duration = 10.0;  // 1e5 pairs per phase point, 12 points
  const double dT = delay_dT(cfg);
  const auto base = make_setting(Detector::D1, Detector::D3, 0.0, 0.0);
  const auto curve = visibility_vs(cfg, base, SweepVariable::Window, {dT / 5.0, 3.2 * dT}, 12);
  const double v_central = curve.points[0].visibility;
  const double v_leaky = curve.points[1].visibility;

  ExperimentConfig hist_cfg = cfg;
  hist_cfg.duration = 100.0;  // 1e6 pairs in one stream
  hist_cfg.seed = 777;
  const auto tags = simulate_tags(hist_cfg, base.settings, generate_stream(hist_cfg));
  CoincidenceOptions opts;
  opts.window = dT / 5.0;
  opts.hist_half_range = 2.0 * dT;
  const auto res = count_coincidences(tags.side_a, tags.side_b, opts);
  const std::int64_t dt_ps = std::llround(dT * 1e12);
  double n_ls = 0, n_c = 0, n_sl = 0;
  for (const auto& [center, count] : res.histogram.bins) {
    if (center < -dt_ps / 2) n_ls += static_cast<double>(count);
    else if (center <= dt_ps / 2) n_c += static_cast<double>(count);
    else n_sl += static_cast<double>(count);
  }
  const double n_tot = n_ls + n_c + n_sl;
  const double zc = std::abs(n_c - 0.50 * n_tot) / std::sqrt(0.50 * n_tot);
  const double zsl = std::abs(n_sl - 0.25 * n_tot) / std::sqrt(0.25 * n_tot);
  const double zls = std::abs(n_ls - 0.25 * n_tot) / std::sqrt(0.25 * n_tot);
  const double secs = t.seconds();
  const bool pass = v_central >= 0.98 && std::abs(v_leaky - 0.5) <= 0.02 && zc <= 4.0 &&
                    zsl <= 4.0 && zls <= 4.0 && secs < 60.0;
  report(5, pass,
         fmt("timetag end-to-end: central V = %.4f (>= 0.98), window 3.2 dT V = %.4f "
             "(0.5 +/- 0.02), peak areas 0.50/0.25/0.25 off by %.1f/%.1f/%.1f sigma (tol 4) "
             "at %.0f matches, runtime limit 60 s",
             v_central, v_leaky, zc, zsl, zls, n_tot),
         secs);
}

// 6. Without post-selection the fringe coefficient halves: 0.5 +/- 0.01,
// and the sampler tracks the quadrature oracle.
void criterion_6() {
  Timer t;
  const auto cfg = regime_config();
  const oracle::Detuning d{cfg.f_center, cfg.sigma_f};
  const auto grid = make_grid(0.0, kTwoPi, 12);
  std::vector<ScanPoint> mc_pts, oracle_pts;
  double max_z = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto js = make_setting(Detector::D1, Detector::D3, grid[i], 0.0);
    const auto est = baseline_product_correlation(js, cfg, 1000000, i);
    const double ref = oracle::baseline_product(d, cfg.delta_l, 1, 3, grid[i], 0.0, 0.0);
    max_z = std::max(max_z, std::abs(est.value - ref) / est.stderr_);
    mc_pts.push_back({grid[i], est.value, est.stderr_});
    oracle_pts.push_back({grid[i], ref, 0.0});
  }
  // In y = A(1 + V cos), V is the fringe coefficient: 1.0 post-selected,
  // expected to halve without post-selection.
  const auto fit = fit_fringe(mc_pts);
  const auto ofit = fit_fringe(oracle_pts);
  const double coeff = fit.visibility;
  const double ocoeff = ofit.visibility;
  const double coeff_err = fit.visibility_err;
  const double fit_z = std::abs(coeff - ocoeff) / coeff_err;
  const bool pass = std::abs(coeff - 0.5) <= 0.01 && fit_z <= 3.0 && max_z <= 4.0;
  report(6, pass,
         fmt("baseline fringe coefficient = %.4f +/- %.4f (0.5 +/- 0.01), oracle coefficient "
             "%.4f off by %.1f sigma (tol 3), worst point %.1f sigma (tol 4), N = 1.2e7",
             coeff, coeff_err, ocoeff, fit_z, max_z),
         t.seconds());
}

// 7. V(tau) decays monotonically from 1 to < 0.05 by tau = 2/sigma_f and the
// MC correlator tracks the quadrature at five grid points.
void criterion_7() {
  Timer t;
  ExperimentConfig cfg;  // f_center = 0: the half-normal detuning band
  cfg.sigma_f = 1e9;
  cfg.seed = 31;
  const std::vector<double> taus{0.0, 0.25 / cfg.sigma_f, 0.5 / cfg.sigma_f, 1.0 / cfg.sigma_f,
                                 2.0 / cfg.sigma_f};
  std::vector<double> vs;
  for (double tau : taus) vs.push_back(fringe_visibility_tau(cfg, tau));
  bool monotone = true;
  for (std::size_t i = 1; i < vs.size(); ++i) monotone = monotone && vs[i] <= vs[i - 1] + 1e-12;
  double max_z = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    auto js = make_setting(Detector::D1, Detector::D3, 0.4, 0.0);
    js.tau_ab = taus[i];
    const auto est = mc_mean_correlation(js, cfg, 200000, 100 + i);
    const double ref = mean_correlation(js, cfg);
    max_z = std::max(max_z, std::abs(est.value - ref) / est.stderr_);
  }
  const bool pass =
      monotone && std::abs(vs.front() - 1.0) <= 1e-12 && vs.back() < 0.05 && max_z <= 3.0;
  report(7, pass,
         fmt("V(tau) decay: V(0)-1 = %.1e (tol 1e-12), monotone %s, V(2/sigma_f) = %.4f "
             "(< 0.05), MC vs quadrature worst %.1f sigma over 5 points (tol 3)",
             vs.front() - 1.0, monotone ? "yes" : "NO", vs.back(), max_z),
         t.seconds());
}

// 8. PBS mode: no fringe in any pipeline at N = 1e6.
void criterion_8() {
  Timer t;
  auto cfg = regime_config();
  cfg.mode = Mode::PBS;
  cfg.singles_rate = 0.0;
  cfg.pair_rate = 1e4;
  cfg.window = delay_dT(cfg) / 5.0;
  const auto base = make_setting(Detector::D1, Detector::D3, 0.0, 0.0);
  const auto grid = make_grid(0.0, kTwoPi, 12);
  const double v_an =
      fit_fringe(scan_fringe(Pipeline::Analytic, cfg, base, grid, 0)).visibility;
  const double v_mc =
      fit_fringe(scan_fringe(Pipeline::MonteCarlo, cfg, base, grid, 100000)).visibility;
  const double v_tt =
      fit_fringe(scan_fringe(Pipeline::TimeTag, cfg, base, grid, 83334)).visibility;
  const double worst = std::max({v_an, v_mc, v_tt});
  const bool pass = worst <= 0.02;
  report(8, pass,
         fmt("pbs mode visibilities: analytic %.1e, monte carlo %.1e, timetag %.4f "
             "(all <= 0.02, timetag N = 1e6 pairs)",
             v_an, v_mc, v_tt),
         t.seconds());
}

// 9. eta re-randomization leaves tags bit-identical; (phi,psi) -> (phi+a,
// psi-a) leaves the analytic correlation unchanged to 1e-12.
void criterion_9() {
  Timer t;
  auto cfg = regime_config();
  cfg.duration = 0.02;
  const auto base = make_setting(Detector::D2, Detector::D3, 0.3, 0.9);
  auto stream = generate_stream(cfg);
  const auto tags = simulate_tags(cfg, base.settings, stream);
  CounterRng scramble(991, {0xE7A});
  for (auto& ch : stream)
    for (auto& ev : ch.events) ev.eta = scramble.uniform01() * kTwoPi;
  const auto tags2 = simulate_tags(cfg, base.settings, stream);
  const bool bit_identical = tags.side_a == tags2.side_a && tags.side_b == tags2.side_b;

  double max_dev = 0.0;
  const double ref = mean_correlation(base, cfg);
  for (double a : {0.5, 2.1, -1.3, kPi}) {
    auto js = base;
    js.settings.phi += a;
    js.settings.psi -= a;
    max_dev = std::max(max_dev, std::abs(mean_correlation(js, cfg) - ref));
  }
  const bool pass = bit_identical && max_dev <= 1e-12;
  report(9, pass,
         fmt("invariances: eta re-randomization %s (%zu+%zu tags), joint-phase shift max dev "
             "%.1e (tol 1e-12)",
             bit_identical ? "bit-identical" : "DIFFERS", tags.side_a.size(), tags.side_b.size(),
             max_dev),
         t.seconds());
}

// 10. cmd_simulate output is byte-identical for --threads 1 vs --threads 4.
void criterion_10() {
  Timer t;
  const fs::path root = fs::temp_directory_path() / "franson_acceptance_10";
  fs::remove_all(root);
  CliOptions o1;
  o1.out_dir = (root / "t1").string();
  o1.seed = 424243;
  o1.threads = 1;
  o1.duration = 0.02;
  CliOptions o4 = o1;
  o4.out_dir = (root / "t4").string();
  o4.threads = 4;
  const bool ok = cmd_simulate(o1) == 0 && cmd_simulate(o4) == 0;
  const std::string b1 = slurp(o1.out_dir + "/tags.ftt1");
  const std::string b4 = slurp(o4.out_dir + "/tags.ftt1");
  const bool pass = ok && !b1.empty() && b1 == b4;
  fs::remove_all(root);
  report(10, pass,
         fmt("cmd_simulate determinism: threads 1 vs 4 tag files %s (%zu bytes)",
             b1 == b4 ? "byte-identical" : "DIFFER", b1.size()),
         t.seconds());
}

// 11. Visibility strictly decreases as singles_rate goes 0 -> 100x pair_rate.
void criterion_11() {
  Timer t;
  auto cfg = regime_config();
  cfg.pair_rate = 1e4;
  cfg.duration = 0.5;
  cfg.window = 2e-9;
  const auto base = make_setting(Detector::D1, Detector::D3, 0.0, 0.0);
  const std::vector<double> rates{0.0, 30.0 * cfg.pair_rate, 100.0 * cfg.pair_rate};
  const auto curve = visibility_vs(cfg, base, SweepVariable::SinglesRate, rates, 12);
  const double v0 = curve.points[0].visibility;
  const double v1 = curve.points[1].visibility;
  const double v2 = curve.points[2].visibility;
  const bool pass = v0 > v1 && v1 > v2;
  report(11, pass,
         fmt("singles dilution: V(0) = %.3f > V(30x) = %.3f > V(100x) = %.3f (strict)", v0, v1,
             v2),
         t.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite: 11 criteria\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures == 0) std::printf("acceptance: all 11 criteria PASS\n");
  else std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures;
}
