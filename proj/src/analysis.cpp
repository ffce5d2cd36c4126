#include "franson/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "franson/rng.hpp"
#include "franson/source.hpp"
#include "franson/umzi.hpp"

namespace franson {

namespace {

// 3x3 symmetric solve + inverse via adjugate; the normal matrix of a spanning
// phase grid is far from singular.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};
};

double det3(const Mat3& a) {
  return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
         a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
         a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

Mat3 inv3(const Mat3& a) {
  const double d = det3(a);
  if (!std::isfinite(d) || std::abs(d) < 1e-300)
    throw std::runtime_error("fit_fringe: singular normal matrix");
  Mat3 r;
  r.m[0][0] = (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) / d;
  r.m[0][1] = (a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2]) / d;
  r.m[0][2] = (a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1]) / d;
  r.m[1][0] = (a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2]) / d;
  r.m[1][1] = (a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0]) / d;
  r.m[1][2] = (a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2]) / d;
  r.m[2][0] = (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]) / d;
  r.m[2][1] = (a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1]) / d;
  r.m[2][2] = (a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]) / d;
  return r;
}

}  // namespace

FringeFit fit_fringe(const std::vector<ScanPoint>& points) {
  if (points.size() < 5) throw std::invalid_argument("fit_fringe: need at least 5 points");
  bool any_nonzero = false;
  bool all_weighted = true;
  double xmin = points[0].x, xmax = points[0].x;
  for (const auto& p : points) {
    if (p.value != 0.0) any_nonzero = true;
    if (!(p.error > 0.0)) all_weighted = false;
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (!any_nonzero) throw std::invalid_argument("fit_fringe: all-zero counts");

  FringeFit fit;
  if (xmax - xmin < 0.99 * kTwoPi)
    fit.warning = "grid spans less than one period; fit may be degenerate";

  // basis (1, cos x, sin x); y = c0 + c1 cos x + c2 sin x
  Mat3 xtwx;
  std::array<double, 3> xtwy{0.0, 0.0, 0.0};
  for (const auto& p : points) {
    const double w = all_weighted ? 1.0 / (p.error * p.error) : 1.0;
    const std::array<double, 3> b{1.0, std::cos(p.x), std::sin(p.x)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) xtwx.m[i][j] += w * b[i] * b[j];
      xtwy[i] += w * b[i] * p.value;
    }
  }
  Mat3 cov = inv3(xtwx);
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i] += cov.m[i][j] * xtwy[j];

  double chi2 = 0.0;
  for (const auto& p : points) {
    const double w = all_weighted ? 1.0 / (p.error * p.error) : 1.0;
    const double r = p.value - (c[0] + c[1] * std::cos(p.x) + c[2] * std::sin(p.x));
    chi2 += w * r * r;
  }
  fit.chi2_dof = chi2 / static_cast<double>(points.size() - 3);
  if (!all_weighted) {
    // unit weights carry no scale; estimate the noise variance from the
    // residuals so parameter errors stay meaningful
    for (auto& row : cov.m)
      for (double& v : row) v *= fit.chi2_dof;
  }

  const double amp = std::hypot(c[1], c[2]);
  if (c[0] == 0.0) throw std::runtime_error("fit_fringe: zero fringe offset");
  fit.amplitude = c[0];
  fit.visibility = amp / c[0];
  // c1 = A V cos theta, c2 = -A V sin theta
  fit.phase = std::atan2(-c[2], c[1]);

  fit.amplitude_err = std::sqrt(std::max(0.0, cov.m[0][0]));
  if (amp > 0.0) {
    // delta method for V = hypot(c1,c2)/c0 and theta = atan2(-c2,c1)
    const std::array<double, 3> gv{-fit.visibility / c[0], c[1] / (amp * c[0]), c[2] / (amp * c[0])};
    const std::array<double, 3> gt{0.0, c[2] / (amp * amp), -c[1] / (amp * amp)};
    double vv = 0.0, vt = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        vv += gv[i] * cov.m[i][j] * gv[j];
        vt += gt[i] * cov.m[i][j] * gt[j];
      }
    fit.visibility_err = std::sqrt(std::max(0.0, vv));
    fit.phase_err = std::sqrt(std::max(0.0, vt));
  } else {
    fit.phase = 0.0;
    fit.visibility_err = std::sqrt(std::max(0.0, cov.m[1][1] + cov.m[2][2])) / std::abs(c[0]);
    fit.phase_err = kPi;  // undetermined
  }
  return fit;
}

Pipeline pipeline_from_string(const std::string& s) {
  if (s == "analytic") return Pipeline::Analytic;
  if (s == "montecarlo" || s == "mc") return Pipeline::MonteCarlo;
  if (s == "timetag") return Pipeline::TimeTag;
  throw std::invalid_argument("unknown pipeline '" + s + "' (analytic|montecarlo|timetag)");
}

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Analytic: return "analytic";
    case Pipeline::MonteCarlo: return "montecarlo";
    case Pipeline::TimeTag: return "timetag";
  }
  return "?";
}

std::vector<double> make_grid(double start, double stop, std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> g(n);
  const double step = (stop - start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = start + step * static_cast<double>(i);
  return g;
}

namespace {

std::uint64_t scan_point_seed(std::uint64_t seed, std::uint64_t point) {
  return mix64(mix64(seed ^ (stream_tag::kScanPoint << 48)) ^ point);
}

}  // namespace

std::vector<ScanPoint> scan_fringe(Pipeline pipeline, const ExperimentConfig& cfg,
                                   const JointSetting& base, const std::vector<double>& grid,
                                   std::uint64_t n_per_point, int n_threads) {
  std::vector<ScanPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    JointSetting js = base;
    js.settings.phi = grid[i];
    ScanPoint p;
    p.x = grid[i];
    switch (pipeline) {
      case Pipeline::Analytic: {
        p.value = mean_correlation(js, cfg);
        p.error = 0.0;
        break;
      }
      case Pipeline::MonteCarlo: {
        const McEstimate e = mc_mean_correlation(js, cfg, n_per_point, /*substream=*/i);
        p.value = e.value;
        p.error = e.stderr_;
        break;
      }
      case Pipeline::TimeTag: {
        ExperimentConfig pc = cfg;
        pc.seed = scan_point_seed(cfg.seed, i);
        if (n_per_point > 0 && cfg.pair_rate > 0.0)
          pc.duration = static_cast<double>(n_per_point) / cfg.pair_rate;
        const auto stream = generate_stream(pc, n_threads);
        const auto tags = simulate_tags(pc, js.settings, stream, n_threads);
        CoincidenceOptions opts;
        opts.window = cfg.window;
        opts.hist_half_range = 2.0 * delay_dT(cfg);
        const auto res = count_coincidences(tags.side_a, tags.side_b, opts);
        const auto n = res.counts.at(channel_of(js.det_a), channel_of(js.det_b));
        p.value = static_cast<double>(n);
        p.error = std::sqrt(std::max<double>(1.0, static_cast<double>(n)));
        break;
      }
    }
    out.push_back(p);
  }
  return out;
}

LocalScan local_scan(const ExperimentConfig& cfg, Side side, const std::vector<double>& grid,
                     double counts_per_detector, std::uint64_t substream) {
  LocalScan scan;
  scan.side = side;
  scan.grid = grid;
  scan.counts.assign(2, std::vector<std::uint64_t>(grid.size(), 0));
  const Detector bar = side == Side::A ? Detector::D1 : Detector::D3;
  CounterRng rng(cfg.seed, {stream_tag::kMonteCarlo, 0x10CA1ULL, substream});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PhaseSettings s;
    s.theta0 = cfg.theta0;
    (side == Side::A ? s.phi : s.psi) = grid[i];
    // Poisson total + per-event Bernoulli thinning keeps each detector's
    // count exactly Poisson, so the z-scores below are honest.
    const std::uint64_t n_events = rng.poisson(2.0 * counts_per_detector);
    std::uint64_t n_bar = 0;
    for (std::uint64_t k = 0; k < n_events; ++k) {
      const double df = sample_detuning(cfg, rng);
      const double p_bar = local_intensity(bar, signed_detuning(side, df), s, cfg);
      if (rng.uniform01() < p_bar) ++n_bar;
    }
    scan.counts[0][i] = n_bar;
    scan.counts[1][i] = n_events - n_bar;
  }
  return scan;
}

FlatnessReport flatness_report(const std::vector<std::vector<std::uint64_t>>& counts_per_detector) {
  FlatnessReport rep;
  for (const auto& series : counts_per_detector) {
    if (series.empty()) continue;
    double mean = 0.0;
    for (auto c : series) mean += static_cast<double>(c);
    mean /= static_cast<double>(series.size());
    for (auto c : series) {
      const double z = mean > 0.0 ? (static_cast<double>(c) - mean) / std::sqrt(mean) : 0.0;
      rep.z_scores.push_back(z);
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    }
  }
  rep.pass = rep.max_abs_z < 4.0;
  return rep;
}

SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "tau_ab" || s == "tau") return SweepVariable::TauAb;
  if (s == "singles_rate" || s == "singles") return SweepVariable::SinglesRate;
  if (s == "window") return SweepVariable::Window;
  throw std::invalid_argument("unknown sweep variable '" + s + "' (tau_ab|singles_rate|window)");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::TauAb: return "tau_ab";
    case SweepVariable::SinglesRate: return "singles_rate";
    case SweepVariable::Window: return "window";
  }
  return "?";
}

namespace {

bool monotone_within_error(const std::vector<VisibilityPoint>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double slack = 2.0 * std::hypot(pts[i - 1].error, pts[i].error);
    if (pts[i].visibility > pts[i - 1].visibility + slack) return false;
  }
  return true;
}

}  // namespace

VisibilityCurve visibility_vs(const ExperimentConfig& cfg, const JointSetting& base,
                              SweepVariable variable, const std::vector<double>& grid,
                              std::size_t phase_points, int n_threads) {
  VisibilityCurve curve;
  curve.variable = variable;
  const auto phase_grid = make_grid(0.0, kTwoPi, phase_points);

  switch (variable) {
    case SweepVariable::TauAb: {
      for (double tau : grid)
        curve.points.push_back({tau, fringe_visibility_tau(cfg, tau), 0.0});
      break;
    }
    case SweepVariable::SinglesRate: {
      for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        ExperimentConfig c = cfg;
        c.singles_rate = grid[gi];
        c.seed = mix64(cfg.seed ^ (0x51u + gi));
        const auto pts = scan_fringe(Pipeline::TimeTag, c, base, phase_grid, 0, n_threads);
        const FringeFit fit = fit_fringe(pts);
        curve.points.push_back({grid[gi], fit.visibility, fit.visibility_err});
      }
      break;
    }
    case SweepVariable::Window: {
      // One simulation per phase point, re-selected at each window.
      const double dT = delay_dT(cfg);
      std::vector<std::vector<MatchRecord>> records(phase_grid.size());
      for (std::size_t i = 0; i < phase_grid.size(); ++i) {
        ExperimentConfig pc = cfg;
        pc.seed = mix64(mix64(cfg.seed ^ (stream_tag::kScanPoint << 48)) ^ i);
        JointSetting js = base;
        js.settings.phi = phase_grid[i];
        const auto stream = generate_stream(pc, n_threads);
        const auto tags = simulate_tags(pc, js.settings, stream, n_threads);
        CoincidenceOptions opts;
        opts.window = *std::max_element(grid.begin(), grid.end());
        opts.hist_half_range = 2.0 * dT;
        records[i] = count_coincidences(tags.side_a, tags.side_b, opts).records;
      }
      for (double w : grid) {
        std::vector<ScanPoint> pts;
        for (std::size_t i = 0; i < phase_grid.size(); ++i) {
          const auto sel = select_central_peak(records[i], w, dT);
          const double n = static_cast<double>(sel.counts.at(channel_of(base.det_a), channel_of(base.det_b)));
          pts.push_back({phase_grid[i], n, std::sqrt(std::max(1.0, n))});
        }
        const FringeFit fit = fit_fringe(pts);
        curve.points.push_back({w, fit.visibility, fit.visibility_err});
      }
      break;
    }
  }
  curve.monotone_nonincreasing = monotone_within_error(curve.points);
  return curve;
}

}  // namespace franson
