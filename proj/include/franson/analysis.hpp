#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "franson/correlator.hpp"
#include "franson/model.hpp"
#include "franson/timetag.hpp"

namespace franson {

// Weighted least-squares fit of y = A (1 + V cos(x + theta)).
//
// In this parameterization V is also the Michelson contrast
// (max-min)/(max+min) of the fitted curve; amplitude() = A*V is the raw
// cosine coefficient for callers that normalize against an external floor.
struct FringeFit {
  double amplitude = 0.0;   // A, the offset
  double visibility = 0.0;  // V
  double phase = 0.0;       // theta, rad
  double amplitude_err = 0.0;
  double visibility_err = 0.0;
  double phase_err = 0.0;
  double chi2_dof = 0.0;
  std::string warning;  // non-empty for a non-spanning grid

  double cosine_amplitude() const { return amplitude * visibility; }
};

struct ScanPoint {
  double x = 0.0;
  double value = 0.0;
  double error = 0.0;
};

// The model is linear in (A, A V cos theta, -A V sin theta), so the weighted
// normal equations solve it exactly; no iteration, deterministic.
// Throws on fewer than 5 points or all-zero values.
FringeFit fit_fringe(const std::vector<ScanPoint>& points);

enum class Pipeline { Analytic, MonteCarlo, TimeTag };

Pipeline pipeline_from_string(const std::string& s);
std::string to_string(Pipeline p);

// n points, endpoints inclusive.
std::vector<double> make_grid(double start, double stop, std::size_t n);

// One correlator/timetag evaluation per grid point; phi runs over the grid
// with psi fixed from base.settings. Analytic points carry zero error,
// Monte Carlo points their standard error, timetag points Poisson counts
// with sqrt(N) errors. Deterministic given config.seed.
std::vector<ScanPoint> scan_fringe(Pipeline pipeline, const ExperimentConfig& cfg,
                                   const JointSetting& base, const std::vector<double>& grid,
                                   std::uint64_t n_per_point, int n_threads = 1);

// Simulated local-detection counts for one side's two detectors across a
// phase grid: Poisson event count, detector chosen per-event from the local
// intensity at a sampled detuning. counts[0] = bar port, counts[1] = cross.
struct LocalScan {
  Side side = Side::A;
  std::vector<double> grid;
  std::vector<std::vector<std::uint64_t>> counts;  // [2][grid]
};

LocalScan local_scan(const ExperimentConfig& cfg, Side side, const std::vector<double>& grid,
                     double counts_per_detector, std::uint64_t substream = 0);

// Per-point deviation from the series mean in Poisson sigmas; pass iff
// max |z| < 4.
struct FlatnessReport {
  double max_abs_z = 0.0;
  bool pass = false;
  std::vector<double> z_scores;  // flattened, series-major
};

FlatnessReport flatness_report(const std::vector<std::vector<std::uint64_t>>& counts_per_detector);

enum class SweepVariable { TauAb, SinglesRate, Window };

SweepVariable sweep_variable_from_string(const std::string& s);
std::string to_string(SweepVariable v);

struct VisibilityPoint {
  double x = 0.0;
  double visibility = 0.0;
  double error = 0.0;
};

struct VisibilityCurve {
  SweepVariable variable = SweepVariable::TauAb;
  std::vector<VisibilityPoint> points;
  bool monotone_nonincreasing = false;  // within 2 sigma per step
};

// Repeated fringe scan + fit per grid value. TauAb uses the quadrature
// V(tau); SinglesRate and Window run the timetag pipeline.
VisibilityCurve visibility_vs(const ExperimentConfig& cfg, const JointSetting& base,
                              SweepVariable variable, const std::vector<double>& grid,
                              std::size_t phase_points, int n_threads = 1);

}  // namespace franson
