#pragma once

// Reference numerics kept deliberately independent of the simulation code:
// everything here is recomputed from first principles (adaptive quadrature,
// brute-force amplitude enumeration) so the test suite can cross-check the
// fast implementations against a second derivation.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace franson::oracle {

// Truncated Gaussian on [max(0, fc - 6 sd), fc + 6 sd].
struct Detuning {
  double f_center = 0.0;
  double sigma_f = 1.0;
};

double trunc_gauss_lo(const Detuning& d);
double trunc_gauss_hi(const Detuning& d);

// E[delta_f] and Var[delta_f] under the truncated density.
double detuning_mean(const Detuning& d);
double detuning_var(const Detuning& d);

// E[exp(i s delta_f)].
std::complex<double> characteristic(const Detuning& d, double s);

// |characteristic(4 pi tau)|; the post-selected fringe envelope.
double visibility_tau(const Detuning& d, double tau);

// (1/8) (1 + l_prod Re[e^{i Phi} characteristic(4 pi tau)]).
double mean_correlation(const Detuning& d, int l_prod, double big_phi, double tau);

// E[I_a I_b] without post-selection, intensities rebuilt from the four
// detector equations with signed detunings +/- delta_f on the two sides.
double baseline_product(const Detuning& d, double delta_l, int det_a, int det_b, double phi,
                        double psi, double theta0);

// Brute-force enumeration of the 16 (path_a, path_b, detector_a, detector_b)
// amplitude products for one pair. SS and LL land in the same time slot and
// add coherently; SL and LS are distinguishable and add as probabilities.
struct PairOutcomes {
  double p_coincident = 0.0;
  double p_sl = 0.0;  // side A short, side B long
  double p_ls = 0.0;
  // conditional detector-pair distribution of a coincident event,
  // ordered (D1,D3), (D1,D4), (D2,D3), (D2,D4)
  double coincident_pair[4] = {0.0, 0.0, 0.0, 0.0};
};

PairOutcomes enumerate_pair_outcomes(double big_phi, double detuning_phase);

// Kolmogorov-Smirnov critical statistic at alpha = 0.01.
double ks_critical(std::uint64_t n);

struct ReportLine {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<ReportLine> lines;
  bool all_pass = true;
  void add(const std::string& name, double value, double expected, double tolerance);
};

// The full reference suite: detuning moments, envelope decay curve, baseline
// averages, enumeration fractions. Self-checking where closed forms exist.
Report run_reference_suite(double f_center, double sigma_f, double delta_l);

std::string report_to_json(const Report& report);
std::string report_to_text(const Report& report);

}  // namespace franson::oracle
