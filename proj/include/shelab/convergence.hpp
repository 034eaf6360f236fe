#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shelab/density.hpp"
#include "shelab/potential.hpp"
#include "shelab/she.hpp"

namespace shelab {

enum class RcMethod { root_test, ratio_test, partial_sum_growth };
enum class Classification { convergent_at, divergent_at, inconclusive };

std::string to_string(RcMethod m);
std::string to_string(Classification c);

struct FitWindow {
  int lo = 0;
  int hi = 0;
};

// Default root-test window for a coefficient set: (n_max / 4, n_max).
FitWindow default_window(int n_max);

struct ConvergenceReport {
  Direction direction;
  double rc_estimate = 0.0;  // 0 when the fit is inconclusive
  RcMethod method = RcMethod::root_test;
  FitWindow window;
  double residual = 0.0;     // RMS of the log-linear fit
  std::size_t used_terms = 0;
  bool fit_conclusive = false;
  Classification classification = Classification::inconclusive;
  double test_radius = 0.0;
};

// Root test along one direction. b_n = sum_m C_{n,m} Ybar_{n,m}(d) is fitted
// as log|b_n| ~ alpha + beta n over the window and rc = R exp(beta). Degrees
// with |b_n| < 1e-300, or below 1e-12 of the Cauchy-Schwarz bound
// sqrt(sum_m C_{n,m}^2) sqrt(2n + 1), count as zero and are skipped; the fit is
// inconclusive when more than half of the window is skipped. The partial sums
// are classified at test_radius (default: the reference radius).
ConvergenceReport estimate_rc_direction(const SHECoefficients& c, const Direction& d,
                                        FitWindow window,
                                        std::optional<double> test_radius = std::nullopt);

struct RcEstimate {
  double rc = 0.0;
  std::vector<ConvergenceReport> reports;  // lattice order
};

// Max of the conclusive per-direction estimates over a Fibonacci lattice of
// `directions` directions. Throws NumericError if every direction is
// inconclusive.
RcEstimate estimate_rc_report(const SHECoefficients& c, std::size_t directions,
                              std::optional<FitWindow> window = std::nullopt,
                              std::optional<double> test_radius = std::nullopt);
double estimate_rc(const SHECoefficients& c, std::size_t directions,
                   std::optional<FitWindow> window = std::nullopt);

struct PartialSumVerdict {
  Classification classification = Classification::inconclusive;
  double radius = 0.0;
  double final_sum = 0.0;     // S_{N_max}
  double max_abs_sum = 0.0;   // max_N |S_N|
  double fluctuation = 0.0;   // max - min of S_N over the last quarter
};

// divergent_at: max_N |S_N| > growth_factor |S_0| and the median |t_n| over the
// last quarter of [0, N_max] exceeds the median over the second quarter.
// convergent_at: the partial sums over the last quarter vary by less than
// tol_converge |S_{N_max}|.
PartialSumVerdict classify_partial_sums(const SHECoefficients& c, double r, const Direction& d,
                                        int N_max, double growth_factor = 1e6,
                                        double tol_converge = 1e-9);

struct DescentConfig {
  int n_max = 400;
  std::size_t directions = 64;
  GravConfig grav;
};

struct DescentReport {
  double brillouin_radius = 0.0;  // R(f), support of the SPMA
  double rc = 0.0;                // estimated convergence radius
  bool rc_inconclusive = false;   // every direction inconclusive: rc taken as 0
  double eps = 0.0;
  bool descends = false;          // rc <= R(f) - eps
  std::vector<ConvergenceReport> reports;
};

// Newton's theorem makes the SPMA's exterior expansion that of its equivalent
// point-mass array, so R_c is estimated from the array's analytic coefficients
// (reference radius R(f)).
DescentReport epsilon_descent_check(const SPMA& spma, double eps, const DescentConfig& cfg = {});

// direction_index,theta,phi,rc_estimate,method,n_lo,n_hi,residual,classification
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);

}  // namespace shelab
