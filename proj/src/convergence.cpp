#include "shelab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "shelab/error.hpp"
#include "shelab/quadrature.hpp"

namespace shelab {

std::string to_string(RcMethod m) {
  switch (m) {
    case RcMethod::root_test: return "root_test";
    case RcMethod::ratio_test: return "ratio_test";
    case RcMethod::partial_sum_growth: return "partial_sum_growth";
  }
  return "unknown";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::convergent_at: return "convergent_at";
    case Classification::divergent_at: return "divergent_at";
    case Classification::inconclusive: return "inconclusive";
  }
  return "unknown";
}

FitWindow default_window(int n_max) { return {n_max / 4, n_max}; }

ConvergenceReport estimate_rc_direction(const SHECoefficients& c, const Direction& d,
                                        FitWindow window, std::optional<double> test_radius) {
  require(window.lo >= 0 && window.hi <= c.n_max() && window.lo < window.hi,
          "estimate_rc_direction: window must lie within [0, n_max]");
  require(window.hi - window.lo + 1 >= 8, "estimate_rc_direction: window needs at least 8 degrees");

  ConvergenceReport rep;
  rep.direction = d;
  rep.window = window;
  rep.test_radius = test_radius.value_or(c.ref_radius());

  const auto b = degree_amplitudes(c, d);
  std::vector<double> ns;
  std::vector<double> logs;
  for (int n = window.lo; n <= window.hi; ++n) {
    double norm2 = 0.0;
    for (int m = -n; m <= n; ++m) norm2 += c.at(n, m) * c.at(n, m);
    const double bound = std::sqrt(norm2) * std::sqrt(2.0 * n + 1.0);
    const double mag = std::abs(b[n]);
    if (mag < 1e-300 || mag < 1e-12 * bound) continue;
    ns.push_back(n);
    logs.push_back(std::log(mag));
  }
  rep.used_terms = ns.size();
  const auto span = static_cast<std::size_t>(window.hi - window.lo + 1);
  if (2 * (span - ns.size()) > span || ns.size() < 2) return rep;

  const double count = static_cast<double>(ns.size());
  double mn = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mn += ns[i];
    ml += logs[i];
  }
  mn /= count;
  ml /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxx += (ns[i] - mn) * (ns[i] - mn);
    sxy += (ns[i] - mn) * (logs[i] - ml);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double e = logs[i] - (ml + slope * (ns[i] - mn));
    sse += e * e;
  }
  rep.residual = std::sqrt(sse / count);
  rep.rc_estimate = c.ref_radius() * std::exp(slope);
  rep.fit_conclusive = true;
  rep.classification = classify_partial_sums(c, rep.test_radius, d, c.n_max()).classification;
  return rep;
}

RcEstimate estimate_rc_report(const SHECoefficients& c, std::size_t directions,
                              std::optional<FitWindow> window, std::optional<double> test_radius) {
  require(directions >= 1, "estimate_rc: need at least one direction");
  const FitWindow w = window.value_or(default_window(c.n_max()));
  const auto dirs = fibonacci_directions(directions);
  RcEstimate out;
  out.reports.resize(dirs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(dirs.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.reports[k] = estimate_rc_direction(c, Direction::of(dirs[k]), w, test_radius);
  }
  bool any = false;
  for (const auto& r : out.reports)
    if (r.fit_conclusive) {
      out.rc = any ? std::max(out.rc, r.rc_estimate) : r.rc_estimate;
      any = true;
    }
  if (!any) throw NumericError("estimate_rc: every direction is inconclusive");
  return out;
}

double estimate_rc(const SHECoefficients& c, std::size_t directions,
                   std::optional<FitWindow> window) {
  return estimate_rc_report(c, directions, window).rc;
}

PartialSumVerdict classify_partial_sums(const SHECoefficients& c, double r, const Direction& d,
                                        int N_max, double growth_factor, double tol_converge) {
  require(r > 0.0, "classify_partial_sums: r must be positive");
  require(N_max >= 0 && N_max <= c.n_max(), "classify_partial_sums: N_max must lie in [0, n_max]");
  require(growth_factor > 1.0, "classify_partial_sums: growth factor must exceed 1");

  const auto t = direction_term_sequence(c, d, r);
  std::vector<double> sums(N_max + 1);
  CompensatedSum acc;
  for (int n = 0; n <= N_max; ++n) {
    acc.add(t[n]);
    sums[n] = acc.value();
  }

  PartialSumVerdict v;
  v.radius = r;
  v.final_sum = sums.back();
  for (double s : sums) v.max_abs_sum = std::max(v.max_abs_sum, std::abs(s));

  const int q1 = N_max / 4;
  const int q2 = N_max / 2;
  const int q3 = (3 * N_max) / 4;
  auto median_abs = [&](int lo, int hi) {
    std::vector<double> m;
    for (int n = lo; n <= hi; ++n) m.push_back(std::abs(t[n]));
    std::nth_element(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(m.size() / 2), m.end());
    return m[m.size() / 2];
  };

  const auto [lo_it, hi_it] = std::minmax_element(sums.begin() + q3, sums.end());
  v.fluctuation = *hi_it - *lo_it;

  const bool grew = v.max_abs_sum > growth_factor * std::abs(sums.front());
  const bool rising = q2 > q1 && median_abs(q3, N_max) > median_abs(q1, q2 - 1);
  if (grew && rising) {
    v.classification = Classification::divergent_at;
  } else if (v.fluctuation < tol_converge * std::abs(v.final_sum) ||
             (v.fluctuation == 0.0 && v.final_sum == 0.0)) {
    v.classification = Classification::convergent_at;
  }
  return v;
}

DescentReport epsilon_descent_check(const SPMA& spma, double eps, const DescentConfig& cfg) {
  require(eps > 0.0, "epsilon_descent_check: eps must be positive");
  DescentReport rep;
  rep.eps = eps;
  rep.brillouin_radius = brillouin_radius(spma.support());
  const auto masses = spma.equivalent_point_masses();
  const auto coeffs = coeffs_from_point_masses(masses, rep.brillouin_radius, cfg.n_max, cfg.grav);
  const double test_radius = std::max(rep.brillouin_radius - eps, 1e-12);
  try {
    auto est = estimate_rc_report(coeffs, cfg.directions, std::nullopt, test_radius);
    rep.rc = est.rc;
    rep.reports = std::move(est.reports);
  } catch (const NumericError&) {
    // Every direction has vanishing higher degrees: the exterior field is a
    // pure monopole and the expansion converges everywhere outside the origin.
    rep.rc = 0.0;
    rep.rc_inconclusive = true;
  }
  rep.descends = rep.rc <= rep.brillouin_radius - eps;
  return rep;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "direction_index,theta,phi,rc_estimate,method,n_lo,n_hi,residual,classification\n";
  char buf[256];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%s,%d,%d,%.17g,%s\n", i,
                  r.direction.theta, r.direction.phi, r.rc_estimate, to_string(r.method).c_str(),
                  r.window.lo, r.window.hi, r.residual,
                  r.fit_conclusive ? to_string(r.classification).c_str() : "inconclusive");
    out << buf;
  }
}

}  // namespace shelab
