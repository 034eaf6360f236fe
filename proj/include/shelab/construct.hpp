#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelab/convergence.hpp"
#include "shelab/density.hpp"
#include "shelab/geometry.hpp"

namespace shelab {

struct FillingParams {
  double delta = 0.2;           // metric budget
  double eps = 0.2;             // geometric budget
  std::size_t resolution = 64;  // quadrature cells per axis for measured metrics
  double min_radius = 0.0;      // smallest filling ball; 0 selects h
};

// Support membership, residual mass and variation are judged on the density's
// node lattice: a ball lies inside the support when it contains no zero-valued
// node, and each node carries the cell mass f h^3.
struct Filling {
  std::vector<Ball> filling;    // interior-disjoint balls inside the support
  std::vector<Ball> covering;   // cover of the residual support, extremal cap last
  std::size_t extremal_cap = 0; // index into covering
  double residual_mass = 0.0;   // mass of f outside the filling (condition a1)
  double max_variation = 0.0;   // max node variation over filling balls (a2)
  double support_volume = 0.0;  // |K_f|
  double spacing = 0.0;

  BallRegion region() const;    // filling and covering together (K')
};

// Greedy largest-ball-first filling centred on lattice nodes, then a cover of
// every support node outside the filling cores (radius minus h) by balls of
// radius h, then a cap of radius min(eps / 4, h) at the farthest support node. Throws NumericError naming
// condition a1 or a2 when the budget cannot be met at this resolution.
Filling spherical_filling(const GridDensity& f, const FillingParams& p);

// The same construction without the budget checks; a1 and a2 are left to the
// caller via the measured residual_mass and max_variation.
Filling build_filling(const GridDensity& f, const FillingParams& p);

struct VerificationItem {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ApproximationReport {
  std::vector<VerificationItem> checks;
  bool all_pass() const;
  const VerificationItem& at(const std::string& name) const;
  nlohmann::json to_json() const;
};

struct ApproximationResult {
  SPMA spma;
  Filling filling;
  ApproximationReport report;
};

// SPMA approximation of a grid density: one smoothed point-mass per filling
// and covering ball, centres moved into general position. Throws NumericError
// naming the first failed property.
ApproximationResult spma_approximate(const GridDensity& f, const FillingParams& p);

// The SPMA of a filling, before verification.
SPMA assemble_spma(const GridDensity& f, const Filling& filling);

// Measures p1-p7, the extremal-component conditions and the non-descent
// evidence for an SPMA against f. With a filling, a1-a8 are measured as well.
ApproximationReport verify_approximation(const GridDensity& f, const SPMA& spma,
                                         const FillingParams& p,
                                         const Filling* filling = nullptr);

struct SnowmanParams {
  double gamma = 0.5;
  double m1 = 1.0;
  double m2 = 1.0;
  ProfileKind profile = ProfileKind::quadratic_bump;
};

// Two smoothed point-masses at (+-1, 0, 0) with support radius 1 + gamma.
SPMA build_snowman(const SnowmanParams& p);

// Radius of the circle where the two support spheres meet: sqrt((1+g)^2 - 1).
double snowman_waist_radius(double gamma);

struct SnowmanDescent {
  double gamma = 0.0;
  double waist_radius = 0.0;
  double pointmass_radius = 0.0;   // Brillouin radius of the equivalent array
  double spma_radius = 0.0;        // Brillouin radius of the support
  std::optional<double> rc;        // estimated convergence radius of the array
  bool descends = false;           // waist_radius > pointmass_radius
};

SnowmanDescent snowman_descends_to_topography(const SnowmanParams& p, bool estimate_rc = true,
                                              const DescentConfig& cfg = {});

// Bisection bracket [lo, hi] of the gamma where the waist crosses the
// point-mass Brillouin sphere, narrowed until hi - lo <= tol.
std::pair<double, double> snowman_threshold_bracket(double gamma_lo, double gamma_hi, double tol);

}  // namespace shelab
