#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shelab/geometry.hpp"

namespace shelab {

enum class ProfileKind { quadratic_bump, cosine_bump, constant_taper, table };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

// Radial mass profile g on [0, a], extended by zero outside.
//
//   quadratic_bump   g(s) = c (1 - (s/a)^2)
//   cosine_bump      g(s) = c (1 + cos(pi s / a)) / 2
//   constant_taper   g(s) = c for s <= b, linear down to 0 at a
//   table            piecewise-linear through (s_k, v_k); s_0 = 0, last s = a,
//                    last value 0. A repeated radius encodes a step, which is
//                    how the uniform ball (the discontinuous limit case) is
//                    represented.
//
// Closed forms are used for the radial moments of the named families; tables
// are integrated by adaptive Simpson segment by segment.
class RadialProfile {
 public:
  static RadialProfile quadratic_bump(double outer_radius, double amplitude);
  static RadialProfile cosine_bump(double outer_radius, double amplitude);
  static RadialProfile constant_taper(double outer_radius, double amplitude, double inner_radius);
  static RadialProfile table(std::vector<double> radii, std::vector<double> values);
  static RadialProfile uniform_ball(double outer_radius, double density);

  ProfileKind kind() const { return kind_; }
  double outer_radius() const { return a_; }
  double amplitude() const { return c_; }
  double inner_radius() const { return b_; }
  const std::vector<double>& table_radii() const { return radii_; }
  const std::vector<double>& table_values() const { return values_; }

  double operator()(double s) const;
  // Maximum of g over [0, a].
  double peak() const;

  // 4 pi int_0^s t^2 g(t) dt, s clamped to [0, a].
  double enclosed_mass(double s) const;
  // 4 pi int_s^a t g(t) dt, s clamped to [0, a].
  double outer_moment(double s) const;
  double total_mass() const { return enclosed_mass(a_); }

  // Same shape, values multiplied by factor > 0.
  RadialProfile scaled(double factor) const;

 private:
  RadialProfile() = default;
  double table_integral(double lo, double hi, int power) const;

  ProfileKind kind_ = ProfileKind::quadratic_bump;
  double a_ = 1.0;
  double c_ = 0.0;
  double b_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> values_;
};

// An r-smoothing of a point-mass: radially symmetric about the centre,
// supported on the closed ball of the profile's outer radius.
struct SmoothedPointMass {
  Vec3 center;
  RadialProfile profile;

  double mass() const { return profile.total_mass(); }
  Ball support() const { return {center, profile.outer_radius()}; }
  double operator()(const Vec3& x) const { return profile(distance(x, center)); }
};

class SPMA {
 public:
  explicit SPMA(std::vector<SmoothedPointMass> components);

  const std::vector<SmoothedPointMass>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  BallRegion support() const;
  std::vector<PointMass> equivalent_point_masses() const;
  Box bounds() const;
  // Sum of the components at x.
  double density(const Vec3& x) const;

 private:
  std::vector<SmoothedPointMass> components_;
  std::shared_ptr<const BallIndex> index_;  // built for large arrays
};

// Non-negative density sampled on a regular lattice, trilinear in between.
// Node (i, j, k) sits at origin + h (i, j, k); values are stored x-fastest.
class GridDensity {
 public:
  GridDensity(Vec3 origin, double spacing, std::size_t nx, std::size_t ny, std::size_t nz,
              std::vector<double> values);

  // Samples fn at the nodes of the lattice.
  static GridDensity sample(const std::function<double(const Vec3&)>& fn, Vec3 origin,
                            double spacing, std::size_t nx, std::size_t ny, std::size_t nz);

  const Vec3& origin() const { return origin_; }
  double spacing() const { return h_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + nx_ * (j + ny_ * k);
  }
  Vec3 node(std::size_t idx) const;
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[index(i, j, k)]; }
  Box bounds() const;

  double operator()(const Vec3& x) const;
  // Indices of nodes with positive value.
  std::vector<std::size_t> support_nodes() const;
  // Largest norm over positive nodes.
  double brillouin_radius() const;
  // Support nodes with a 6-neighbour that is zero or off the lattice.
  PointSample boundary_nodes() const;

 private:
  Vec3 origin_;
  double h_;
  std::size_t nx_, ny_, nz_;
  std::vector<double> values_;
};

// Positive weight function w(x).
class WeightFn {
 public:
  static WeightFn constant(double value = 1.0);
  static WeightFn gaussian(double amplitude, double sigma);
  // w(x) = sum_k coeffs[k] |x|^k, all coefficients non-negative, coeffs[0] > 0.
  static WeightFn radial_polynomial(std::vector<double> coeffs);

  double operator()(const Vec3& x) const { return fn_(x); }
  bool is_unit() const { return unit_; }

 private:
  explicit WeightFn(std::function<double(const Vec3&)> fn, bool unit = false)
      : fn_(std::move(fn)), unit_(unit) {}
  std::function<double(const Vec3&)> fn_;
  bool unit_ = false;
};

// Type-erased density: evaluation rule plus a box containing its support.
class DensityField {
 public:
  DensityField(std::function<double(const Vec3&)> fn, Box bounds)
      : fn_(std::move(fn)), bounds_(bounds) {}

  double operator()(const Vec3& x) const { return fn_(x); }
  const Box& bounds() const { return bounds_; }

 private:
  std::function<double(const Vec3&)> fn_;
  Box bounds_;
};

DensityField as_field(const SPMA& spma);
DensityField as_field(const GridDensity& grid);
DensityField as_field(const SmoothedPointMass& spm);
DensityField zero_field();

double evaluate(const SPMA& spma, const Vec3& x);
double evaluate(const GridDensity& grid, const Vec3& x);

double total_mass(const SPMA& spma);
double total_mass(const GridDensity& grid);

struct QuadratureConfig {
  std::size_t resolution = 64;  // midpoint cells per axis
};

// Weighted L^p distance mu_{p,w}(f, g) by midpoint quadrature over the union
// of the bounding boxes, restricted to the closed ball of radius trunc_radius
// about the origin when given. p = infinity returns the unweighted sup over
// the quadrature nodes.
double lp_metric(const DensityField& f, const DensityField& g, double p, const WeightFn& w,
                 std::optional<double> trunc_radius = std::nullopt,
                 const QuadratureConfig& cfg = {});

// max - min of f over quadrature nodes inside the ball.
double var_over(const DensityField& f, const Ball& ball, const QuadratureConfig& cfg = {});
// Average of f over quadrature nodes inside the ball.
double mean_over(const DensityField& f, const Ball& ball, const QuadratureConfig& cfg = {});

}  // namespace shelab
