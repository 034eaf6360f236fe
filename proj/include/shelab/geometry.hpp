#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace shelab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Axis-aligned box, used for quadrature domains.
struct Box {
  Vec3 lo;
  Vec3 hi;

  Box united(const Box& o) const {
    return {{std::min(lo.x, o.lo.x), std::min(lo.y, o.lo.y), std::min(lo.z, o.lo.z)},
            {std::max(hi.x, o.hi.x), std::max(hi.y, o.hi.y), std::max(hi.z, o.hi.z)}};
  }
  Box intersected(const Box& o) const {
    return {{std::max(lo.x, o.lo.x), std::max(lo.y, o.lo.y), std::max(lo.z, o.lo.z)},
            {std::min(hi.x, o.hi.x), std::min(hi.y, o.hi.y), std::min(hi.z, o.hi.z)}};
  }
  bool empty() const { return !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z); }
  double volume() const {
    return empty() ? 0.0 : (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  }
};

struct Ball {
  Vec3 center;
  double radius = 0.0;

  Box bounds() const {
    const Vec3 r{radius, radius, radius};
    return {center - r, center + r};
  }
  bool contains(const Vec3& p) const { return distance(p, center) <= radius; }
  bool contains_open(const Vec3& p) const { return distance(p, center) < radius; }
  double volume() const;
};

// Uniform bucket grid over a box; each ball is listed in every bucket its
// bounding box meets. Points outside the box see no candidates.
class BallIndex {
 public:
  BallIndex(Box box, double cell);
  void insert(std::size_t id, const Ball& ball);
  std::span<const std::size_t> candidates(const Vec3& p) const;

 private:
  std::size_t bucket(std::size_t i, std::size_t j, std::size_t k) const {
    return i + n_[0] * (j + n_[1] * k);
  }
  Box box_;
  double cell_;
  std::size_t n_[3];
  std::vector<std::vector<std::size_t>> buckets_;
};

// Finite union of closed balls. Never empty; every radius is positive.
class BallRegion {
 public:
  explicit BallRegion(std::vector<Ball> balls);

  const std::vector<Ball>& balls() const { return balls_; }
  std::size_t size() const { return balls_.size(); }
  Box bounds() const;
  bool contains(const Vec3& p) const;
  // Distance from p to the region (0 inside).
  double distance_to(const Vec3& p) const;
  // Whether the overlap graph of the balls is connected.
  bool connected() const;

 private:
  std::vector<Ball> balls_;
  std::shared_ptr<const BallIndex> index_;
};

// A point-mass (position, mass); mass is strictly positive.
struct PointMass {
  Vec3 position;
  double mass = 0.0;
};

using PointSample = std::vector<Vec3>;

// Radius of the smallest origin-centred sphere containing the region.
double brillouin_radius(const BallRegion& region);

// Largest distance of a mass from the origin.
double pointmass_brillouin_radius(std::span<const PointMass> masses);

// Symmetric Hausdorff distance between finite samples.
double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b);

// Quasi-uniform, deterministic sample of the boundary of the union of balls.
// Points are laid on each sphere by a spherical Fibonacci lattice with roughly
// target_spacing between neighbours, and points strictly inside another ball
// are discarded. Sampled Hausdorff distances carry a tolerance of
// 2 * target_spacing.
PointSample boundary_sample(const BallRegion& region, double target_spacing);

// Moves centres radially so that all norms become pairwise distinct.
// Centres are ranked by (norm, input index); the k-th (k = 1..count) moves
// outward by k * max_shift / (count + 1). Inputs whose norms are already
// separated by more than 2 * max_shift are returned unchanged.
std::vector<Vec3> general_position_perturb(std::span<const Vec3> centers, double max_shift);

// n unit vectors on the spherical Fibonacci lattice.
std::vector<Vec3> fibonacci_directions(std::size_t n);

}  // namespace shelab
