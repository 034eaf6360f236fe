#include "shelab/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <string>

#include "shelab/error.hpp"
#include "shelab/kernels.hpp"

namespace shelab {

double Ball::volume() const { return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius; }

BallRegion::BallRegion(std::vector<Ball> balls) : balls_(std::move(balls)) {
  require(!balls_.empty(), "BallRegion: region must contain at least one ball");
  for (const Ball& b : balls_) {
    require(b.radius > 0.0 && std::isfinite(b.radius), "BallRegion: ball radius must be positive");
    require(b.center.finite(), "BallRegion: ball centre must be finite");
  }
  if (balls_.size() > 16) {
    const Box box = bounds();
    const Vec3 ext = box.hi - box.lo;
    auto index = std::make_shared<BallIndex>(box, std::max({ext.x, ext.y, ext.z}) / 48.0);
    for (std::size_t i = 0; i < balls_.size(); ++i) index->insert(i, balls_[i]);
    index_ = std::move(index);
  }
}

BallIndex::BallIndex(Box box, double cell) : box_(box), cell_(cell) {
  require(cell > 0.0, "BallIndex: cell size must be positive");
  const Vec3 ext = box.hi - box.lo;
  const double e[3] = {ext.x, ext.y, ext.z};
  for (int a = 0; a < 3; ++a)
    n_[a] = static_cast<std::size_t>(std::max(1.0, std::ceil(e[a] / cell)));
  buckets_.resize(n_[0] * n_[1] * n_[2]);
}

void BallIndex::insert(std::size_t id, const Ball& ball) {
  const Box b = ball.bounds();
  const double lo[3] = {b.lo.x - box_.lo.x, b.lo.y - box_.lo.y, b.lo.z - box_.lo.z};
  const double hi[3] = {b.hi.x - box_.lo.x, b.hi.y - box_.lo.y, b.hi.z - box_.lo.z};
  std::size_t i0[3];
  std::size_t i1[3];
  for (int a = 0; a < 3; ++a) {
    const double top = static_cast<double>(n_[a]) - 1.0;
    if (hi[a] < 0.0 || lo[a] > cell_ * static_cast<double>(n_[a])) return;
    i0[a] = static_cast<std::size_t>(std::clamp(std::floor(lo[a] / cell_), 0.0, top));
    i1[a] = static_cast<std::size_t>(std::clamp(std::floor(hi[a] / cell_), 0.0, top));
  }
  for (std::size_t k = i0[2]; k <= i1[2]; ++k)
    for (std::size_t j = i0[1]; j <= i1[1]; ++j)
      for (std::size_t i = i0[0]; i <= i1[0]; ++i) buckets_[bucket(i, j, k)].push_back(id);
}

std::span<const std::size_t> BallIndex::candidates(const Vec3& p) const {
  const Vec3 q = p - box_.lo;
  const double c[3] = {q.x, q.y, q.z};
  std::size_t idx[3];
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor(c[a] / cell_);
    if (!(t >= 0.0) || t >= static_cast<double>(n_[a])) {
      if (c[a] >= 0.0 && c[a] <= cell_ * static_cast<double>(n_[a])) {
        idx[a] = n_[a] - 1;
        continue;
      }
      return {};
    }
    idx[a] = static_cast<std::size_t>(t);
  }
  return buckets_[bucket(idx[0], idx[1], idx[2])];
}

Box BallRegion::bounds() const {
  Box box = balls_.front().bounds();
  for (const Ball& b : balls_) box = box.united(b.bounds());
  return box;
}

bool BallRegion::contains(const Vec3& p) const {
  if (index_) {
    for (std::size_t i : index_->candidates(p))
      if (balls_[i].contains(p)) return true;
    return false;
  }
  return std::any_of(balls_.begin(), balls_.end(), [&](const Ball& b) { return b.contains(p); });
}

double BallRegion::distance_to(const Vec3& p) const {
  if (index_ && contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const Ball& b : balls_) best = std::min(best, distance(p, b.center) - b.radius);
  return std::max(best, 0.0);
}

bool BallRegion::connected() const {
  const std::size_t n = balls_.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto link = [&](std::size_t i, std::size_t j) {
    if (distance(balls_[i].center, balls_[j].center) <= balls_[i].radius + balls_[j].radius)
      parent[find(i)] = find(j);
  };
  if (index_) {
    // Overlapping balls share the bucket holding a point of their overlap.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j : index_->candidates(balls_[i].center))
        if (j != i) link(i, j);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (find(i) != find(j)) link(i, j);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) link(i, j);
  }
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < n; ++i)
    if (find(i) != root) return false;
  return true;
}

double brillouin_radius(const BallRegion& region) {
  double r = 0.0;
  for (const Ball& b : region.balls()) r = std::max(r, b.center.norm() + b.radius);
  return r;
}

double pointmass_brillouin_radius(std::span<const PointMass> masses) {
  require(!masses.empty(), "pointmass_brillouin_radius: empty mass list");
  double r = 0.0;
  for (const PointMass& m : masses) r = std::max(r, m.position.norm());
  return r;
}

double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  require(!a.empty() && !b.empty(), "hausdorff_distance: empty point sample");
  return std::max(kernels::omp::directed_hausdorff(a, b), kernels::omp::directed_hausdorff(b, a));
}

std::vector<Vec3> fibonacci_directions(std::size_t n) {
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return dirs;
}

PointSample boundary_sample(const BallRegion& region, double target_spacing) {
  require(target_spacing > 0.0, "boundary_sample: target_spacing must be positive");
  const auto& balls = region.balls();
  std::unique_ptr<BallIndex> index;
  if (balls.size() > 16) {
    const Box box = region.bounds();
    const Vec3 ext = box.hi - box.lo;
    index = std::make_unique<BallIndex>(box, std::max({ext.x, ext.y, ext.z}) / 48.0);
    for (std::size_t j = 0; j < balls.size(); ++j) index->insert(j, balls[j]);
  }
  PointSample out;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const Ball& b = balls[i];
    const double area = 4.0 * std::numbers::pi * b.radius * b.radius;
    const auto count = static_cast<std::size_t>(
        std::max(4.0, std::ceil(area / (target_spacing * target_spacing))));
    for (const Vec3& d : fibonacci_directions(count)) {
      const Vec3 p = b.center + d * b.radius;
      bool interior = false;
      auto inside_other = [&](std::size_t j) {
        return j != i && distance(p, balls[j].center) < balls[j].radius * (1.0 - 1e-12);
      };
      if (index) {
        for (std::size_t j : index->candidates(p))
          if ((interior = inside_other(j))) break;
      } else {
        for (std::size_t j = 0; j < balls.size() && !interior; ++j) interior = inside_other(j);
      }
      if (!interior) out.push_back(p);
    }
  }
  return out;
}

std::vector<Vec3> general_position_perturb(std::span<const Vec3> centers, double max_shift) {
  require(max_shift > 0.0, "general_position_perturb: max_shift must be positive");
  const std::size_t n = centers.size();
  std::vector<Vec3> out(centers.begin(), centers.end());
  if (n < 2) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = centers[i].norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });

  bool separated = true;
  for (std::size_t r = 1; r < n && separated; ++r)
    separated = norms[order[r]] - norms[order[r - 1]] > 2.0 * max_shift;
  if (separated) return out;

  const double eta = max_shift / static_cast<double>(n + 1);
  const Vec3 fallback{0.0, 0.0, 1.0};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    const Vec3 dir = norms[i] > 0.0 ? centers[i] / norms[i] : fallback;
    out[i] = centers[i] + dir * (static_cast<double>(r + 1) * eta);
  }
  return out;
}

}  // namespace shelab
