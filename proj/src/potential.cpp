#include "shelab/potential.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "shelab/error.hpp"
#include "shelab/kernels.hpp"
#include "shelab/quadrature.hpp"

namespace shelab {

// 3 ln(2 + sqrt 3) - pi / 2
double unit_cube_self_integral() {
  return 3.0 * std::log(2.0 + std::numbers::sqrt3) - std::numbers::pi / 2.0;
}

double potential_point_masses(std::span<const PointMass> masses, const Vec3& x,
                              const GravConfig& cfg) {
  CompensatedSum acc;
  for (const PointMass& m : masses) {
    const double r = distance(x, m.position);
    if (r == 0.0) throw NumericError("potential_point_masses: evaluation at a mass position");
    acc.add(m.mass / r);
  }
  return cfg.G * acc.value();
}

double potential_spm(const SmoothedPointMass& spm, const Vec3& x, const GravConfig& cfg) {
  const RadialProfile& g = spm.profile;
  const double a = g.outer_radius();
  const double rho = distance(x, spm.center);
  if (rho >= a) return cfg.G * g.total_mass() / rho;
  const double inner = rho > 0.0 ? g.enclosed_mass(rho) / rho : 0.0;
  return cfg.G * (inner + g.outer_moment(rho));
}

double potential_spma(const SPMA& spma, const Vec3& x, const GravConfig& cfg) {
  CompensatedSum acc;
  for (const auto& c : spma.components()) acc.add(potential_spm(c, x, cfg));
  return acc.value();
}

double potential_oracle(const DensityField& density, const Vec3& x, const GravConfig& cfg,
                        std::size_t resolution) {
  require(resolution >= 1, "potential_oracle: resolution must be positive");
  const Box box = density.bounds();
  if (box.empty()) return 0.0;
  const MidpointGrid grid{box, resolution};
  const double guard = 2.0 * grid.max_step();

  const auto closest = kernels::omp::grid_minmax(
      grid, [&](const Vec3& y) { return distance(x, y); },
      [&](const Vec3& y) { return density(y) != 0.0; });
  if (closest.count == 0) return 0.0;
  if (closest.min <= guard)
    throw ValidationError("potential_oracle: evaluation point within two cells of the support");

  const double sum = kernels::omp::grid_sum(grid, [&](const Vec3& y) {
    const double f = density(y);
    return f == 0.0 ? 0.0 : f / distance(x, y);
  });
  return cfg.G * sum * grid.cell_volume();
}

double potential_lipschitz_constant(double trunc_radius, const GravConfig& cfg) {
  require(trunc_radius > 0.0, "potential_lipschitz_constant: radius must be positive");
  return 32.0 * std::numbers::pi * std::numbers::pi * cfg.G * std::pow(trunc_radius, 5) / 15.0;
}

double potential_difference_l1(const DensityField& f, const DensityField& g, double trunc_radius,
                               const GravConfig& cfg, std::size_t source_resolution,
                               std::size_t eval_resolution) {
  require(trunc_radius > 0.0, "potential_difference_l1: radius must be positive");
  Box src_box = f.bounds().united(g.bounds());
  const MidpointGrid src{src_box, source_resolution};
  const Vec3 h = src.step();
  const double cell = src.cell_volume();
  // Self-cell integral of 1/|y| over an h.x * h.y * h.z box, approximated by
  // the cube of equal volume.
  const double self = unit_cube_self_integral() * std::cbrt(cell) * std::cbrt(cell);

  std::vector<Vec3> nodes;
  std::vector<double> diff;
  const std::size_t n = src.cells;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 y = src.node(i, j, k);
        const double d = f(y) - g(y);
        if (d != 0.0) {
          nodes.push_back(y);
          diff.push_back(d);
        }
      }

  const double N = trunc_radius;
  const MidpointGrid eval{Box{{-N, -N, -N}, {N, N, N}}, eval_resolution};
  const double sum = kernels::omp::grid_sum(eval, [&](const Vec3& x) {
    if (x.norm() > N) return 0.0;
    CompensatedSum v;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      const Vec3 r = x - nodes[s];
      if (std::abs(r.x) < 0.5 * h.x && std::abs(r.y) < 0.5 * h.y && std::abs(r.z) < 0.5 * h.z)
        v.add(diff[s] * self);
      else
        v.add(diff[s] * cell / r.norm());
    }
    return std::abs(cfg.G * v.value());
  });
  return sum * eval.cell_volume();
}

}  // namespace shelab
