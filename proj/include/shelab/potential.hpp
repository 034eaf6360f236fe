#pragma once

#include <span>

#include "shelab/density.hpp"
#include "shelab/geometry.hpp"

namespace shelab {

// Potentials use the positive convention V = G m / r.
struct GravConfig {
  double G = 1.0;
};

// G sum_i m_i / |x - x_i|. Throws NumericError when x coincides with a mass.
double potential_point_masses(std::span<const PointMass> masses, const Vec3& x,
                              const GravConfig& cfg = {});

// Exact potential of a smoothed point-mass by the shell theorem:
// G M(a) / rho outside the support, G [M(rho) / rho + 4 pi int_rho^a t g(t) dt] inside.
double potential_spm(const SmoothedPointMass& spm, const Vec3& x, const GravConfig& cfg = {});

double potential_spma(const SPMA& spma, const Vec3& x, const GravConfig& cfg = {});

// Brute-force G int f(y) / |x - y| dy by midpoint quadrature with `resolution`
// cells per axis over the density's bounding box. Requires x farther than two
// cell widths from every node where the density is nonzero; otherwise throws
// ValidationError. Error is O(h^2) away from the support.
double potential_oracle(const DensityField& density, const Vec3& x, const GravConfig& cfg,
                        std::size_t resolution);

// ||V_1||_{N,1,1} for the unit density on the closed ball of radius N:
// 32 pi^2 G N^5 / 15. Bounds ||V_f - V_g||_{N,1,1} <= D ||f - g||_inf for
// densities supported in that ball.
double potential_lipschitz_constant(double trunc_radius, const GravConfig& cfg = {});

// int over the unit cube centred at 0 of 1 / |y| dy.
double unit_cube_self_integral();

// ||V_f - V_g||_{N,1,1} by nested midpoint quadrature: outer grid with
// eval_resolution cells per axis over the ball of radius N, inner source grid
// with source_resolution cells over the union of the density boxes. Source
// cells that contain the evaluation point use the exact self-cell integral.
double potential_difference_l1(const DensityField& f, const DensityField& g, double trunc_radius,
                               const GravConfig& cfg, std::size_t source_resolution,
                               std::size_t eval_resolution);

}  // namespace shelab
