#include <doctest.h>

#include <cmath>
#include <random>

#include <omp.h>

#include "shelab/kernels.hpp"

using namespace shelab;

TEST_CASE("grid sum: OpenMP matches the serial reference") {
  const MidpointGrid grid{{{-1, -1, -1}, {1, 2, 1}}, 40};
  auto f = [](const Vec3& x) { return std::exp(-x.norm2()) * (1.0 + std::sin(3 * x.x)); };
  const double s = kernels::serial::grid_sum(grid, f);
  const double o = kernels::omp::grid_sum(grid, f);
  CHECK(o == doctest::Approx(s).epsilon(1e-14));

  // Slab merge order fixes the result regardless of the thread count.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double o1 = kernels::omp::grid_sum(grid, f);
  omp_set_num_threads(4);
  const double o4 = kernels::omp::grid_sum(grid, f);
  omp_set_num_threads(saved);
  CHECK(o1 == o4);
}

TEST_CASE("grid min/max with a predicate") {
  const MidpointGrid grid{{{-1, -1, -1}, {1, 1, 1}}, 32};
  auto f = [](const Vec3& x) { return x.x + 2 * x.y; };
  auto inside = [](const Vec3& x) { return x.norm() < 0.5; };
  const auto a = kernels::serial::grid_minmax(grid, f, inside);
  const auto b = kernels::omp::grid_minmax(grid, f, inside);
  CHECK(a.min == b.min);
  CHECK(a.max == b.max);
  CHECK(a.count == b.count);
  CHECK(a.count > 0);
}

TEST_CASE("directed Hausdorff distance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<Vec3> a(300), b(200);
  for (auto& p : a) p = {g(rng), g(rng), g(rng)};
  for (auto& p : b) p = {g(rng), g(rng), g(rng)};
  CHECK(kernels::omp::directed_hausdorff(a, b) == kernels::serial::directed_hausdorff(a, b));
  CHECK(kernels::serial::directed_hausdorff(a, a) == 0.0);
  const std::vector<Vec3> p{{0, 0, 0}};
  const std::vector<Vec3> q{{3, 4, 0}};
  CHECK(kernels::serial::directed_hausdorff(p, q) == doctest::Approx(5.0));
}
