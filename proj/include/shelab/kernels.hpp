#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp. The OpenMP sums are
// formed per z-slab and merged in slab order, so their result does not depend
// on the thread count.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <omp.h>

#include "shelab/geometry.hpp"
#include "shelab/quadrature.hpp"

namespace shelab::kernels {

struct MinMax {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;

  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    ++count;
  }
  void merge(const MinMax& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    count += o.count;
  }
};

namespace serial {

// Compensated sum of f(node) over all grid nodes in (k, j, i) order.
template <class F>
double grid_sum(const MidpointGrid& grid, F&& f) {
  CompensatedSum acc;
  const std::size_t n = grid.cells;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) acc.add(f(grid.node(i, j, k)));
  return acc.value();
}

// Min/max of f(node) over nodes where include(node) holds.
template <class F, class Pred>
MinMax grid_minmax(const MidpointGrid& grid, F&& f, Pred&& include) {
  MinMax mm;
  const std::size_t n = grid.cells;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = grid.node(i, j, k);
        if (include(p)) mm.add(f(p));
      }
  return mm;
}

// sup_{a in A} dist(a, B).
inline double directed_hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  double worst = 0.0;
  for (const Vec3& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b) best = std::min(best, (p - q).norm2());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace serial

namespace omp {

template <class F>
double grid_sum(const MidpointGrid& grid, F&& f) {
  const std::size_t n = grid.cells;
  std::vector<CompensatedSum> slabs(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(n); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    CompensatedSum acc;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) acc.add(f(grid.node(i, j, k)));
    slabs[k] = acc;
  }
  CompensatedSum total;
  for (const auto& s : slabs) total.add(s);
  return total.value();
}

template <class F, class Pred>
MinMax grid_minmax(const MidpointGrid& grid, F&& f, Pred&& include) {
  const std::size_t n = grid.cells;
  std::vector<MinMax> slabs(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(n); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    MinMax mm;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = grid.node(i, j, k);
        if (include(p)) mm.add(f(p));
      }
    slabs[k] = mm;
  }
  MinMax total;
  for (const auto& s : slabs) total.merge(s);
  return total;
}

inline double directed_hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(a.size()); ++ii) {
    const Vec3& p = a[static_cast<std::size_t>(ii)];
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b) best = std::min(best, (p - q).norm2());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace omp

}  // namespace shelab::kernels
