#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "shelab/geometry.hpp"

namespace shelab {

// Neumaier-compensated accumulator. Order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Adaptive Simpson on [a, b] to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 50);

// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(std::size_t n);

// Tensor midpoint grid: `cells` cells per axis over `box`.
struct MidpointGrid {
  Box box;
  std::size_t cells = 64;

  Vec3 step() const {
    const double n = static_cast<double>(cells);
    return {(box.hi.x - box.lo.x) / n, (box.hi.y - box.lo.y) / n, (box.hi.z - box.lo.z) / n};
  }
  double cell_volume() const {
    const Vec3 h = step();
    return h.x * h.y * h.z;
  }
  double max_step() const {
    const Vec3 h = step();
    return std::max({h.x, h.y, h.z});
  }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const {
    const Vec3 h = step();
    return {box.lo.x + (static_cast<double>(i) + 0.5) * h.x,
            box.lo.y + (static_cast<double>(j) + 0.5) * h.y,
            box.lo.z + (static_cast<double>(k) + 0.5) * h.z};
  }
};

}  // namespace shelab
