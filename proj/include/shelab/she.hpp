#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "shelab/geometry.hpp"
#include "shelab/potential.hpp"

namespace shelab {

// Colatitude theta in [0, pi], longitude phi in [0, 2 pi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  static Direction make(double theta, double phi);
  static Direction of(const Vec3& v);
  Vec3 unit() const;
};

// Legendre polynomial P_n(x) by the three-term recurrence.
double legendre_p(int n, double x);

// Fully normalized associated Legendre functions Pbar_{n,m}(cos theta) for
// 0 <= m <= n <= n_max (4 pi normalization, no Condon-Shortley phase).
// Standard forward-column recurrence; seeds carry a 1e280 scale so sectoral
// terms survive to high degree near the poles.
class AssociatedLegendre {
 public:
  explicit AssociatedLegendre(int n_max);

  void compute(double theta);
  int n_max() const { return n_max_; }
  double operator()(int n, int m) const { return values_[offset(n) + static_cast<std::size_t>(m)]; }

 private:
  static std::size_t offset(int n) { return static_cast<std::size_t>(n) * (n + 1) / 2; }

  int n_max_;
  std::vector<double> a_;  // recurrence factors, triangular
  std::vector<double> b_;
  std::vector<double> values_;
};

// Real 4 pi-normalized harmonic: Pbar_{n,m} cos(m phi) for m >= 0,
// Pbar_{n,|m|} sin(|m| phi) for m < 0. Mean square over the sphere is 1.
double ynm_bar(int n, int m, const Direction& d);

// All Ybar_{n,m}(d) for n <= n_max, laid out like SHECoefficients.
std::vector<double> ynm_bar_all(int n_max, const Direction& d);

// Mass-normalized exterior expansion
//   V(r, d) = (GM / R) sum_n (R / r)^{n+1} sum_m C_{n,m} Ybar_{n,m}(d).
class SHECoefficients {
 public:
  SHECoefficients(double ref_radius, double gm, int n_max);

  static std::size_t index(int n, int m) {
    return static_cast<std::size_t>(n * n + n + m);
  }
  static std::size_t size_for(int n_max) {
    return static_cast<std::size_t>((n_max + 1) * (n_max + 1));
  }

  double ref_radius() const { return R_; }
  double gm() const { return gm_; }
  int n_max() const { return n_max_; }
  double& at(int n, int m) { return c_[index(n, m)]; }
  double at(int n, int m) const { return c_[index(n, m)]; }
  const std::vector<double>& data() const { return c_; }

 private:
  double R_;
  double gm_;
  int n_max_;
  std::vector<double> c_;
};

// Analytic coefficients of a point-mass array through the addition theorem:
// C_{n,m} = sum_i m_i (|x_i| / R)^n Ybar_{n,m}(x_i) / (M (2n + 1)).
SHECoefficients coeffs_from_point_masses(std::span<const PointMass> masses, double ref_radius,
                                         int n_max, const GravConfig& cfg = {});

// Coefficients recovered from the potential on the sphere of radius
// quad_radius: Gauss-Legendre in cos(theta) with quad_degree + 1 nodes and a
// uniform longitude grid with 2 quad_degree + 2 nodes (quad_degree defaults to
// n_max; larger values suppress aliasing from degrees above n_max). GM is taken
// from the monopole; a vanishing monopole gives GM = 1 and C_{0,0} = 0.
SHECoefficients coeffs_from_sphere_quadrature(const std::function<double(const Vec3&)>& potential,
                                              double quad_radius, double ref_radius, int n_max,
                                              int quad_degree = -1);

// b_n = sum_m C_{n,m} Ybar_{n,m}(d) for n = 0..n_max.
std::vector<double> degree_amplitudes(const SHECoefficients& c, const Direction& d);

// t_n = (GM / R) (R / r)^{n+1} b_n for n = 0..n_max.
std::vector<double> direction_term_sequence(const SHECoefficients& c, const Direction& d,
                                            double r);

// SHE_N: compensated sum of t_0..t_N.
double evaluate_partial_sum(const SHECoefficients& c, int N, double r, const Direction& d);

// CSV with metadata line "# R=<R> GM=<GM> n_max=<n>", header "n,m,C" and rows
// in (n asc, m asc) order. Rows with |C| <= drop_below are omitted
// (drop_below < 0 keeps everything).
void write_coefficients_csv(std::ostream& out, const SHECoefficients& c, double drop_below = -1.0);
SHECoefficients read_coefficients_csv(std::istream& in);

}  // namespace shelab
