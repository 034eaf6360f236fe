#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "shelab/error.hpp"
#include "shelab/quadrature.hpp"
#include "shelab/she.hpp"

using namespace shelab;

namespace {

// Independent associated Legendre via the explicit derivative formula of P_n,
// for small degrees only.
double factorial(int n) { return std::tgamma(n + 1.0); }

double plm_direct(int n, int m, double x) {
  // P_n^m(x) = (1 - x^2)^{m/2} d^m/dx^m P_n(x), P_n from Rodrigues' expansion.
  double sum = 0.0;
  for (int k = 0; 2 * k <= n - m; ++k) {
    const double c = std::pow(-1.0, k) * factorial(2 * n - 2 * k) /
                     (factorial(k) * factorial(n - k) * factorial(n - 2 * k - m) * std::pow(2.0, n));
    sum += c * std::pow(x, n - 2 * k - m);
  }
  return std::pow(1.0 - x * x, 0.5 * m) * sum;
}

double pbar_direct(int n, int m, double x) {
  const double norm = std::sqrt((m == 0 ? 1.0 : 2.0) * (2 * n + 1) * factorial(n - m) / factorial(n + m));
  return norm * plm_direct(n, m, x);
}

}  // namespace

TEST_CASE("Legendre polynomials") {
  CHECK(legendre_p(0, 0.3) == 1.0);
  CHECK(legendre_p(1, 0.3) == doctest::Approx(0.3));
  CHECK(legendre_p(2, 0.3) == doctest::Approx(1.5 * 0.09 - 0.5));
  CHECK(legendre_p(5, 1.0) == doctest::Approx(1.0));
  CHECK(legendre_p(7, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("normalized associated Legendre against the explicit formula") {
  AssociatedLegendre alf(10);
  for (double theta : {0.2, 1.0, 2.4}) {
    alf.compute(theta);
    for (int n = 0; n <= 10; ++n)
      for (int m = 0; m <= n; ++m)
        CHECK(alf(n, m) == doctest::Approx(pbar_direct(n, m, std::cos(theta))).epsilon(1e-11));
  }
}

TEST_CASE("harmonics are orthonormal under the 4 pi mean") {
  const int n_max = 12;
  const auto gl = gauss_legendre(n_max + 2);
  const int nphi = 2 * n_max + 4;
  const std::size_t size = SHECoefficients::size_for(n_max);
  std::vector<double> gram(size * size, 0.0);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (int j = 0; j < nphi; ++j) {
      const auto y = ynm_bar_all(n_max, Direction::make(std::acos(gl.nodes[i]), 2.0 * std::numbers::pi * j / nphi));
      const double w = gl.weights[i] / (2.0 * nphi);
      for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b) gram[a * size + b] += w * y[a] * y[b];
    }
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b)
      REQUIRE(gram[a * size + b] == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("addition theorem") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d1 = Direction::make(std::acos(2 * u(rng) - 1), 2 * std::numbers::pi * u(rng));
    const auto d2 = Direction::make(std::acos(2 * u(rng) - 1), 2 * std::numbers::pi * u(rng));
    const double cosg = d1.unit().dot(d2.unit());
    const auto y1 = ynm_bar_all(60, d1);
    const auto y2 = ynm_bar_all(60, d2);
    for (int n = 0; n <= 60; ++n) {
      double s = 0.0;
      for (int m = -n; m <= n; ++m) s += y1[SHECoefficients::index(n, m)] * y2[SHECoefficients::index(n, m)];
      CHECK(s / (2 * n + 1) == doctest::Approx(legendre_p(n, cosg)).scale(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("partial sums of a point-mass array reproduce its potential") {
  const std::vector<PointMass> m{{{0.3, 0.1, -0.2}, 1.0}, {{-0.4, 0.2, 0.1}, 2.0}};
  const auto c = coeffs_from_point_masses(m, 1.0, 120);
  CHECK(c.gm() == doctest::Approx(3.0));
  CHECK(c.at(0, 0) == doctest::Approx(1.0));
  const Vec3 x{1.3, -0.7, 0.9};
  const auto d = Direction::of(x);
  CHECK(evaluate_partial_sum(c, 120, x.norm(), d) == doctest::Approx(potential_point_masses(m, x)).epsilon(1e-12));
}

TEST_CASE("analytic and quadrature coefficients agree") {
  const std::vector<PointMass> m{{{0.5, 0.0, 0.2}, 1.0}, {{-0.1, -0.6, 0.3}, 0.5}, {{0, 0.2, -0.7}, 0.25}};
  const int n_max = 16;
  const auto a = coeffs_from_point_masses(m, 1.0, n_max);
  const auto q = coeffs_from_sphere_quadrature(
      [&](const Vec3& x) { return potential_point_masses(m, x); }, 1.25, 1.0, n_max, 4 * n_max);
  CHECK(q.gm() == doctest::Approx(a.gm()).epsilon(1e-12));
  for (std::size_t i = 0; i < a.data().size(); ++i)
    CHECK(q.data()[i] == doctest::Approx(a.data()[i]).scale(1.0).epsilon(1e-10));
}

TEST_CASE("coefficient CSV round trip and errors") {
  const std::vector<PointMass> m{{{0.2, 0.3, 0.4}, 1.0}};
  const auto c = coeffs_from_point_masses(m, 1.5, 8);
  std::stringstream ss;
  write_coefficients_csv(ss, c);
  const auto back = read_coefficients_csv(ss);
  CHECK(back.n_max() == 8);
  CHECK(back.ref_radius() == 1.5);
  CHECK(back.data() == c.data());

  std::stringstream bad("# R=1 GM=1 n_max=2\nn,m,C\n3,0,1.0\n");
  CHECK_THROWS_AS(read_coefficients_csv(bad), ValidationError);
  CHECK_THROWS_AS(coeffs_from_point_masses(m, 0.0, 4), ValidationError);
  CHECK_THROWS_AS(coeffs_from_point_masses(m, 1.0, -1), ValidationError);
}

TEST_CASE("a mass at the origin has only a monopole") {
  const std::vector<PointMass> m{{{0, 0, 0}, 2.0}};
  const auto c = coeffs_from_point_masses(m, 1.0, 10);
  for (int n = 1; n <= 10; ++n)
    for (int m2 = -n; m2 <= n; ++m2) CHECK(c.at(n, m2) == 0.0);
}
