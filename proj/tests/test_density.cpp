#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "shelab/density.hpp"
#include "shelab/error.hpp"

using namespace shelab;

namespace {

// Composite Simpson with n (even) panels; independent of the library's quadrature.
double simpson(const std::function<double(double)>& g, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

double shell_mass(const RadialProfile& p, double s) {
  return 4.0 * std::numbers::pi * simpson([&](double t) { return t * t * p(t); }, 0.0, s);
}

double outer_moment(const RadialProfile& p, double s) {
  return 4.0 * std::numbers::pi * simpson([&](double t) { return t * p(t); }, s, p.outer_radius());
}

}  // namespace

TEST_CASE("profile families vanish at the outer radius") {
  for (const auto& p : {RadialProfile::quadratic_bump(0.7, 2.0), RadialProfile::cosine_bump(1.3, 0.5),
                        RadialProfile::constant_taper(1.0, 3.0, 0.4),
                        RadialProfile::table({0, 0.5, 1.0}, {1.0, 2.0, 0.0})}) {
    CHECK(p(p.outer_radius()) == 0.0);
    CHECK(p(p.outer_radius() * 1.5) == 0.0);
    CHECK(p(0.0) > 0.0);
  }
}

TEST_CASE("closed-form masses match radial integration") {
  const double pi = std::numbers::pi;
  const auto q = RadialProfile::quadratic_bump(0.7, 2.0);
  CHECK(q.total_mass() == doctest::Approx(8.0 * pi * 2.0 * std::pow(0.7, 3) / 15.0).epsilon(1e-14));
  const auto c = RadialProfile::cosine_bump(1.3, 0.5);
  const double a3 = std::pow(1.3, 3);
  CHECK(c.total_mass() == doctest::Approx(4.0 * pi * 0.5 * (a3 / 6.0 - a3 / (pi * pi))).epsilon(1e-13));
  const auto u = RadialProfile::uniform_ball(0.9, 2.5);
  CHECK(u.total_mass() == doctest::Approx(4.0 / 3.0 * pi * std::pow(0.9, 3) * 2.5).epsilon(1e-12));

  for (const auto& p : {q, c, RadialProfile::constant_taper(1.0, 3.0, 0.4),
                        RadialProfile::table({0, 0.2, 0.5, 1.0}, {1.0, 2.0, 0.5, 0.0})}) {
    for (double frac : {0.0, 0.25, 0.5, 0.8, 1.0}) {
      const double s = frac * p.outer_radius();
      CHECK(p.enclosed_mass(s) == doctest::Approx(shell_mass(p, s)).epsilon(1e-9));
      CHECK(p.outer_moment(s) == doctest::Approx(outer_moment(p, s)).epsilon(1e-9));
    }
  }
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(RadialProfile::quadratic_bump(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(RadialProfile::quadratic_bump(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(RadialProfile::constant_taper(1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(RadialProfile::table({0.1, 1.0}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(RadialProfile::table({0.0, 1.0}, {1.0, 0.5}), ValidationError);
  CHECK_THROWS_AS(RadialProfile::table({0.0, 0.6, 0.5, 1.0}, {1, 1, 1, 0}), ValidationError);
  CHECK_THROWS_AS(profile_kind_from_string("gaussian"), ValidationError);
  CHECK(profile_kind_from_string(to_string(ProfileKind::constant_taper)) == ProfileKind::constant_taper);
}

TEST_CASE("scaling multiplies values and mass") {
  const auto p = RadialProfile::cosine_bump(1.0, 1.0);
  const auto s = p.scaled(3.0);
  CHECK(s(0.3) == doctest::Approx(3.0 * p(0.3)));
  CHECK(s.total_mass() == doctest::Approx(3.0 * p.total_mass()));
}

TEST_CASE("SPMA mass is the sum of component masses") {
  const SPMA s({{{1, 0, 0}, RadialProfile::quadratic_bump(0.5, 1.0)},
                {{-1, 0, 0}, RadialProfile::cosine_bump(0.7, 2.0)}});
  CHECK(total_mass(s) == doctest::Approx(s.components()[0].mass() + s.components()[1].mass()));
  const auto pm = s.equivalent_point_masses();
  REQUIRE(pm.size() == 2);
  CHECK(pm[1].mass == doctest::Approx(s.components()[1].mass()));
  CHECK(brillouin_radius(s.support()) == doctest::Approx(1.7));
}

TEST_CASE("indexed SPMA evaluation matches the plain sum") {
  std::vector<SmoothedPointMass> comps;
  for (int i = 0; i < 40; ++i)
    comps.push_back({{0.1 * i, std::sin(i), std::cos(i)}, RadialProfile::quadratic_bump(0.3 + 0.01 * i, 1.0 + i)});
  const SPMA s(comps);
  for (int t = 0; t < 500; ++t) {
    const Vec3 x{0.01 * t - 1.0, std::sin(0.37 * t), std::cos(0.11 * t)};
    double plain = 0.0;
    for (const auto& c : comps) plain += c(x);
    REQUIRE(s.density(x) == doctest::Approx(plain).epsilon(1e-14));
  }
}

TEST_CASE("grid density: trilinear interpolation and support") {
  auto lin = [](const Vec3& x) { return 2.0 + x.x - 0.5 * x.y + 0.25 * x.z; };
  const auto g = GridDensity::sample(lin, {-1, -1, -1}, 0.25, 9, 9, 9);
  CHECK(g({0.13, -0.41, 0.77}) == doctest::Approx(lin({0.13, -0.41, 0.77})).epsilon(1e-14));
  CHECK(g({1.5, 0, 0}) == 0.0);
  CHECK(total_mass(g) == doctest::Approx(lin({0, 0, 0}) * 729 * std::pow(0.25, 3)));
  CHECK(g.brillouin_radius() == doctest::Approx(std::sqrt(3.0)));
  CHECK(g.boundary_nodes().size() == 729 - 343);

  std::vector<double> v(27, 0.0);
  v[0] = 1.0;
  v[26] = 1.0;
  CHECK_THROWS_AS(GridDensity({0, 0, 0}, 1.0, 3, 3, 3, v), ValidationError);
  v[26] = -1.0;
  CHECK_THROWS_AS(GridDensity({0, 0, 0}, 1.0, 3, 3, 3, v), ValidationError);
  CHECK_THROWS_AS(GridDensity({0, 0, 0}, 1.0, 3, 3, 3, std::vector<double>(27, 0.0)), ValidationError);
}

TEST_CASE("weighted L^p metric") {
  const Box box{{0, 0, 0}, {1, 1, 1}};
  const DensityField one([](const Vec3&) { return 1.0; }, box);
  const DensityField three([](const Vec3&) { return 3.0; }, box);
  CHECK(lp_metric(one, three, 1.0, WeightFn::constant()) == doctest::Approx(2.0));
  CHECK(lp_metric(one, three, 2.0, WeightFn::constant(4.0)) == doctest::Approx(4.0));
  CHECK(lp_metric(one, three, INFINITY, WeightFn::constant(9.0)) == doctest::Approx(2.0));
  CHECK(lp_metric(one, one, 1.0, WeightFn::gaussian(1.0, 0.5)) == 0.0);
  CHECK_THROWS_AS(lp_metric(one, three, 0.5, WeightFn::constant()), ValidationError);

  // |x| weight on the unit cube: int (1 + |x|) over [0,1]^3 = 1 + 0.96059196...
  const double w = lp_metric(one, zero_field(), 1.0, WeightFn::radial_polynomial({1.0, 1.0}), std::nullopt, {128});
  CHECK(w == doctest::Approx(1.9605919564).epsilon(1e-4));
}

TEST_CASE("variation and mean over a ball") {
  const DensityField lin([](const Vec3& x) { return x.x; }, {{-2, -2, -2}, {2, 2, 2}});
  const Ball b{{0.5, 0, 0}, 1.0};
  CHECK(mean_over(lin, b, {64}) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(var_over(lin, b, {64}) == doctest::Approx(2.0).epsilon(0.05));
}
