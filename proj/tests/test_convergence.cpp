#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "shelab/convergence.hpp"
#include "shelab/error.hpp"

using namespace shelab;

TEST_CASE("root test recovers the radius of a single off-centre mass") {
  const std::vector<PointMass> m{{{0, 0, 0.6}, 1.0}};
  const auto c = coeffs_from_point_masses(m, 1.0, 200);
  const auto rep = estimate_rc_report(c, 32, FitWindow{50, 200});
  CHECK(rep.rc == doctest::Approx(0.6).epsilon(0.02));
  CHECK(rep.reports.size() == 32);
}

TEST_CASE("default window and validation") {
  const auto w = default_window(400);
  CHECK(w.lo == 100);
  CHECK(w.hi == 400);
  const auto c = coeffs_from_point_masses(std::vector<PointMass>{{{0.5, 0, 0}, 1.0}}, 1.0, 40);
  CHECK_THROWS_AS(estimate_rc_direction(c, Direction::make(0.5, 0.5), FitWindow{30, 20}), ValidationError);
  CHECK_THROWS_AS(estimate_rc_direction(c, Direction::make(0.5, 0.5), FitWindow{10, 60}), ValidationError);
}

TEST_CASE("partial-sum classification on both sides of the mass radius") {
  const std::vector<PointMass> m{{{0.8, 0, 0}, 1.0}};
  const auto c = coeffs_from_point_masses(m, 1.0, 400);
  const auto d = Direction::make(std::numbers::pi / 2, 0.0);
  const auto inside = classify_partial_sums(c, 0.7, d, 400);
  CHECK(inside.classification == Classification::divergent_at);
  const auto outside = classify_partial_sums(c, 0.9, d, 400);
  CHECK(outside.classification == Classification::convergent_at);
  CHECK(outside.final_sum == doctest::Approx(1.0 / 0.1).epsilon(1e-6));
}

TEST_CASE("a centred mass is inconclusive everywhere") {
  const auto c = coeffs_from_point_masses(std::vector<PointMass>{{{0, 0, 0}, 1.0}}, 1.0, 40);
  CHECK_THROWS_AS(estimate_rc(c, 8), NumericError);
}

TEST_CASE("descent check of two separated smoothed masses") {
  const SPMA s({{{1, 0, 0}, RadialProfile::quadratic_bump(1.5, 1.0)},
                {{-1, 0, 0}, RadialProfile::quadratic_bump(1.5, 1.0)}});
  DescentConfig cfg;
  cfg.n_max = 200;
  cfg.directions = 16;
  const auto rep = epsilon_descent_check(s, 0.5, cfg);
  CHECK(rep.brillouin_radius == doctest::Approx(2.5));
  CHECK(rep.rc == doctest::Approx(1.0).epsilon(0.03));
  CHECK(rep.descends);
}

TEST_CASE("convergence CSV layout") {
  const auto c = coeffs_from_point_masses(std::vector<PointMass>{{{0, 0.5, 0}, 1.0}}, 1.0, 60);
  const auto rep = estimate_rc_report(c, 4);
  std::ostringstream out;
  write_convergence_csv(out, rep.reports);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "direction_index,theta,phi,rc_estimate,method,n_lo,n_hi,residual,classification");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}
