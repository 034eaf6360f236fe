// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shelab/cli.hpp"
#include "shelab/construct.hpp"
#include "shelab/convergence.hpp"
#include "shelab/io.hpp"
#include "shelab/potential.hpp"
#include "shelab/quadrature.hpp"
#include "shelab/she.hpp"

using namespace shelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < limit_seconds, "runtime " + num(secs) + " s < " + num(limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v{g(rng), g(rng), g(rng)};
  return v * (1.0 / v.norm());
}

Vec3 rotate(const Vec3& v, double a, double b) {
  // about z by a, then about x by b
  const Vec3 z{std::cos(a) * v.x - std::sin(a) * v.y, std::sin(a) * v.x + std::cos(a) * v.y, v.z};
  return {z.x, std::cos(b) * z.y - std::sin(b) * z.z, std::sin(b) * z.y + std::cos(b) * z.z};
}

Outcome snowman_geometry() {
  Outcome o;
  const auto s = build_snowman({0.5});
  const double R = brillouin_radius(s.support());
  const double Rp = pointmass_brillouin_radius(s.equivalent_point_masses());
  const double waist = snowman_waist_radius(0.5);
  o.require(R == 2.5, "SPMA radius " + num(R) + " == 2.5");
  o.require(Rp == 1.0, "point-mass radius " + num(Rp) + " == 1");
  o.require(std::abs(waist - std::sqrt(1.25)) <= 1e-12, "waist " + format_real(waist) + " = sqrt(5/4) +- 1e-12");

  std::string out;
  const int code = cli({"snowman-scan", "--gamma-min", "0.1", "--gamma-max", "1", "--steps", "10",
                        "--tol", "1e-9"}, &out);
  o.require(code == exit_ok, "snowman-scan exit " + std::to_string(code));
  const auto at = out.find("# threshold gamma in [");
  double lo = NAN, hi = NAN;
  if (at != std::string::npos) std::sscanf(out.c_str() + at, "# threshold gamma in [%lf, %lf]", &lo, &hi);
  const double t = std::sqrt(2.0) - 1.0;
  o.require(lo <= t && t <= hi && hi - lo <= 1e-6,
            "threshold bracket [" + format_real(lo) + ", " + format_real(hi) + "] holds sqrt(2)-1 within 1e-6");
  // Sign of waist - 1 across the bracket.
  o.require(snowman_waist_radius(lo) < 1.0 && snowman_waist_radius(hi) > 1.0 - 1e-15,
            "waist - 1 changes sign across the bracket");
  return o;
}

Outcome snowman_descent() {
  Outcome o;
  const auto s = build_snowman({0.5});
  const auto masses = s.equivalent_point_masses();
  const int N = 400;
  const auto c = coeffs_from_point_masses(masses, 2.5, N);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(1.2, 2.4);
  int points = 0;
  double worst_rel = 0.0;
  int worst_settle = 0;
  bool cauchy_ok = true;
  while (points < 32) {
    const Vec3 x = random_unit(rng) * ur(rng);
    if (distance(x, {1, 0, 0}) <= 1.5 || distance(x, {-1, 0, 0}) <= 1.5) continue;
    ++points;
    const auto t = direction_term_sequence(c, Direction::of(x), x.norm());
    std::vector<double> partial(t.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n) partial[n] = acc += t[n];
    // Cauchy: the first N after which every later partial sum stays within 1e-9 relative.
    const double last = partial.back();
    int settle = N;
    for (int n = N; n >= 0 && std::abs(partial[static_cast<std::size_t>(n)] - last) <= 1e-9 * std::abs(last); --n)
      settle = n;
    cauchy_ok = cauchy_ok && settle < N;
    worst_settle = std::max(worst_settle, settle);
    const double exact = potential_point_masses(masses, x);
    worst_rel = std::max(worst_rel, std::abs(evaluate_partial_sum(c, N, x.norm(), Direction::of(x)) - exact) / exact);
  }
  o.require(cauchy_ok, "Cauchy 1e-9 reached by N = " + std::to_string(worst_settle) + " <= 400 at 32 points");
  o.require(worst_rel < 1e-6, "max relative error vs point-mass potential " + num(worst_rel) + " < 1e-6");
  return o;
}

Outcome single_mass() {
  Outcome o;
  const double G = 1.0;
  const double m = 1.0;
  const std::vector<PointMass> masses{{{0.8, 0, 0}, m}};
  const auto c = coeffs_from_point_masses(masses, 1.0, 400, {G});
  const double rc = estimate_rc(c, 64, FitWindow{50, 200});
  o.require(std::abs(rc - 0.8) <= 0.02 * 0.8, "R_c " + num(rc) + " within 2% of 0.8");
  const auto d = Direction::make(std::numbers::pi / 2, 0.0);
  const auto in = classify_partial_sums(c, 0.7, d, 400);
  o.require(in.classification == Classification::divergent_at, "r = 0.7: " + to_string(in.classification));
  const auto out = classify_partial_sums(c, 0.9, d, 400);
  o.require(out.classification == Classification::convergent_at, "r = 0.9: " + to_string(out.classification));
  const double want = G * m / 0.1;
  const double rel = std::abs(out.final_sum - want) / want;
  o.require(rel < 1e-6, "limit " + format_real(out.final_sum) + " vs Gm/0.1, rel " + num(rel) + " < 1e-6");
  return o;
}

Outcome unit_ball() {
  Outcome o;
  const std::size_t n = 64;
  const double h = 2.2 / static_cast<double>(n - 1);
  const auto grid = GridDensity::sample([](const Vec3& x) { return x.norm() <= 1.0 ? 1.0 : 0.0; },
                                        {-1.1, -1.1, -1.1}, h, n, n, n);
  const fs::path dir = fs::temp_directory_path() / "shelab_acceptance";
  fs::create_directories(dir);
  {
    std::ofstream g(dir / "unit_ball.grid");
    write_grid_density(g, grid);
  }
  const int code = cli({"approximate", "--grid", (dir / "unit_ball.grid").string(), "--delta", "0.2",
                        "--eps", "0.2", "--resolution", "64", "--out", (dir / "unit_ball.spma").string(),
                        "--report", (dir / "report.json").string()});
  const auto report = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  auto measured = [&](const std::string& name) {
    for (const auto& c : report["checks"])
      if (c["name"] == name) return c["measured"].get<double>();
    throw std::runtime_error("report lacks " + name);
  };
  const SPMA spma = load_spma((dir / "unit_ball.spma").string());

  // Independent re-measurements from the written SPMA.
  const double mu1 = lp_metric(as_field(grid), as_field(spma), 1.0, WeightFn::constant(), std::nullopt, {64});
  const double R_f = grid.brillouin_radius();
  const double R_l = brillouin_radius(spma.support());
  o.require(mu1 < 0.2, "mu_1 " + num(mu1) + " < 0.2");
  o.require(std::abs(R_f - R_l) < 0.2, "|R(f) - R(lambda)| " + num(std::abs(R_f - R_l)) + " < 0.2");
  const double hd = measured("p5_boundary_distance");
  o.require(hd < 0.2 + 2 * h, "boundary Hausdorff " + num(hd) + " < 0.2 + 2h");
  const double rc = measured("e_rc_above_descent_radius");
  o.require(rc > R_l - 0.2, "R_c " + num(rc) + " > R(lambda) - 0.2 = " + num(R_l - 0.2));
  // Not part of the criterion: the filling budgets a1/a7 are unattainable for
  // this grid, so the command reports a failed verification.
  std::string note = "approximate exit " + std::to_string(code) + ", a1 residual " +
                     num(measured("a1_residual_mass")) + ", components " + std::to_string(spma.size());
  o.detail += "; " + note;
  return o;
}

Outcome dual_path() {
  Outcome o;
  double worst = 0.0;
  const int n_max = 32;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int count = 1 + static_cast<int>(u(rng) * 10) % 10;
    std::vector<PointMass> masses;
    for (int i = 0; i < count; ++i)
      masses.push_back({random_unit(rng) * (0.95 * std::cbrt(u(rng))), 0.1 + u(rng)});
    const auto a = coeffs_from_point_masses(masses, 1.0, n_max);
    const auto q = coeffs_from_sphere_quadrature(
        [&](const Vec3& x) { return potential_point_masses(masses, x); }, 1.25, 1.0, n_max, 128);
    for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - q.data()[i]));
  }
  o.require(worst <= 1e-10, "max |C_analytic - C_quadrature| " + num(worst) + " <= 1e-10 over 20 arrays");
  return o;
}

Outcome shell_theorem() {
  Outcome o;
  const SmoothedPointMass spm{{0.1, -0.15, 0.05}, RadialProfile::cosine_bump(0.6, 1.7)};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ur(0.7, 2.0);
  bool exact = true;
  double worst = 0.0;
  const SPMA single({spm});
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = spm.center + random_unit(rng) * ur(rng);
    const double rho = distance(x, spm.center);
    const double v = potential_spm(spm, x);
    exact = exact && v == spm.mass() / rho;
    const double oracle = potential_oracle(as_field(single), x, {}, 128);
    worst = std::max(worst, std::abs(oracle - v) / v);
  }
  o.require(exact, "exterior potential == G m / rho bit for bit at 10 points");
  o.require(worst < 1e-4, "brute-force oracle rel. error " + num(worst) + " < 1e-4");

  const double a = 0.9, rho0 = 2.3;
  const SmoothedPointMass ball{{0, 0, 0}, RadialProfile::uniform_ball(a, rho0)};
  double interior = 0.0;
  for (double r : {0.0, 0.2, 0.45, 0.7, 0.89}) {
    const double want = 2.0 * std::numbers::pi * rho0 * (a * a - r * r / 3.0);
    interior = std::max(interior, std::abs(potential_spm(ball, {0, 0, r}) - want) / want);
  }
  o.require(interior < 1e-8, "uniform-ball interior rel. error " + num(interior) + " < 1e-8");
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(99);
  double add = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto y = ynm_bar_all(100, Direction::of(random_unit(rng)));
    for (int n = 0; n <= 100; ++n) {
      double s = 0.0;
      for (int m = -n; m <= n; ++m) s += y[SHECoefficients::index(n, m)] * y[SHECoefficients::index(n, m)];
      add = std::max(add, std::abs(s - (2 * n + 1)) / (2 * n + 1));
    }
  }
  o.require(add <= 1e-11, "addition theorem rel. error " + num(add) + " <= 1e-11 (n <= 100)");

  // Orthonormality by an exact product rule: Gauss-Legendre in cos(theta), uniform in phi.
  const int L = 32;
  const auto gl = gauss_legendre(L + 1);
  const int nphi = 2 * L + 2;
  const std::size_t size = SHECoefficients::size_for(L);
  std::vector<double> gram(size * size, 0.0);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (int j = 0; j < nphi; ++j) {
      const auto y = ynm_bar_all(L, Direction::make(std::acos(gl.nodes[i]), 2 * std::numbers::pi * j / nphi));
      const double w = gl.weights[i] / (2.0 * nphi);
      for (std::size_t a = 0; a < size; ++a) {
        const double wa = w * y[a];
        for (std::size_t b = a; b < size; ++b) gram[a * size + b] += wa * y[b];
      }
    }
  double ortho = 0.0;
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = a; b < size; ++b) ortho = std::max(ortho, std::abs(gram[a * size + b] - (a == b)));
  o.require(ortho <= 1e-12, "orthonormality error " + num(ortho) + " <= 1e-12 (n <= 32)");

  // Superposition: mass-weighted coefficients are additive.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PointMass> A, B;
  for (int i = 0; i < 4; ++i) A.push_back({random_unit(rng) * (0.9 * u(rng)), 0.5 + u(rng)});
  for (int i = 0; i < 3; ++i) B.push_back({random_unit(rng) * (0.9 * u(rng)), 0.5 + u(rng)});
  std::vector<PointMass> AB = A;
  AB.insert(AB.end(), B.begin(), B.end());
  const auto ca = coeffs_from_point_masses(A, 1.0, 60);
  const auto cb = coeffs_from_point_masses(B, 1.0, 60);
  const auto cab = coeffs_from_point_masses(AB, 1.0, 60);
  double lin = 0.0;
  for (std::size_t i = 0; i < cab.data().size(); ++i) {
    const double sum = ca.gm() * ca.data()[i] + cb.gm() * cb.data()[i];
    lin = std::max(lin, std::abs(cab.gm() * cab.data()[i] - sum) / std::max(1.0, std::abs(sum)));
  }
  o.require(lin <= 1e-14, "superposition defect " + num(lin) + " <= 1e-14");

  // Equivariance of R_c under scaling and rotation.
  const std::vector<PointMass> base{{{0.7, 0.1, 0.0}, 1.0}, {{-0.2, 0.4, -0.3}, 0.6}};
  const FitWindow w{50, 200};
  const double rc0 = estimate_rc(coeffs_from_point_masses(base, 1.0, 200), 64, w);
  std::vector<PointMass> scaled = base, rotated = base;
  for (auto& p : scaled) p.position = p.position * 2.0;
  for (auto& p : rotated) p.position = rotate(p.position, 0.7, 1.1);
  const double rcs = estimate_rc(coeffs_from_point_masses(scaled, 2.0, 200), 64, w);
  const double rcr = estimate_rc(coeffs_from_point_masses(rotated, 1.0, 200), 64, w);
  o.require(std::abs(rcs - 2 * rc0) <= 0.02 * 2 * rc0, "scale: R_c " + num(rcs) + " vs 2 x " + num(rc0) + " within 2%");
  o.require(std::abs(rcr - rc0) <= 0.02 * rc0, "rotation: R_c " + num(rcr) + " vs " + num(rc0) + " within 2%");
  return o;
}

}  // namespace

int main() {
  criterion("snowman_geometry_and_threshold", 1.0, snowman_geometry);
  criterion("snowman_series_descends_to_free_space", 30.0, snowman_descent);
  criterion("single_mass_convergence_radius", 5.0, single_mass);
  criterion("unit_ball_spma_instance", 120.0, unit_ball);
  criterion("analytic_vs_quadrature_coefficients", 10.0, dual_path);
  criterion("shell_theorem_oracle", 60.0, shell_theorem);
  criterion("harmonic_property_suites", 30.0, properties);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
