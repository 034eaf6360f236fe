#include "shelab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "shelab/construct.hpp"
#include "shelab/convergence.hpp"
#include "shelab/error.hpp"
#include "shelab/io.hpp"
#include "shelab/potential.hpp"
#include "shelab/she.hpp"

namespace shelab {

namespace {

// Either the named file or the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ValidationError("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::string flag(bool b) { return b ? "true" : "false"; }

// Source model for coeffs / rc / potential: an SPMA or a point-mass array.
struct ModelOptions {
  std::string spma_file;
  std::string masses_file;
  double gamma = 0.0;  // > 0 selects the equal-mass quadratic snowman

  void add(CLI::App* cmd, bool with_snowman) {
    auto* s = cmd->add_option("--spma", spma_file, "SPMA file");
    auto* m = cmd->add_option("--masses", masses_file, "point-mass file (x y z m per line)");
    s->excludes(m);
    if (with_snowman)
      cmd->add_option("--gamma", gamma, "use the two-ball snowman with this gamma")
          ->check(CLI::PositiveNumber)
          ->excludes(s)
          ->excludes(m);
  }

  std::optional<SPMA> spma() const {
    if (gamma > 0.0) return build_snowman({gamma, 1.0, 1.0});
    if (!spma_file.empty()) return load_spma(spma_file);
    return std::nullopt;
  }

  std::vector<PointMass> masses(const std::optional<SPMA>& s) const {
    if (s) return s->equivalent_point_masses();
    if (masses_file.empty()) throw ValidationError("one of --spma, --masses or --gamma is required");
    return load_point_masses(masses_file);
  }
};

// Reference radius: the Brillouin radius of the model unless given.
double reference_radius(double requested, const std::optional<SPMA>& s,
                        const std::vector<PointMass>& masses) {
  if (requested > 0.0) return requested;
  const double r = s ? brillouin_radius(s->support()) : pointmass_brillouin_radius(masses);
  return r > 0.0 ? r : 1.0;
}

struct CoeffsCmd {
  ModelOptions model;
  int n_max = 64;
  double radius = 0.0;
  double drop_below = -1.0;
  std::string out_path;
  std::string dual_path;
  double quad_radius = 0.0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("coeffs", "spherical harmonic coefficients of a model");
    model.add(cmd, true);
    cmd->add_option("--n-max", n_max, "maximum degree")->check(CLI::NonNegativeNumber);
    cmd->add_option("--radius", radius, "reference radius (default: Brillouin radius)");
    cmd->add_option("--drop-below", drop_below, "omit rows with |C| at or below this");
    cmd->add_option("--out", out_path, "coefficient CSV (default stdout)");
    cmd->add_option("--dual-path", dual_path,
                    "also write coefficients recovered by sphere quadrature of the exact potential");
    cmd->add_option("--quad-radius", quad_radius,
                    "quadrature sphere radius for --dual-path (default 1.25 x reference radius)");
  }

  int run(std::ostream& out, std::ostream&) const {
    const auto s = model.spma();
    const auto masses = model.masses(s);
    const double R = reference_radius(radius, s, masses);
    const auto c = coeffs_from_point_masses(masses, R, n_max);
    {
      Sink sink(out_path, out);
      write_coefficients_csv(*sink, c, drop_below);
    }
    if (!dual_path.empty()) {
      const double extent = s ? brillouin_radius(s->support()) : pointmass_brillouin_radius(masses);
      const double rq = quad_radius > 0.0 ? quad_radius : 1.25 * std::max(R, extent);
      if (!(rq > extent))
        throw ValidationError("--quad-radius must lie outside the model's Brillouin sphere");
      auto potential = [&](const Vec3& x) {
        return s ? potential_spma(*s, x) : potential_point_masses(masses, x);
      };
      const auto q = coeffs_from_sphere_quadrature(potential, rq, R, n_max, 4 * n_max);
      std::ofstream f(dual_path);
      if (!f) throw ValidationError("cannot write '" + dual_path + "'");
      write_coefficients_csv(f, q, drop_below);
    }
    return exit_ok;
  }
};

struct DescentCmd {
  std::string mode;
  double gamma = 0.5;
  double m1 = 1.0;
  double m2 = 1.0;
  std::string profile = "quadratic";
  std::string file;
  double eps = 0.1;
  int n_max = 400;
  std::size_t directions = 64;
  std::string out_path;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("descent", "descent checks: snowman geometry or an SPMA file");
    cmd->add_option("mode", mode, "snowman | spma")
        ->required()
        ->check(CLI::IsMember({"snowman", "spma"}));
    cmd->add_option("--gamma", gamma, "snowman smoothing excess")->check(CLI::PositiveNumber);
    cmd->add_option("--m1", m1, "snowman mass at (1,0,0)")->check(CLI::PositiveNumber);
    cmd->add_option("--m2", m2, "snowman mass at (-1,0,0)")->check(CLI::PositiveNumber);
    cmd->add_option("--profile", profile, "snowman profile")
        ->check(CLI::IsMember({"quadratic", "cosine", "taper"}));
    cmd->add_option("--file", file, "SPMA file (mode spma)");
    cmd->add_option("--eps", eps, "descent depth below the Brillouin radius (mode spma)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-max", n_max, "maximum degree")->check(CLI::Range(8, 2000));
    cmd->add_option("--directions", directions, "number of test directions")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "per-direction convergence CSV");
  }

  int run(std::ostream& out, std::ostream&) const {
    DescentConfig cfg;
    cfg.n_max = n_max;
    cfg.directions = directions;
    if (mode == "snowman") {
      const SnowmanParams p{gamma, m1, m2, profile_kind_from_string(profile)};
      const auto d = snowman_descends_to_topography(p, true, cfg);
      if (!out_path.empty()) {
        const SPMA s = build_snowman(p);
        const auto c = coeffs_from_point_masses(s.equivalent_point_masses(), d.spma_radius, n_max);
        std::ofstream f(out_path);
        if (!f) throw ValidationError("cannot write '" + out_path + "'");
        write_convergence_csv(f, estimate_rc_report(c, directions).reports);
      }
      // eps is the depth from the Brillouin sphere down to the waist circle.
      out << "R=" << format_real(d.spma_radius) << " Rc=" << format_real(d.rc.value_or(0.0))
          << " eps=" << format_real(d.spma_radius - d.waist_radius)
          << " descends=" << flag(d.descends) << " waist=" << format_real(d.waist_radius)
          << " pointmass_radius=" << format_real(d.pointmass_radius) << '\n';
      return exit_ok;
    }
    if (file.empty()) throw ValidationError("descent spma requires --file");
    const SPMA s = load_spma(file);
    const auto r = epsilon_descent_check(s, eps, cfg);
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) throw ValidationError("cannot write '" + out_path + "'");
      write_convergence_csv(f, r.reports);
    }
    out << "R=" << format_real(r.brillouin_radius) << " Rc=" << format_real(r.rc)
        << " eps=" << format_real(eps) << " descends=" << flag(r.descends) << '\n';
    if (r.rc_inconclusive) {
      out << "# every direction inconclusive; Rc taken as 0\n";
      return exit_numeric;
    }
    return exit_ok;
  }
};

struct ApproximateCmd {
  std::string grid_file;
  double delta = 0.2;
  double eps = 0.2;
  std::size_t resolution = 64;
  double min_radius = 0.0;
  std::string out_path;
  std::string report_path;
  std::string reverify;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("approximate", "SPMA approximation of a grid density");
    cmd->add_option("--grid", grid_file, "grid density file")->required();
    cmd->add_option("--delta", delta, "metric budget")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", eps, "geometric budget")->check(CLI::PositiveNumber);
    cmd->add_option("--resolution", resolution, "quadrature cells per axis")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--min-radius", min_radius, "smallest filling ball (default: grid spacing)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", out_path, "SPMA output file (default stdout)");
    cmd->add_option("--report", report_path, "verification report JSON (default stderr)");
    cmd->add_option("--reverify", reverify,
                    "verify this SPMA file against the grid instead of constructing one");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const GridDensity f = load_grid_density(grid_file);
    FillingParams p;
    p.delta = delta;
    p.eps = eps;
    p.resolution = resolution;
    p.min_radius = min_radius;
    const Filling filling = build_filling(f, p);
    const SPMA spma = reverify.empty() ? assemble_spma(f, filling) : load_spma(reverify);
    const auto report = verify_approximation(f, spma, p, &filling);
    if (reverify.empty()) {
      Sink sink(out_path, out);
      write_spma(*sink, spma);
    }
    {
      Sink sink(report_path, err);
      *sink << report.to_json().dump(2) << '\n';
    }
    bool ok = true;
    for (const auto& c : report.checks)
      if (!c.pass) {
        ok = false;
        err << "verification failed: " << c.name << " measured " << format_real(c.measured)
            << " bound " << format_real(c.bound) << '\n';
      }
    return ok ? exit_ok : exit_numeric;
  }
};

struct PotentialCmd {
  ModelOptions model;
  std::vector<double> direction{0.0, 0.0, 1.0};
  double r_min = 1.2;
  double r_max = 3.0;
  std::size_t samples = 19;
  int terms = 200;
  double radius = 0.0;
  std::size_t oracle_resolution = 64;
  std::string out_path;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("potential", "exact, series and brute-force potentials on a ray");
    model.add(cmd, true);
    cmd->add_option("--direction", direction, "ray direction")->expected(3);
    cmd->add_option("--r-min", r_min, "first radius")->check(CLI::NonNegativeNumber);
    cmd->add_option("--r-max", r_max, "last radius")->check(CLI::NonNegativeNumber);
    cmd->add_option("--samples", samples, "points on the ray")->check(CLI::PositiveNumber);
    cmd->add_option("--terms", terms, "series truncation degree N")->check(CLI::NonNegativeNumber);
    cmd->add_option("--radius", radius, "series reference radius (default: Brillouin radius)");
    cmd->add_option("--oracle-resolution", oracle_resolution, "brute-force cells per axis")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "CSV output (default stdout)");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const Vec3 dir{direction[0], direction[1], direction[2]};
    if (!(dir.norm() > 0.0)) throw ValidationError("--direction must be nonzero");
    if (r_max < r_min) throw ValidationError("--r-max must not be below --r-min");
    const Vec3 u = dir / dir.norm();
    const auto s = model.spma();
    const auto masses = model.masses(s);
    const double R = reference_radius(radius, s, masses);
    const auto c = coeffs_from_point_masses(masses, R, terms);
    const Direction d = Direction::of(u);

    Sink sink(out_path, out);
    *sink << "x,y,z,V_exact,V_partial_sum_N,V_oracle\n";
    auto cell = [&](auto&& fn, const Vec3& x, const char* column) -> std::string {
      try {
        return format_real(fn());
      } catch (const std::exception& e) {
        err << "row (" << format_real(x.x) << ", " << format_real(x.y) << ", " << format_real(x.z)
            << ") " << column << ": " << e.what() << '\n';
        return "error";
      }
    };
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
      const double r = r_min + (r_max - r_min) * t;
      const Vec3 x = u * r;
      const std::string exact = cell(
          [&] { return s ? potential_spma(*s, x) : potential_point_masses(masses, x); }, x, "V_exact");
      const std::string series = cell(
          [&] {
            if (!(r > 0.0)) throw NumericError("series undefined at the origin");
            return evaluate_partial_sum(c, terms, r, d);
          },
          x, "V_partial_sum_N");
      const std::string oracle =
          s ? cell([&] { return potential_oracle(as_field(*s), x, {}, oracle_resolution); }, x,
                   "V_oracle")
            : cell([&] { return potential_point_masses(masses, x); }, x, "V_oracle");
      *sink << format_real(x.x) << ',' << format_real(x.y) << ',' << format_real(x.z) << ','
            << exact << ',' << series << ',' << oracle << '\n';
    }
    return exit_ok;
  }
};

struct RcCmd {
  ModelOptions model;
  std::string coeffs_file;
  int n_max = 400;
  double radius = 0.0;
  std::size_t directions = 64;
  std::vector<int> window;
  std::string out_path;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("rc", "convergence radius estimate by the root test");
    model.add(cmd, true);
    cmd->add_option("--coeffs", coeffs_file, "coefficient CSV instead of a model");
    cmd->add_option("--n-max", n_max, "maximum degree")->check(CLI::Range(8, 2000));
    cmd->add_option("--radius", radius, "reference radius (default: Brillouin radius)");
    cmd->add_option("--directions", directions, "number of test directions")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--window", window, "fit window: lo hi")->expected(2);
    cmd->add_option("--out", out_path, "per-direction convergence CSV");
  }

  int run(std::ostream& out, std::ostream&) const {
    std::optional<SHECoefficients> c;
    if (!coeffs_file.empty()) {
      std::ifstream in(coeffs_file);
      if (!in) throw ValidationError("cannot open '" + coeffs_file + "'");
      c = read_coefficients_csv(in);
    } else {
      const auto s = model.spma();
      const auto masses = model.masses(s);
      c = coeffs_from_point_masses(masses, reference_radius(radius, s, masses), n_max);
    }
    std::optional<FitWindow> w;
    if (!window.empty()) w = FitWindow{window[0], window[1]};
    const auto est = estimate_rc_report(*c, directions, w);
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) throw ValidationError("cannot write '" + out_path + "'");
      write_convergence_csv(f, est.reports);
    }
    out << "R=" << format_real(c->ref_radius()) << " Rc=" << format_real(est.rc) << '\n';
    return exit_ok;
  }
};

struct SnowmanScanCmd {
  double gamma_min = 0.1;
  double gamma_max = 1.0;
  std::size_t steps = 10;
  bool with_rc = false;
  int n_max = 400;
  std::size_t directions = 64;
  double tol = 1e-12;
  std::string out_path;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("snowman-scan", "waist radius and descent flag over gamma");
    cmd->add_option("--gamma-min", gamma_min, "first gamma")->check(CLI::PositiveNumber);
    cmd->add_option("--gamma-max", gamma_max, "last gamma")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", steps, "number of gamma values")->check(CLI::PositiveNumber);
    cmd->add_flag("--rc", with_rc, "also estimate R_c of the equivalent array");
    cmd->add_option("--n-max", n_max, "maximum degree for --rc")->check(CLI::Range(8, 2000));
    cmd->add_option("--directions", directions, "directions for --rc")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", tol, "bracket width for the descent threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "CSV output (default stdout)");
  }

  int run(std::ostream& out, std::ostream&) const {
    if (gamma_max < gamma_min) throw ValidationError("--gamma-max must not be below --gamma-min");
    DescentConfig cfg;
    cfg.n_max = n_max;
    cfg.directions = directions;
    Sink sink(out_path, out);
    *sink << "gamma,waist_radius,pointmass_radius,spma_radius,descends" << (with_rc ? ",rc" : "")
          << '\n';
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
      const double g = gamma_min + (gamma_max - gamma_min) * t;
      const auto d = snowman_descends_to_topography({g, 1.0, 1.0}, with_rc, cfg);
      *sink << format_real(g) << ',' << format_real(d.waist_radius) << ','
            << format_real(d.pointmass_radius) << ',' << format_real(d.spma_radius) << ','
            << flag(d.descends);
      if (with_rc) *sink << ',' << format_real(d.rc.value_or(0.0));
      *sink << '\n';
    }
    try {
      const auto [lo, hi] = snowman_threshold_bracket(gamma_min, gamma_max, tol);
      *sink << "# threshold gamma in [" << format_real(lo) << ", " << format_real(hi) << "]\n";
    } catch (const NumericError&) {
      *sink << "# threshold gamma outside the scanned interval\n";
    }
    return exit_ok;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical harmonic expansion experiments", "shelab"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  CoeffsCmd coeffs;
  DescentCmd descent;
  ApproximateCmd approximate;
  PotentialCmd potential;
  RcCmd rc;
  SnowmanScanCmd scan;
  coeffs.add(app);
  descent.add(app);
  approximate.add(app);
  potential.add(app);
  rc.add(app);
  scan.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "coeffs") return coeffs.run(out, err);
    if (name == "descent") return descent.run(out, err);
    if (name == "approximate") return approximate.run(out, err);
    if (name == "potential") return potential.run(out, err);
    if (name == "rc") return rc.run(out, err);
    return scan.run(out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace shelab
