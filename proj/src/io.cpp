#include "shelab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shelab/error.hpp"

namespace shelab {

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

// Significant lines split into whitespace-separated tokens.
std::vector<std::vector<Token>> tokenize(std::istream& in) {
  std::vector<std::vector<Token>> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::istringstream ls(raw);
    std::vector<Token> tokens;
    std::string word;
    while (ls >> word) tokens.push_back({word, number});
    if (tokens.empty() || tokens.front().text.front() == '#') continue;
    lines.push_back(std::move(tokens));
  }
  return lines;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
}

double to_real(const Token& t, const std::string& source) {
  double v = 0.0;
  const char* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    fail(source, t.line, "expected a finite number, got '" + t.text + "'");
  return v;
}

std::size_t to_count(const Token& t, const std::string& source) {
  std::size_t v = 0;
  const char* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(source, t.line, "expected a count, got '" + t.text + "'");
  return v;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridDensity read_grid_density(std::istream& in, const std::string& source) {
  const auto lines = tokenize(in);
  if (lines.empty()) fail(source, 1, "missing header `nx ny nz h ox oy oz`");
  const auto& head = lines.front();
  if (head.size() != 7) fail(source, head.front().line, "header needs 7 fields `nx ny nz h ox oy oz`");
  const std::size_t nx = to_count(head[0], source);
  const std::size_t ny = to_count(head[1], source);
  const std::size_t nz = to_count(head[2], source);
  const double h = to_real(head[3], source);
  const Vec3 origin{to_real(head[4], source), to_real(head[5], source), to_real(head[6], source)};
  if (nx == 0 || ny == 0 || nz == 0) fail(source, head.front().line, "grid dimensions must be positive");
  if (!(h > 0.0)) fail(source, head.front().line, "spacing must be positive");

  std::vector<double> values;
  values.reserve(nx * ny * nz);
  std::size_t last_line = head.front().line;
  for (std::size_t l = 1; l < lines.size(); ++l)
    for (const Token& t : lines[l]) {
      if (values.size() == nx * ny * nz) fail(source, t.line, "more values than nx*ny*nz");
      const double v = to_real(t, source);
      if (v < 0.0) fail(source, t.line, "density values must be non-negative");
      values.push_back(v);
      last_line = t.line;
    }
  if (values.size() != nx * ny * nz)
    fail(source, last_line,
         "expected " + std::to_string(nx * ny * nz) + " values, found " + std::to_string(values.size()));
  try {
    return GridDensity(origin, h, nx, ny, nz, std::move(values));
  } catch (const ValidationError& e) {
    fail(source, head.front().line, e.what());
  }
}

void write_grid_density(std::ostream& out, const GridDensity& g) {
  out << g.nx() << ' ' << g.ny() << ' ' << g.nz() << ' ' << format_real(g.spacing()) << ' '
      << format_real(g.origin().x) << ' ' << format_real(g.origin().y) << ' '
      << format_real(g.origin().z) << '\n';
  for (std::size_t k = 0; k < g.nz(); ++k)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      for (std::size_t i = 0; i < g.nx(); ++i) out << (i ? " " : "") << format_real(g.at(i, j, k));
      out << '\n';
    }
}

SPMA read_spma(std::istream& in, const std::string& source) {
  std::vector<SmoothedPointMass> comps;
  for (const auto& tokens : tokenize(in)) {
    const std::size_t line = tokens.front().line;
    if (tokens.size() < 6) fail(source, line, "expected `cx cy cz a kind param...`");
    const Vec3 c{to_real(tokens[0], source), to_real(tokens[1], source), to_real(tokens[2], source)};
    const double a = to_real(tokens[3], source);
    const std::string& kind = tokens[4].text;
    auto expect = [&](std::size_t n) {
      if (tokens.size() != n) fail(source, line, "wrong number of parameters for '" + kind + "'");
    };
    try {
      if (kind == "quadratic") {
        expect(6);
        comps.push_back({c, RadialProfile::quadratic_bump(a, to_real(tokens[5], source))});
      } else if (kind == "cosine") {
        expect(6);
        comps.push_back({c, RadialProfile::cosine_bump(a, to_real(tokens[5], source))});
      } else if (kind == "taper") {
        expect(7);
        comps.push_back({c, RadialProfile::constant_taper(a, to_real(tokens[5], source),
                                                          to_real(tokens[6], source))});
      } else if (kind == "table") {
        const std::size_t n = to_count(tokens[5], source);
        expect(6 + 2 * n);
        std::vector<double> s(n);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = to_real(tokens[6 + 2 * i], source);
          v[i] = to_real(tokens[7 + 2 * i], source);
        }
        if (n == 0 || s.back() != a) fail(source, line, "table must end at the outer radius a");
        comps.push_back({c, RadialProfile::table(std::move(s), std::move(v))});
      } else {
        fail(source, line, "unknown profile kind '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind(source + ":", 0) == 0) throw;
      fail(source, line, what);
    }
  }
  if (comps.empty()) fail(source, 1, "no components");
  return SPMA(std::move(comps));
}

void write_spma(std::ostream& out, const SPMA& spma) {
  for (const auto& comp : spma.components()) {
    const RadialProfile& p = comp.profile;
    out << format_real(comp.center.x) << ' ' << format_real(comp.center.y) << ' '
        << format_real(comp.center.z) << ' ' << format_real(p.outer_radius()) << ' '
        << to_string(p.kind());
    switch (p.kind()) {
      case ProfileKind::quadratic_bump:
      case ProfileKind::cosine_bump:
        out << ' ' << format_real(p.amplitude());
        break;
      case ProfileKind::constant_taper:
        out << ' ' << format_real(p.amplitude()) << ' ' << format_real(p.inner_radius());
        break;
      case ProfileKind::table:
        out << ' ' << p.table_radii().size();
        for (std::size_t i = 0; i < p.table_radii().size(); ++i)
          out << ' ' << format_real(p.table_radii()[i]) << ' ' << format_real(p.table_values()[i]);
        break;
    }
    out << '\n';
  }
}

std::vector<PointMass> read_point_masses(std::istream& in, const std::string& source) {
  std::vector<PointMass> masses;
  for (const auto& tokens : tokenize(in)) {
    const std::size_t line = tokens.front().line;
    if (tokens.size() != 4) fail(source, line, "expected `x y z m`");
    const PointMass pm{{to_real(tokens[0], source), to_real(tokens[1], source),
                        to_real(tokens[2], source)},
                       to_real(tokens[3], source)};
    if (!(pm.mass > 0.0)) fail(source, line, "mass must be positive");
    masses.push_back(pm);
  }
  if (masses.empty()) fail(source, 1, "no point masses");
  return masses;
}

void write_point_masses(std::ostream& out, const std::vector<PointMass>& masses) {
  for (const PointMass& pm : masses)
    out << format_real(pm.position.x) << ' ' << format_real(pm.position.y) << ' '
        << format_real(pm.position.z) << ' ' << format_real(pm.mass) << '\n';
}

GridDensity load_grid_density(const std::string& path) {
  auto in = open(path);
  return read_grid_density(in, path);
}

SPMA load_spma(const std::string& path) {
  auto in = open(path);
  return read_spma(in, path);
}

std::vector<PointMass> load_point_masses(const std::string& path) {
  auto in = open(path);
  return read_point_masses(in, path);
}

}  // namespace shelab
