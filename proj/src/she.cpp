#include "shelab/she.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <algorithm>

#include "shelab/error.hpp"
#include "shelab/quadrature.hpp"

namespace shelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeedScale = 1e280;

}  // namespace

Direction Direction::make(double theta, double phi) {
  require(theta >= 0.0 && theta <= std::numbers::pi, "Direction: theta must lie in [0, pi]");
  require(phi >= 0.0 && phi < kTwoPi, "Direction: phi must lie in [0, 2 pi)");
  return {theta, phi};
}

Direction Direction::of(const Vec3& v) {
  const double rho = std::hypot(v.x, v.y);
  const double theta = std::atan2(rho, v.z);
  double phi = std::atan2(v.y, v.x);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {theta, phi};
}

Vec3 Direction::unit() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double legendre_p(int n, double x) {
  require(n >= 0, "legendre_p: degree must be non-negative");
  require(std::abs(x) <= 1.0, "legendre_p: |x| must not exceed 1");
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

AssociatedLegendre::AssociatedLegendre(int n_max) : n_max_(n_max) {
  require(n_max >= 0, "AssociatedLegendre: n_max must be non-negative");
  const std::size_t size = offset(n_max + 1);
  a_.assign(size, 0.0);
  b_.assign(size, 0.0);
  values_.assign(size, 0.0);
  for (int m = 0; m <= n_max; ++m)
    for (int n = m + 1; n <= n_max; ++n) {
      const double nm = static_cast<double>(n - m) * static_cast<double>(n + m);
      a_[offset(n) + m] = std::sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0) / nm);
      if (n >= m + 2)
        b_[offset(n) + m] =
            std::sqrt((2.0 * n + 1.0) * (n + m - 1.0) * (n - m - 1.0) / (nm * (2.0 * n - 3.0)));
    }
}

void AssociatedLegendre::compute(double theta) {
  const double t = std::cos(theta);
  const double u = std::sin(theta);
  double sectoral = kSeedScale;
  for (int m = 0; m <= n_max_; ++m) {
    if (m == 1)
      sectoral *= std::sqrt(3.0) * u;
    else if (m >= 2)
      sectoral *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * u;
    double prev2 = 0.0;
    double prev1 = sectoral;
    values_[offset(m) + m] = prev1 / kSeedScale;
    for (int n = m + 1; n <= n_max_; ++n) {
      const double cur = a_[offset(n) + m] * t * prev1 - b_[offset(n) + m] * prev2;
      values_[offset(n) + m] = cur / kSeedScale;
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

double ynm_bar(int n, int m, const Direction& d) {
  require(n >= 0, "ynm_bar: degree must be non-negative");
  require(std::abs(m) <= n, "ynm_bar: |m| must not exceed n");
  AssociatedLegendre p(n);
  p.compute(d.theta);
  const int am = std::abs(m);
  const double ang = m >= 0 ? std::cos(am * d.phi) : std::sin(am * d.phi);
  return p(n, am) * ang;
}

std::vector<double> ynm_bar_all(int n_max, const Direction& d) {
  AssociatedLegendre p(n_max);
  p.compute(d.theta);
  std::vector<double> cosm(n_max + 1);
  std::vector<double> sinm(n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    cosm[m] = std::cos(m * d.phi);
    sinm[m] = std::sin(m * d.phi);
  }
  std::vector<double> y(SHECoefficients::size_for(n_max));
  for (int n = 0; n <= n_max; ++n) {
    y[SHECoefficients::index(n, 0)] = p(n, 0);
    for (int m = 1; m <= n; ++m) {
      y[SHECoefficients::index(n, m)] = p(n, m) * cosm[m];
      y[SHECoefficients::index(n, -m)] = p(n, m) * sinm[m];
    }
  }
  return y;
}

SHECoefficients::SHECoefficients(double ref_radius, double gm, int n_max)
    : R_(ref_radius), gm_(gm), n_max_(n_max), c_(size_for(n_max), 0.0) {
  require(ref_radius > 0.0 && std::isfinite(ref_radius), "SHECoefficients: R must be positive");
  require(gm > 0.0 && std::isfinite(gm), "SHECoefficients: GM must be positive");
  require(n_max >= 0, "SHECoefficients: n_max must be non-negative");
}

SHECoefficients coeffs_from_point_masses(std::span<const PointMass> masses, double ref_radius,
                                         int n_max, const GravConfig& cfg) {
  require(!masses.empty(), "coeffs_from_point_masses: empty mass list");
  double total = 0.0;
  for (const PointMass& m : masses) {
    require(m.mass > 0.0 && std::isfinite(m.mass), "coeffs_from_point_masses: masses must be > 0");
    require(m.position.finite(), "coeffs_from_point_masses: positions must be finite");
    total += m.mass;
  }
  if (!(total > 0.0)) throw ValidationError("coeffs_from_point_masses: total mass is zero");
  if (pointmass_brillouin_radius(masses) > ref_radius)
    std::clog << "warning: reference radius lies inside the point-mass Brillouin sphere\n";

  SHECoefficients c(ref_radius, cfg.G * total, n_max);
  // Fixed chunks summed in order keep the result independent of thread count.
  const std::size_t chunks = std::min<std::size_t>(64, masses.size());
  std::vector<std::vector<double>> partial(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < chunks; ++k) {
    std::vector<double> acc(SHECoefficients::size_for(n_max), 0.0);
    AssociatedLegendre p(n_max);
    std::vector<double> cosm(n_max + 1);
    std::vector<double> sinm(n_max + 1);
    const std::size_t lo = masses.size() * k / chunks;
    const std::size_t hi = masses.size() * (k + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) {
      const PointMass& pm = masses[i];
      const Direction d = Direction::of(pm.position);
      const double q = pm.position.norm() / ref_radius;
      p.compute(d.theta);
      for (int m = 0; m <= n_max; ++m) {
        cosm[m] = std::cos(m * d.phi);
        sinm[m] = std::sin(m * d.phi);
      }
      double qn = 1.0;
      for (int n = 0; n <= n_max && qn != 0.0; ++n, qn *= q) {
        const double w = pm.mass * qn / (total * (2.0 * n + 1.0));
        double* row = acc.data() + SHECoefficients::index(n, 0);
        row[0] += w * p(n, 0);
        for (int m = 1; m <= n; ++m) {
          const double wp = w * p(n, m);
          row[m] += wp * cosm[m];
          row[-m] += wp * sinm[m];
        }
      }
    }
    partial[k] = std::move(acc);
  }
  for (const auto& acc : partial)
    for (int n = 0; n <= n_max; ++n)
      for (int m = -n; m <= n; ++m) c.at(n, m) += acc[SHECoefficients::index(n, m)];
  return c;
}

SHECoefficients coeffs_from_sphere_quadrature(const std::function<double(const Vec3&)>& potential,
                                              double quad_radius, double ref_radius, int n_max,
                                              int quad_degree) {
  require(quad_radius > 0.0, "coeffs_from_sphere_quadrature: quadrature radius must be positive");
  require(n_max >= 0, "coeffs_from_sphere_quadrature: n_max must be non-negative");
  const int L = quad_degree < 0 ? n_max : quad_degree;
  require(L >= n_max, "coeffs_from_sphere_quadrature: quadrature degree below n_max");

  const auto rule = gauss_legendre(static_cast<std::size_t>(L) + 1);
  const std::size_t n_phi = 2 * static_cast<std::size_t>(L) + 2;
  const double dphi = kTwoPi / static_cast<double>(n_phi);

  std::vector<double> cos_table(n_phi * (n_max + 1));
  std::vector<double> sin_table(n_phi * (n_max + 1));
  for (std::size_t j = 0; j < n_phi; ++j)
    for (int m = 0; m <= n_max; ++m) {
      const double ang = m * dphi * static_cast<double>(j);
      cos_table[j * (n_max + 1) + m] = std::cos(ang);
      sin_table[j * (n_max + 1) + m] = std::sin(ang);
    }

  // K_{n,m} = (1 / 4 pi) int V Ybar_{n,m} dOmega.
  std::vector<double> K(SHECoefficients::size_for(n_max), 0.0);
  AssociatedLegendre p(n_max);
  std::vector<double> fc(n_max + 1);
  std::vector<double> fs(n_max + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = std::acos(rule.nodes[i]);
    const double st = std::sin(theta);
    std::fill(fc.begin(), fc.end(), 0.0);
    std::fill(fs.begin(), fs.end(), 0.0);
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double phi = dphi * static_cast<double>(j);
      const Vec3 x{quad_radius * st * std::cos(phi), quad_radius * st * std::sin(phi),
                   quad_radius * rule.nodes[i]};
      const double v = potential(x);
      for (int m = 0; m <= n_max; ++m) {
        fc[m] += v * cos_table[j * (n_max + 1) + m];
        fs[m] += v * sin_table[j * (n_max + 1) + m];
      }
    }
    p.compute(theta);
    const double w = rule.weights[i] * dphi / (4.0 * std::numbers::pi);
    for (int n = 0; n <= n_max; ++n) {
      K[SHECoefficients::index(n, 0)] += w * p(n, 0) * fc[0];
      for (int m = 1; m <= n; ++m) {
        K[SHECoefficients::index(n, m)] += w * p(n, m) * fc[m];
        K[SHECoefficients::index(n, -m)] += w * p(n, m) * fs[m];
      }
    }
  }

  double gm = quad_radius * K[0];
  if (gm == 0.0) gm = 1.0;
  if (!(gm > 0.0))
    throw NumericError("coeffs_from_sphere_quadrature: negative monopole (sign convention V > 0)");
  SHECoefficients c(ref_radius, gm, n_max);
  for (int n = 0; n <= n_max; ++n) {
    const double scale = ref_radius / gm * std::pow(quad_radius / ref_radius, n + 1);
    for (int m = -n; m <= n; ++m) c.at(n, m) = K[SHECoefficients::index(n, m)] * scale;
  }
  return c;
}

std::vector<double> degree_amplitudes(const SHECoefficients& c, const Direction& d) {
  const auto y = ynm_bar_all(c.n_max(), d);
  std::vector<double> b(c.n_max() + 1);
  for (int n = 0; n <= c.n_max(); ++n) {
    CompensatedSum acc;
    for (int m = -n; m <= n; ++m) acc.add(c.at(n, m) * y[SHECoefficients::index(n, m)]);
    b[n] = acc.value();
  }
  return b;
}

std::vector<double> direction_term_sequence(const SHECoefficients& c, const Direction& d,
                                            double r) {
  require(r > 0.0, "direction_term_sequence: r must be positive");
  auto t = degree_amplitudes(c, d);
  const double ratio = c.ref_radius() / r;
  const double pre = c.gm() / c.ref_radius();
  for (int n = 0; n <= c.n_max(); ++n) t[n] *= pre * std::pow(ratio, n + 1);
  return t;
}

double evaluate_partial_sum(const SHECoefficients& c, int N, double r, const Direction& d) {
  require(r > 0.0, "evaluate_partial_sum: r must be positive");
  require(N >= 0 && N <= c.n_max(), "evaluate_partial_sum: N must lie in [0, n_max]");
  const auto t = direction_term_sequence(c, d, r);
  CompensatedSum acc;
  for (int n = 0; n <= N; ++n) acc.add(t[n]);
  return acc.value();
}

void write_coefficients_csv(std::ostream& out, const SHECoefficients& c, double drop_below) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# R=%.17g GM=%.17g n_max=%d\n", c.ref_radius(), c.gm(),
                c.n_max());
  out << buf << "n,m,C\n";
  for (int n = 0; n <= c.n_max(); ++n)
    for (int m = -n; m <= n; ++m) {
      const double v = c.at(n, m);
      if (drop_below >= 0.0 && !(std::abs(v) > drop_below)) continue;
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", n, m, v);
      out << buf;
    }
}

SHECoefficients read_coefficients_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  double R = 0.0;
  double gm = 0.0;
  int n_max = -1;
  bool have_meta = false;
  bool have_header = false;
  std::vector<std::tuple<int, int, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (std::sscanf(line.c_str(), "# R=%lf GM=%lf n_max=%d", &R, &gm, &n_max) == 3)
        have_meta = true;
      continue;
    }
    if (!have_header) {
      if (line != "n,m,C")
        throw ValidationError("coefficient CSV line " + std::to_string(line_no) +
                              ": expected header n,m,C");
      have_header = true;
      continue;
    }
    int n = 0;
    int m = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &n, &m, &v) != 3)
      throw ValidationError("coefficient CSV line " + std::to_string(line_no) + ": malformed row");
    rows.emplace_back(n, m, v);
  }
  if (!have_meta) throw ValidationError("coefficient CSV: missing metadata line");
  SHECoefficients c(R, gm, n_max);
  for (const auto& [n, m, v] : rows) {
    if (n < 0 || n > n_max || std::abs(m) > n)
      throw ValidationError("coefficient CSV: index (" + std::to_string(n) + "," +
                            std::to_string(m) + ") out of range");
    c.at(n, m) = v;
  }
  return c;
}

}  // namespace shelab
