#include "shelab/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shelab/error.hpp"
#include "shelab/kernels.hpp"
#include "shelab/quadrature.hpp"

namespace shelab {

namespace {

constexpr double kPi = std::numbers::pi;

// int_l^u t^power (alpha + beta t) dt for power in {1, 2}.
double linear_moment(double alpha, double beta, double l, double u, int power) {
  auto pw = [](double x, int k) { return std::pow(x, k); };
  return alpha * (pw(u, power + 1) - pw(l, power + 1)) / (power + 1) +
         beta * (pw(u, power + 2) - pw(l, power + 2)) / (power + 2);
}

}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::quadratic_bump: return "quadratic";
    case ProfileKind::cosine_bump: return "cosine";
    case ProfileKind::constant_taper: return "taper";
    case ProfileKind::table: return "table";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "quadratic") return ProfileKind::quadratic_bump;
  if (name == "cosine") return ProfileKind::cosine_bump;
  if (name == "taper") return ProfileKind::constant_taper;
  if (name == "table") return ProfileKind::table;
  throw ValidationError("unknown profile kind '" + name + "'");
}

RadialProfile RadialProfile::quadratic_bump(double outer_radius, double amplitude) {
  require(outer_radius > 0.0, "profile: outer radius must be positive");
  require(amplitude > 0.0 && std::isfinite(amplitude), "profile: amplitude must be positive");
  RadialProfile p;
  p.kind_ = ProfileKind::quadratic_bump;
  p.a_ = outer_radius;
  p.c_ = amplitude;
  return p;
}

RadialProfile RadialProfile::cosine_bump(double outer_radius, double amplitude) {
  RadialProfile p = quadratic_bump(outer_radius, amplitude);
  p.kind_ = ProfileKind::cosine_bump;
  return p;
}

RadialProfile RadialProfile::constant_taper(double outer_radius, double amplitude,
                                            double inner_radius) {
  RadialProfile p = quadratic_bump(outer_radius, amplitude);
  require(inner_radius >= 0.0 && inner_radius < outer_radius,
          "taper profile: inner radius must lie in [0, a)");
  p.kind_ = ProfileKind::constant_taper;
  p.b_ = inner_radius;
  return p;
}

RadialProfile RadialProfile::table(std::vector<double> radii, std::vector<double> values) {
  require(radii.size() == values.size(), "table profile: radii and values differ in length");
  require(radii.size() >= 2, "table profile: need at least two nodes");
  require(radii.front() == 0.0, "table profile: first radius must be 0");
  for (std::size_t k = 1; k < radii.size(); ++k)
    require(radii[k] >= radii[k - 1], "table profile: radii must be non-decreasing");
  require(radii.back() > 0.0, "table profile: outer radius must be positive");
  for (double v : values)
    require(v >= 0.0 && std::isfinite(v), "table profile: values must be finite and >= 0");
  require(values.back() == 0.0, "table profile: value at the outer radius must be 0");
  require(*std::max_element(values.begin(), values.end()) > 0.0,
          "table profile: profile must not vanish identically");
  RadialProfile p;
  p.kind_ = ProfileKind::table;
  p.a_ = radii.back();
  p.c_ = *std::max_element(values.begin(), values.end());
  p.radii_ = std::move(radii);
  p.values_ = std::move(values);
  return p;
}

RadialProfile RadialProfile::uniform_ball(double outer_radius, double density) {
  return table({0.0, outer_radius, outer_radius}, {density, density, 0.0});
}

double RadialProfile::operator()(double s) const {
  if (s < 0.0 || s > a_) return 0.0;
  switch (kind_) {
    case ProfileKind::quadratic_bump: {
      const double q = s / a_;
      return c_ * (1.0 - q * q);
    }
    case ProfileKind::cosine_bump: return 0.5 * c_ * (1.0 + std::cos(kPi * s / a_));
    case ProfileKind::constant_taper:
      return s <= b_ ? c_ : c_ * (a_ - s) / (a_ - b_);
    case ProfileKind::table: {
      if (s >= a_) return values_.back();
      const auto it = std::upper_bound(radii_.begin(), radii_.end(), s);
      const auto hi = static_cast<std::size_t>(it - radii_.begin());
      const std::size_t lo = hi - 1;
      const double w = (s - radii_[lo]) / (radii_[hi] - radii_[lo]);
      return values_[lo] + w * (values_[hi] - values_[lo]);
    }
  }
  return 0.0;
}

double RadialProfile::peak() const { return c_; }

double RadialProfile::table_integral(double lo, double hi, int power) const {
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < radii_.size(); ++k) {
    const double l = std::max(lo, radii_[k]);
    const double u = std::min(hi, radii_[k + 1]);
    if (!(u > l)) continue;
    const double r0 = radii_[k];
    const double r1 = radii_[k + 1];
    const double v0 = values_[k];
    const double v1 = values_[k + 1];
    auto seg = [&](double t) {
      const double g = v0 + (t - r0) / (r1 - r0) * (v1 - v0);
      return std::pow(t, power) * g;
    };
    const double scale = std::max(v0, v1) * std::pow(u, power + 1) + 1e-300;
    acc.add(adaptive_simpson(seg, l, u, 1e-14 * scale));
  }
  return acc.value();
}

double RadialProfile::enclosed_mass(double s) const {
  s = std::clamp(s, 0.0, a_);
  switch (kind_) {
    case ProfileKind::quadratic_bump:
      return 4.0 * kPi * c_ * (s * s * s / 3.0 - std::pow(s, 5) / (5.0 * a_ * a_));
    case ProfileKind::cosine_bump: {
      const double k = kPi / a_;
      const double sk = std::sin(k * s);
      const double ck = std::cos(k * s);
      const double cos_part = s * s * sk / k + 2.0 * s * ck / (k * k) - 2.0 * sk / (k * k * k);
      return 2.0 * kPi * c_ * (s * s * s / 3.0 + cos_part);
    }
    case ProfileKind::constant_taper: {
      double m = linear_moment(c_, 0.0, 0.0, std::min(s, b_), 2);
      if (s > b_) {
        const double beta = -c_ / (a_ - b_);
        m += linear_moment(c_ * a_ / (a_ - b_), beta, b_, s, 2);
      }
      return 4.0 * kPi * m;
    }
    case ProfileKind::table: return 4.0 * kPi * table_integral(0.0, s, 2);
  }
  return 0.0;
}

double RadialProfile::outer_moment(double s) const {
  s = std::clamp(s, 0.0, a_);
  switch (kind_) {
    case ProfileKind::quadratic_bump: {
      const double a2 = a_ * a_;
      return 4.0 * kPi * c_ * ((a2 - s * s) / 2.0 - (a2 * a2 - s * s * s * s) / (4.0 * a2));
    }
    case ProfileKind::cosine_bump: {
      const double k = kPi / a_;
      auto prim = [&](double t) { return t * std::sin(k * t) / k + std::cos(k * t) / (k * k); };
      return 2.0 * kPi * c_ * ((a_ * a_ - s * s) / 2.0 + prim(a_) - prim(s));
    }
    case ProfileKind::constant_taper: {
      double m = 0.0;
      if (s < b_) m += linear_moment(c_, 0.0, s, b_, 1);
      const double beta = -c_ / (a_ - b_);
      m += linear_moment(c_ * a_ / (a_ - b_), beta, std::max(s, b_), a_, 1);
      return 4.0 * kPi * m;
    }
    case ProfileKind::table: return 4.0 * kPi * table_integral(s, a_, 1);
  }
  return 0.0;
}

RadialProfile RadialProfile::scaled(double factor) const {
  require(factor > 0.0 && std::isfinite(factor), "profile: scale factor must be positive");
  RadialProfile p = *this;
  p.c_ *= factor;
  for (double& v : p.values_) v *= factor;
  return p;
}

SPMA::SPMA(std::vector<SmoothedPointMass> components) : components_(std::move(components)) {
  require(!components_.empty(), "SPMA: at least one component required");
  for (const auto& c : components_) {
    require(c.center.finite(), "SPMA: component centre must be finite");
    require(c.profile.total_mass() > 0.0, "SPMA: component mass must be positive");
  }
  if (components_.size() > 16) {
    const Box box = bounds();
    const Vec3 ext = box.hi - box.lo;
    auto index = std::make_shared<BallIndex>(box, std::max({ext.x, ext.y, ext.z}) / 64.0);
    for (std::size_t i = 0; i < components_.size(); ++i) index->insert(i, components_[i].support());
    index_ = std::move(index);
  }
}

double SPMA::density(const Vec3& x) const {
  double v = 0.0;
  if (index_) {
    for (std::size_t i : index_->candidates(x)) v += components_[i](x);
  } else {
    for (const auto& c : components_) v += c(x);
  }
  return v;
}

BallRegion SPMA::support() const {
  std::vector<Ball> balls;
  balls.reserve(components_.size());
  for (const auto& c : components_) balls.push_back(c.support());
  return BallRegion(std::move(balls));
}

std::vector<PointMass> SPMA::equivalent_point_masses() const {
  std::vector<PointMass> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back({c.center, c.mass()});
  return out;
}

Box SPMA::bounds() const { return support().bounds(); }

// --- GridDensity -----------------------------------------------------------

GridDensity::GridDensity(Vec3 origin, double spacing, std::size_t nx, std::size_t ny,
                         std::size_t nz, std::vector<double> values)
    : origin_(origin), h_(spacing), nx_(nx), ny_(ny), nz_(nz), values_(std::move(values)) {
  require(spacing > 0.0 && std::isfinite(spacing), "GridDensity: spacing must be positive");
  require(nx >= 1 && ny >= 1 && nz >= 1, "GridDensity: dimensions must be positive");
  require(values_.size() == nx * ny * nz, "GridDensity: value count does not match dimensions");
  require(origin.finite(), "GridDensity: origin must be finite");
  for (double v : values_)
    require(std::isfinite(v) && v >= 0.0, "GridDensity: values must be finite and >= 0");

  const auto support = support_nodes();
  require(!support.empty(), "GridDensity: support is empty");
  std::vector<char> seen(values_.size(), 0);
  std::vector<std::size_t> stack{support.front()};
  seen[support.front()] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t idx = stack.back();
    stack.pop_back();
    ++reached;
    const std::size_t i = idx % nx_;
    const std::size_t j = (idx / nx_) % ny_;
    const std::size_t k = idx / (nx_ * ny_);
    auto visit = [&](std::size_t ii, std::size_t jj, std::size_t kk) {
      const std::size_t n = index(ii, jj, kk);
      if (!seen[n] && values_[n] > 0.0) {
        seen[n] = 1;
        stack.push_back(n);
      }
    };
    if (i > 0) visit(i - 1, j, k);
    if (i + 1 < nx_) visit(i + 1, j, k);
    if (j > 0) visit(i, j - 1, k);
    if (j + 1 < ny_) visit(i, j + 1, k);
    if (k > 0) visit(i, j, k - 1);
    if (k + 1 < nz_) visit(i, j, k + 1);
  }
  require(reached == support.size(), "GridDensity: support is not grid-connected");
}

GridDensity GridDensity::sample(const std::function<double(const Vec3&)>& fn, Vec3 origin,
                                double spacing, std::size_t nx, std::size_t ny, std::size_t nz) {
  std::vector<double> values(nx * ny * nz);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        values[i + nx * (j + ny * k)] =
            fn(origin + Vec3{static_cast<double>(i), static_cast<double>(j),
                             static_cast<double>(k)} * spacing);
  return GridDensity(origin, spacing, nx, ny, nz, std::move(values));
}

Vec3 GridDensity::node(std::size_t idx) const {
  const std::size_t i = idx % nx_;
  const std::size_t j = (idx / nx_) % ny_;
  const std::size_t k = idx / (nx_ * ny_);
  return origin_ + Vec3{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)} * h_;
}

Box GridDensity::bounds() const {
  return {origin_, origin_ + Vec3{static_cast<double>(nx_ - 1), static_cast<double>(ny_ - 1),
                                  static_cast<double>(nz_ - 1)} * h_};
}

double GridDensity::operator()(const Vec3& x) const {
  const Vec3 u = (x - origin_) / h_;
  auto locate = [](double t, std::size_t n, std::size_t& i0, double& frac) {
    if (!(t >= 0.0) || t > static_cast<double>(n - 1)) return false;
    if (n == 1) {
      i0 = 0;
      frac = 0.0;
      return true;
    }
    i0 = std::min(static_cast<std::size_t>(t), n - 2);
    frac = t - static_cast<double>(i0);
    return true;
  };
  std::size_t i, j, k;
  double fx, fy, fz;
  if (!locate(u.x, nx_, i, fx) || !locate(u.y, ny_, j, fy) || !locate(u.z, nz_, k, fz)) return 0.0;
  const std::size_t i1 = std::min(i + 1, nx_ - 1);
  const std::size_t j1 = std::min(j + 1, ny_ - 1);
  const std::size_t k1 = std::min(k + 1, nz_ - 1);
  const double c00 = at(i, j, k) * (1 - fx) + at(i1, j, k) * fx;
  const double c10 = at(i, j1, k) * (1 - fx) + at(i1, j1, k) * fx;
  const double c01 = at(i, j, k1) * (1 - fx) + at(i1, j, k1) * fx;
  const double c11 = at(i, j1, k1) * (1 - fx) + at(i1, j1, k1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

std::vector<std::size_t> GridDensity::support_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < values_.size(); ++n)
    if (values_[n] > 0.0) out.push_back(n);
  return out;
}

double GridDensity::brillouin_radius() const {
  double r = 0.0;
  for (std::size_t n : support_nodes()) r = std::max(r, node(n).norm());
  return r;
}

PointSample GridDensity::boundary_nodes() const {
  PointSample out;
  for (std::size_t k = 0; k < nz_; ++k)
    for (std::size_t j = 0; j < ny_; ++j)
      for (std::size_t i = 0; i < nx_; ++i) {
        if (!(at(i, j, k) > 0.0)) continue;
        const bool edge = i == 0 || j == 0 || k == 0 || i + 1 == nx_ || j + 1 == ny_ ||
                          k + 1 == nz_;
        if (edge || !(at(i - 1, j, k) > 0.0) || !(at(i + 1, j, k) > 0.0) ||
            !(at(i, j - 1, k) > 0.0) || !(at(i, j + 1, k) > 0.0) ||
            !(at(i, j, k - 1) > 0.0) || !(at(i, j, k + 1) > 0.0))
          out.push_back(node(index(i, j, k)));
      }
  return out;
}

// --- WeightFn --------------------------------------------------------------

WeightFn WeightFn::constant(double value) {
  require(value > 0.0, "weight: constant must be positive");
  return WeightFn([value](const Vec3&) { return value; }, value == 1.0);
}

WeightFn WeightFn::gaussian(double amplitude, double sigma) {
  require(amplitude > 0.0 && sigma > 0.0, "weight: gaussian parameters must be positive");
  return WeightFn([amplitude, sigma](const Vec3& x) {
    return amplitude * std::exp(-x.norm2() / (2.0 * sigma * sigma));
  });
}

WeightFn WeightFn::radial_polynomial(std::vector<double> coeffs) {
  require(!coeffs.empty() && coeffs.front() > 0.0,
          "weight: radial polynomial needs a positive constant term");
  for (double c : coeffs) require(c >= 0.0, "weight: radial polynomial coefficients must be >= 0");
  return WeightFn([coeffs = std::move(coeffs)](const Vec3& x) {
    const double r = x.norm();
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
    return acc;
  });
}

// --- fields, mass, metrics ---------------------------------------------------

double evaluate(const SPMA& spma, const Vec3& x) { return spma.density(x); }

double evaluate(const GridDensity& grid, const Vec3& x) { return grid(x); }

DensityField as_field(const SPMA& spma) {
  return DensityField([spma](const Vec3& x) { return evaluate(spma, x); }, spma.bounds());
}

DensityField as_field(const GridDensity& grid) {
  return DensityField([grid](const Vec3& x) { return grid(x); }, grid.bounds());
}

DensityField as_field(const SmoothedPointMass& spm) {
  return DensityField([spm](const Vec3& x) { return spm(x); }, spm.support().bounds());
}

DensityField zero_field() {
  return DensityField([](const Vec3&) { return 0.0; }, Box{{0, 0, 0}, {0, 0, 0}});
}

double total_mass(const SPMA& spma) {
  CompensatedSum acc;
  for (const auto& c : spma.components()) acc.add(c.mass());
  return acc.value();
}

double total_mass(const GridDensity& grid) {
  CompensatedSum acc;
  for (double v : grid.values()) acc.add(v);
  const double h = grid.spacing();
  return acc.value() * h * h * h;
}

namespace {

Box metric_box(const DensityField& f, const DensityField& g) {
  const bool f_empty = f.bounds().volume() == 0.0;
  const bool g_empty = g.bounds().volume() == 0.0;
  if (f_empty) return g.bounds();
  if (g_empty) return f.bounds();
  return f.bounds().united(g.bounds());
}

}  // namespace

double lp_metric(const DensityField& f, const DensityField& g, double p, const WeightFn& w,
                 std::optional<double> trunc_radius, const QuadratureConfig& cfg) {
  require(p >= 1.0, "lp_metric: p must be at least 1");
  require(cfg.resolution >= 1, "lp_metric: quadrature resolution must be positive");
  Box box = metric_box(f, g);
  if (trunc_radius) {
    require(*trunc_radius > 0.0, "lp_metric: truncation radius must be positive");
    const double n = *trunc_radius;
    box = box.intersected(Box{{-n, -n, -n}, {n, n, n}});
  }
  if (box.empty()) return 0.0;
  const MidpointGrid grid{box, cfg.resolution};
  auto inside = [&](const Vec3& x) { return !trunc_radius || x.norm() <= *trunc_radius; };

  if (std::isinf(p)) {
    const auto mm = kernels::omp::grid_minmax(
        grid, [&](const Vec3& x) { return std::abs(f(x) - g(x)); }, inside);
    return mm.count == 0 ? 0.0 : mm.max;
  }
  const double sum = kernels::omp::grid_sum(grid, [&](const Vec3& x) {
    if (!inside(x)) return 0.0;
    const double d = std::abs(f(x) - g(x));
    if (d == 0.0) return 0.0;
    return (p == 1.0 ? d : std::pow(d, p)) * w(x);
  });
  const double integral = sum * grid.cell_volume();
  return p == 1.0 ? integral : std::pow(integral, 1.0 / p);
}

double var_over(const DensityField& f, const Ball& ball, const QuadratureConfig& cfg) {
  require(ball.radius > 0.0, "var_over: ball radius must be positive");
  const MidpointGrid grid{ball.bounds(), cfg.resolution};
  const auto mm = kernels::omp::grid_minmax(
      grid, [&](const Vec3& x) { return f(x); }, [&](const Vec3& x) { return ball.contains(x); });
  return mm.count == 0 ? 0.0 : mm.max - mm.min;
}

double mean_over(const DensityField& f, const Ball& ball, const QuadratureConfig& cfg) {
  require(ball.radius > 0.0, "mean_over: ball radius must be positive");
  const MidpointGrid grid{ball.bounds(), cfg.resolution};
  const double sum = kernels::omp::grid_sum(
      grid, [&](const Vec3& x) { return ball.contains(x) ? f(x) : 0.0; });
  const double count = kernels::omp::grid_sum(
      grid, [&](const Vec3& x) { return ball.contains(x) ? 1.0 : 0.0; });
  return count == 0.0 ? f(ball.center) : sum / count;
}

}  // namespace shelab
