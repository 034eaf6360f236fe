#include "shelab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <functional>
#include <queue>
#include <unordered_map>

#include "shelab/error.hpp"
#include "shelab/kernels.hpp"
#include "shelab/potential.hpp"

namespace shelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared 1-D distance transform (lower envelope of parabolas).
void edt_line(std::vector<double>& f, std::size_t n, std::size_t stride, std::size_t start,
              std::vector<double>& d, std::vector<std::size_t>& v, std::vector<double>& z) {
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  auto val = [&](std::size_t q) { return f[start + q * stride]; };
  for (std::size_t q = 1; q < n; ++q) {
    if (val(q) == kInf) continue;
    if (val(v[k]) == kInf) {
      v[k] = q;
      continue;
    }
    double s;
    while (true) {
      const double dq = static_cast<double>(q);
      const double dv = static_cast<double>(v[k]);
      s = ((val(q) + dq * dq) - (val(v[k]) + dv * dv)) / (2.0 * dq - 2.0 * dv);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (val(v[0]) == kInf) {
    for (std::size_t q = 0; q < n; ++q) d[q] = kInf;
  } else {
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const double dq = static_cast<double>(q);
      while (z[k + 1] < dq) ++k;
      const double dv = static_cast<double>(v[k]);
      d[q] = (dq - dv) * (dq - dv) + val(v[k]);
    }
  }
  for (std::size_t q = 0; q < n; ++q) f[start + q * stride] = d[q];
}

// Distance (lattice units) from every node to the nearest zero-valued node,
// treating the layer just outside the lattice as zero.
std::vector<double> distance_to_zero_nodes(const GridDensity& f) {
  const std::size_t nx = f.nx() + 2;
  const std::size_t ny = f.ny() + 2;
  const std::size_t nz = f.nz() + 2;
  std::vector<double> g(nx * ny * nz, 0.0);
  for (std::size_t k = 0; k < f.nz(); ++k)
    for (std::size_t j = 0; j < f.ny(); ++j)
      for (std::size_t i = 0; i < f.nx(); ++i)
        g[(i + 1) + nx * ((j + 1) + ny * (k + 1))] = f.at(i, j, k) > 0.0 ? kInf : 0.0;

  const std::size_t longest = std::max({nx, ny, nz});
  std::vector<double> d(longest);
  std::vector<std::size_t> v(longest);
  std::vector<double> z(longest + 1);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j) edt_line(g, nx, 1, nx * (j + ny * k), d, v, z);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t i = 0; i < nx; ++i) edt_line(g, ny, nx, i + nx * ny * k, d, v, z);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) edt_line(g, nz, nx * ny, i + nx * j, d, v, z);

  std::vector<double> out(f.values().size());
  for (std::size_t k = 0; k < f.nz(); ++k)
    for (std::size_t j = 0; j < f.ny(); ++j)
      for (std::size_t i = 0; i < f.nx(); ++i)
        out[f.index(i, j, k)] = std::sqrt(g[(i + 1) + nx * ((j + 1) + ny * (k + 1))]);
  return out;
}

// Visits lattice nodes within distance r of p as (index, distance).
template <class Fn>
void for_nodes_in_ball(const GridDensity& f, const Vec3& p, double r, Fn&& fn) {
  const double h = f.spacing();
  const Vec3 lo = (p - Vec3{r, r, r} - f.origin()) / h;
  const Vec3 hi = (p + Vec3{r, r, r} - f.origin()) / h;
  auto clamp_lo = [](double t) { return static_cast<std::size_t>(std::max(0.0, std::ceil(t))); };
  auto clamp_hi = [](double t, std::size_t n) {
    return static_cast<std::ptrdiff_t>(std::min(static_cast<double>(n) - 1.0, std::floor(t)));
  };
  const std::ptrdiff_t i1 = clamp_hi(hi.x, f.nx());
  const std::ptrdiff_t j1 = clamp_hi(hi.y, f.ny());
  const std::ptrdiff_t k1 = clamp_hi(hi.z, f.nz());
  for (auto k = static_cast<std::ptrdiff_t>(clamp_lo(lo.z)); k <= k1; ++k)
    for (auto j = static_cast<std::ptrdiff_t>(clamp_lo(lo.y)); j <= j1; ++j)
      for (auto i = static_cast<std::ptrdiff_t>(clamp_lo(lo.x)); i <= i1; ++i) {
        const std::size_t idx = f.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                        static_cast<std::size_t>(k));
        const double d = distance(f.node(idx), p);
        if (d <= r) fn(idx, d);
      }
}

// Largest radius about node p whose node variation stays below budget.
// A node bounds the trilinear f on the ball when one of its eight cells meets
// the ball, i.e. when the cube of half-width h about the node does.
double cube_distance(const Vec3& c, const Vec3& q, double h) {
  const auto gap = [h](double t) { return std::max(std::abs(t) - h, 0.0); };
  const Vec3 d = c - q;
  return std::sqrt(gap(d.x) * gap(d.x) + gap(d.y) * gap(d.y) + gap(d.z) * gap(d.z));
}

// Nodes whose cells meet the ball of radius r about c, as (cube distance, value).
std::vector<std::pair<double, double>> cell_corner_values(const GridDensity& f, const Vec3& c,
                                                          double r) {
  const double h = f.spacing();
  std::vector<std::pair<double, double>> nodes;
  for_nodes_in_ball(f, c, r + std::sqrt(3.0) * h, [&](std::size_t idx, double) {
    const double t = cube_distance(c, f.node(idx), h);
    if (t <= r) nodes.emplace_back(t, f.values()[idx]);
  });
  return nodes;
}

// Largest radius about node p, at most r, over which f varies by less than budget.
double variation_capped_radius(const GridDensity& f, std::size_t p, double r, double budget) {
  auto nodes = cell_corner_values(f, f.node(p), r);
  std::sort(nodes.begin(), nodes.end());
  double lo = kInf;
  double hi = -kInf;
  for (const auto& [t, v] : nodes) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (hi - lo >= budget) return t * (1.0 - 1e-12);
  }
  return r;
}

// Upper bound on the variation of the trilinear f over the ball.
double node_variation(const GridDensity& f, const Ball& b) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& [t, v] : cell_corner_values(f, b.center, b.radius)) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi >= lo ? hi - lo : 0.0;
}

// Radial profile equal to the angular average of f on spheres about c,
// brought linearly to zero over the last taper_width (at most a / 2).
RadialProfile radial_average_profile(const GridDensity& f, const Vec3& c, double a,
                                     double taper_width) {
  static const auto dirs = fibonacci_directions(64);
  const double step = std::min(f.spacing() / 4.0, a / 8.0);
  const double taper = std::clamp(taper_width, std::min(step / 2.0, 1e-3 * a), a / 2.0);
  auto average = [&](double s) {
    if (s == 0.0) return f(c);
    double acc = 0.0;
    for (const Vec3& d : dirs) acc += f(c + d * s);
    return acc / static_cast<double>(dirs.size());
  };
  std::vector<double> radii;
  std::vector<double> values;
  for (double s = 0.0; s < a - taper; s += step) {
    radii.push_back(s);
    values.push_back(average(s));
  }
  radii.push_back(a - taper);
  values.push_back(average(a - taper));
  radii.push_back(a);
  values.push_back(0.0);
  return RadialProfile::table(std::move(radii), std::move(values));
}

struct Candidate {
  double radius;
  std::size_t node;
  bool operator<(const Candidate& o) const {
    if (radius != o.radius) return radius < o.radius;
    return node > o.node;
  }
};

VerificationItem check_less(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured < bound};
}

// Sampled Hausdorff distances between the support of f and a union of balls.
struct SetDistances {
  double solid = 0.0;
  double boundary = 0.0;
};

SetDistances measure_set_distances(const GridDensity& f, const BallRegion& region) {
  SetDistances out;
  const double h = f.spacing();
  double to_region = 0.0;
  for (std::size_t n : f.support_nodes())
    to_region = std::max(to_region, region.distance_to(f.node(n)));

  const PointSample boundary_f = f.boundary_nodes();
  PointSample region_samples = boundary_sample(region, h);
  for (const Ball& b : region.balls()) region_samples.push_back(b.center);
  PointSample outside;
  for (const Vec3& y : region_samples)
    if (!(f(y) > 0.0)) outside.push_back(y);
  const double to_f =
      outside.empty() ? 0.0 : kernels::omp::directed_hausdorff(outside, boundary_f);
  out.solid = std::max(to_region, to_f);

  const PointSample boundary_region = boundary_sample(region, h);
  out.boundary = hausdorff_distance(boundary_f, boundary_region);
  return out;
}

// Balls bucketed for point queries; bucket lists keep insertion order.
class BallLookup {
 public:
  BallLookup(std::span<const Ball> balls, double cell) : balls_(balls), index_(bounds(balls), cell) {
    for (std::size_t i = 0; i < balls.size(); ++i) index_.insert(i, balls[i]);
  }
  // Smallest index of a ball whose open interior holds x and which pred accepts.
  template <class Pred>
  std::optional<std::size_t> first_open(const Vec3& x, Pred&& pred) const {
    for (std::size_t i : index_.candidates(x))
      if (balls_[i].contains_open(x) && pred(i)) return i;
    return std::nullopt;
  }
  bool in_open(const Vec3& x) const {
    return first_open(x, [](std::size_t) { return true; }).has_value();
  }

 private:
  static Box bounds(std::span<const Ball> balls) {
    Box box = balls.front().bounds();
    for (const Ball& b : balls) box = box.united(b.bounds());
    return box;
  }
  std::span<const Ball> balls_;
  BallIndex index_;
};

std::size_t uncovered_support_nodes(const GridDensity& f, const BallRegion& region) {
  const BallLookup lookup(region.balls(), 4.0 * f.spacing());
  std::size_t missing = 0;
  for (std::size_t n : f.support_nodes())
    if (!lookup.in_open(f.node(n))) ++missing;
  return missing;
}

// Amplitudes c_j in [lo_j, hi_j] for unit quadratic bumps on the given balls,
// least-squares fitted to target on a lattice of spacing step by cyclic
// coordinate descent.
std::vector<double> fit_bump_amplitudes(std::span<const Ball> balls, std::span<const double> lo,
                                        std::span<const double> hi,
                                        const std::function<double(const Vec3&)>& target,
                                        double step, int sweeps) {
  const std::size_t n = balls.size();
  Box box = balls.front().bounds();
  for (const Ball& b : balls) box = box.united(b.bounds());
  const auto cells = [&](double e) { return static_cast<std::size_t>(std::ceil(e / step)) + 1; };
  const std::size_t nx = cells(box.hi.x - box.lo.x);
  const std::size_t ny = cells(box.hi.y - box.lo.y);

  std::unordered_map<std::size_t, std::size_t> compact;
  std::vector<Vec3> points;
  std::vector<std::vector<std::pair<std::size_t, double>>> support(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Ball& b = balls[j];
    const RadialProfile unit = RadialProfile::quadratic_bump(b.radius, 1.0);
    const Box bb = b.bounds();
    const auto first = [&](double v, double o) {
      return static_cast<std::size_t>(std::max(0.0, std::ceil((v - o) / step)));
    };
    const auto last = [&](double v, double o) {
      return static_cast<std::size_t>(std::floor((v - o) / step));
    };
    for (std::size_t k = first(bb.lo.z, box.lo.z); k <= last(bb.hi.z, box.lo.z); ++k)
      for (std::size_t jj = first(bb.lo.y, box.lo.y); jj <= last(bb.hi.y, box.lo.y); ++jj)
        for (std::size_t i = first(bb.lo.x, box.lo.x); i <= last(bb.hi.x, box.lo.x); ++i) {
          const Vec3 x = box.lo + Vec3{static_cast<double>(i), static_cast<double>(jj),
                                       static_cast<double>(k)} * step;
          const double phi = unit(distance(x, b.center));
          if (!(phi > 0.0)) continue;
          const auto [it, fresh] = compact.try_emplace(i + nx * (jj + ny * k), points.size());
          if (fresh) points.push_back(x);
          support[j].emplace_back(it->second, phi);
        }
  }

  std::vector<double> residual(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) residual[q] = target(points[q]);
  std::vector<double> c(lo.begin(), lo.end());
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& [q, phi] : support[j]) residual[q] -= c[j] * phi;

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) {
      double num = 0.0;
      double den = 0.0;
      for (const auto& [q, phi] : support[j]) {
        num += phi * residual[q];
        den += phi * phi;
      }
      if (den == 0.0) continue;
      const double next = std::clamp(c[j] + num / den, lo[j], hi[j]);
      const double delta = next - c[j];
      if (delta == 0.0) continue;
      for (const auto& [q, phi] : support[j]) residual[q] -= delta * phi;
      c[j] = next;
    }
  }
  return c;
}

}  // namespace

BallRegion Filling::region() const {
  std::vector<Ball> all = filling;
  all.insert(all.end(), covering.begin(), covering.end());
  return BallRegion(std::move(all));
}

Filling build_filling(const GridDensity& f, const FillingParams& p) {
  require(p.delta > 0.0 && p.eps > 0.0, "spherical_filling: delta and eps must be positive");
  require(p.resolution >= 1, "spherical_filling: resolution must be positive");
  require(p.min_radius >= 0.0, "spherical_filling: min_radius must be non-negative");

  const double h = f.spacing();
  const double cell = h * h * h;
  const double budget = std::min(p.delta, p.eps);
  const auto support = f.support_nodes();
  const auto& values = f.values();

  Filling out;
  out.spacing = h;
  out.support_volume = static_cast<double>(support.size()) * cell;
  const double residual_budget = budget / 10.0;
  const double var_budget = budget / (10.0 * out.support_volume);
  const double min_radius = p.min_radius > 0.0 ? p.min_radius : h;

  const auto dzero = distance_to_zero_nodes(f);
  // Variation cap per node: cap_radius is exact up to cap_searched.
  std::vector<double> cap_radius(values.size(), kInf);
  std::vector<double> cap_searched(values.size(), 0.0);
  // Upper bound on the radius keeping a ball at the node clear of placed balls.
  std::vector<double> clearance(values.size(), kInf);
  std::vector<char> covered(values.size(), 0);

  CompensatedSum residual;
  for (std::size_t n : support) residual.add(values[n] * cell);
  double residual_mass = residual.value();

  auto admissible = [&](std::size_t n) {
    double r = std::min(dzero[n] * h * (1.0 - 1e-9), clearance[n]);
    if (r > cap_searched[n]) {
      cap_radius[n] = variation_capped_radius(f, n, r, var_budget);
      cap_searched[n] = r;
    }
    return std::min(r, cap_radius[n]);
  };

  std::priority_queue<Candidate> heap;
  for (std::size_t n : support) heap.push({dzero[n] * h * (1.0 - 1e-9), n});

  while (residual_mass >= residual_budget && !heap.empty()) {
    const Candidate top = heap.top();
    heap.pop();
    if (top.radius < min_radius) break;
    const double r = admissible(top.node);
    if (r < top.radius * (1.0 - 1e-12)) {
      if (r >= min_radius) heap.push({r, top.node});
      continue;
    }
    const Vec3 c = f.node(top.node);
    const Ball ball{c, r};
    out.filling.push_back(ball);
    out.max_variation = std::max(out.max_variation, node_variation(f, ball));
    // Remaining candidates have radius <= r, so only nodes within 2r can be constrained.
    for_nodes_in_ball(f, c, 2.0 * r, [&](std::size_t idx, double d) {
      clearance[idx] = std::min(clearance[idx], std::max(0.0, d - r));
      if (d <= r && !covered[idx] && values[idx] > 0.0) {
        covered[idx] = 1;
        residual_mass -= values[idx] * cell;
      }
    });
  }

  // Residual mass by direct quadrature of f outside the filling.
  if (!out.filling.empty()) {
    const BallRegion filled(out.filling);
    const MidpointGrid grid{f.bounds(), 2 * p.resolution};
    out.residual_mass = kernels::omp::grid_sum(grid, [&](const Vec3& x) {
                          return filled.contains(x) ? 0.0 : f(x);
                        }) * grid.cell_volume();
  } else {
    out.residual_mass = total_mass(f);
  }

  // Covering balls on every support node outside the filling balls' cores.
  // Filling profiles taper to zero over their outer h, and the covering balls
  // in that skin make up the difference.
  const double cover_radius = h;
  const double skin = h;
  std::vector<Ball> cores;
  for (const Ball& b : out.filling)
    if (b.radius > skin) cores.push_back({b.center, b.radius - skin});
  if (!cores.empty()) {
    const BallLookup core(cores, 4.0 * h);
    for (std::size_t n : support)
      if (!core.in_open(f.node(n))) out.covering.push_back({f.node(n), cover_radius});
  } else {
    for (std::size_t n : support) out.covering.push_back({f.node(n), cover_radius});
  }

  // Extremal cap at the farthest support node.
  std::size_t far = support.front();
  for (std::size_t n : support)
    if (f.node(n).norm() > f.node(far).norm()) far = n;
  out.covering.push_back({f.node(far), std::min(p.eps / 4.0, cover_radius)});
  out.extremal_cap = out.covering.size() - 1;
  return out;
}

Filling spherical_filling(const GridDensity& f, const FillingParams& p) {
  Filling out = build_filling(f, p);
  const double budget = std::min(p.delta, p.eps);
  if (out.residual_mass >= budget / 10.0)
    throw NumericError("a1 violated: residual mass " + std::to_string(out.residual_mass) +
                       " not below " + std::to_string(budget / 10.0) +
                       " at this grid resolution");
  const double var_budget = budget / (10.0 * out.support_volume);
  if (out.max_variation >= var_budget)
    throw NumericError("a2 violated: filling variation " + std::to_string(out.max_variation) +
                       " not below " + std::to_string(var_budget));
  return out;
}

bool ApproximationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const VerificationItem& ApproximationReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ValidationError("no verification item named " + name);
}

nlohmann::json ApproximationReport::to_json() const {
  nlohmann::json j;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back(
        {{"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
  return j;
}

ApproximationReport verify_approximation(const GridDensity& f, const SPMA& spma,
                                         const FillingParams& p, const Filling* filling) {
  ApproximationReport rep;
  auto& checks = rep.checks;
  const double budget = std::min(p.delta, p.eps);
  const double h = f.spacing();
  const QuadratureConfig quad{p.resolution};
  const QuadratureConfig ball_quad{24};
  const DensityField field_f = as_field(f);
  const double R_f = f.brillouin_radius();
  const auto& comps = spma.components();

  if (filling != nullptr) {
    checks.push_back(check_less("a1_residual_mass", filling->residual_mass, budget / 10.0));
    checks.push_back(check_less("a2_filling_variation", filling->max_variation,
                                budget / (10.0 * filling->support_volume)));
    const BallRegion k_prime = filling->region();
    checks.push_back(check_less("a3_open_cover_missing_nodes",
                                static_cast<double>(uncovered_support_nodes(f, k_prime)), 0.5));
    const auto dist = measure_set_distances(f, k_prime);
    checks.push_back(check_less("a4_set_distance", dist.solid, p.eps));
    checks.push_back(check_less("a4_boundary_distance", dist.boundary, p.eps));
    checks.push_back(check_less("a5_brillouin_gap", std::abs(R_f - brillouin_radius(k_prime)),
                                p.eps));
  }

  double worst_edge = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i)
    worst_edge = std::max(worst_edge, comps[i].profile(comps[i].profile.outer_radius()));
  checks.push_back({"a6_support_edge_value", worst_edge, 0.0, worst_edge == 0.0});

  if (filling != nullptr && comps.size() == filling->filling.size() + filling->covering.size()) {
    const double var_budget = budget / (10.0 * filling->support_volume);
    double worst_fit = 0.0;
    for (std::size_t i = 0; i < filling->filling.size(); ++i) {
      const Ball& b = filling->filling[i];
      const SmoothedPointMass& spm = comps[i];
      const MidpointGrid grid{b.bounds(), ball_quad.resolution};
      const double mu = kernels::omp::grid_sum(grid, [&](const Vec3& x) {
                          return b.contains(x) ? std::abs(f(x) - spm(x)) : 0.0;
                        }) * grid.cell_volume();
      const double bound = std::max(var_over(field_f, b, ball_quad), var_budget) * b.volume();
      worst_fit = std::max(worst_fit, mu / bound);
    }
    checks.push_back(check_less("a7_filling_fit_ratio", worst_fit, 1.0));
    double worst_cover = 0.0;
    for (std::size_t j = 0; j < filling->covering.size(); ++j) {
      const Ball& b = filling->covering[j];
      const SmoothedPointMass& spm = comps[filling->filling.size() + j];
      const double var_l = spm.profile.peak();
      worst_cover = std::max(worst_cover, var_l / mean_over(field_f, b, ball_quad));
    }
    checks.push_back(check_less("a8_covering_variation_ratio", worst_cover, 1.0));
  }

  const BallRegion k_lambda = spma.support();
  const double R_l = brillouin_radius(k_lambda);
  checks.push_back(
      {"p1_support_connected", k_lambda.connected() ? 1.0 : 0.0, 1.0, k_lambda.connected()});
  checks.push_back(check_less("p2_open_cover_missing_nodes",
                              static_cast<double>(uncovered_support_nodes(f, k_lambda)), 0.5));
  const double mu1 = lp_metric(field_f, as_field(spma), 1.0, WeightFn::constant(), std::nullopt,
                               quad);
  checks.push_back(check_less("p3_l1_distance", mu1, p.delta));
  const auto dist = measure_set_distances(f, k_lambda);
  checks.push_back(check_less("p4_set_distance", dist.solid, p.eps));
  checks.push_back(check_less("p5_boundary_distance", dist.boundary, p.eps));
  checks.push_back(check_less("p6_brillouin_gap", std::abs(R_f - R_l), p.eps));

  std::vector<double> norms;
  for (const auto& c : comps) norms.push_back(c.center.norm());
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  double min_gap = kInf;
  for (std::size_t i = 1; i < sorted.size(); ++i) min_gap = std::min(min_gap, sorted[i] - sorted[i - 1]);
  if (sorted.size() < 2) min_gap = 1.0;
  checks.push_back({"p7_min_norm_gap", min_gap, 0.0, min_gap > 0.0});

  const auto extremal =
      static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
  checks.push_back(
      check_less("extremal_radius", comps[extremal].profile.outer_radius(), p.eps / 2.0));
  checks.push_back(check_less("extremal_gap", R_l - norms[extremal], p.eps / 2.0));

  // Potential continuity at this instance: ||V_f - V_l||_{N,1,1} <= D ||f - l||_inf.
  {
    const double N = std::max(R_f + h * std::sqrt(3.0), R_l) * 1.01;
    const double sup = lp_metric(field_f, as_field(spma), kInf, WeightFn::constant(), std::nullopt,
                                 quad);
    const double lhs = potential_difference_l1(field_f, as_field(spma), N, {}, 24, 12);
    const double D = potential_lipschitz_constant(N);
    checks.push_back({"c_potential_bound", lhs, D * sup, lhs <= D * sup});
  }

  // Non-descent evidence: R_c of the equivalent array against R(lambda) - eps.
  {
    const auto masses = spma.equivalent_point_masses();
    const auto coeffs = coeffs_from_point_masses(masses, R_l, 400);
    double rc = 0.0;
    try {
      rc = estimate_rc(coeffs, 64);
    } catch (const NumericError&) {
      rc = 0.0;
    }
    checks.push_back({"e_rc_above_descent_radius", rc, R_l - p.eps, rc > R_l - p.eps});
  }
  return rep;
}

SPMA assemble_spma(const GridDensity& f, const Filling& filling) {
  const double h = f.spacing();
  const QuadratureConfig ball_quad{24};
  const DensityField field_f = as_field(f);

  // Supports grow by twice the centre shift so touching balls stay connected.
  const double shift = 1e-6 * h;
  const double grow = 2.0 * shift;
  std::vector<SmoothedPointMass> comps;
  for (const Ball& b : filling.filling)
    comps.push_back({b.center, radial_average_profile(f, b.center, b.radius + grow, h)});

  // Covering amplitudes fitted to what the filling leaves of f, each kept
  // strictly below the mean of f over its ball.
  const std::size_t nc = filling.covering.size();
  std::vector<double> lo(nc);
  std::vector<double> hi(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double mean = mean_over(field_f, filling.covering[j], ball_quad);
    if (!(mean > 0.0))
      throw NumericError("a8 violated: covering ball over a region where f vanishes");
    lo[j] = 1e-3 * mean;
    hi[j] = 0.9 * mean;
  }
  std::vector<Ball> grown_filling;
  for (const Ball& b : filling.filling) grown_filling.push_back({b.center, b.radius + grow});
  std::optional<BallIndex> filled;
  if (!grown_filling.empty()) {
    filled.emplace(f.bounds().united(BallRegion(grown_filling).bounds()), 4.0 * h);
    for (std::size_t i = 0; i < grown_filling.size(); ++i) filled->insert(i, grown_filling[i]);
  }
  const auto target = [&](const Vec3& x) {
    double v = f(x);
    if (filled)
      for (std::size_t i : filled->candidates(x)) v -= comps[i](x);
    return v;
  };
  const auto amplitude = fit_bump_amplitudes(filling.covering, lo, hi, target, h / 2.0, 40);
  for (std::size_t j = 0; j < nc; ++j) {
    const Ball& b = filling.covering[j];
    comps.push_back({b.center, RadialProfile::quadratic_bump(b.radius + grow, amplitude[j])});
  }

  std::vector<Vec3> centers;
  for (const auto& c : comps) centers.push_back(c.center);
  const auto moved = general_position_perturb(centers, shift);
  for (std::size_t i = 0; i < comps.size(); ++i) comps[i].center = moved[i];

  return SPMA(std::move(comps));
}

ApproximationResult spma_approximate(const GridDensity& f, const FillingParams& p) {
  Filling filling = build_filling(f, p);
  SPMA spma = assemble_spma(f, filling);
  ApproximationReport report = verify_approximation(f, spma, p, &filling);
  for (const auto& c : report.checks)
    if (!c.pass && c.name.front() == 'p')
      throw NumericError(c.name + " violated: measured " + std::to_string(c.measured) +
                         ", bound " + std::to_string(c.bound));
  return {std::move(spma), std::move(filling), std::move(report)};
}

SPMA build_snowman(const SnowmanParams& p) {
  require(p.gamma > 0.0, "build_snowman: gamma must be positive");
  require(p.m1 > 0.0 && p.m2 > 0.0, "build_snowman: masses must be positive");
  const double a = 1.0 + p.gamma;
  auto profile_with_mass = [&](double mass) {
    RadialProfile unit = [&] {
      switch (p.profile) {
        case ProfileKind::quadratic_bump: return RadialProfile::quadratic_bump(a, 1.0);
        case ProfileKind::cosine_bump: return RadialProfile::cosine_bump(a, 1.0);
        case ProfileKind::constant_taper: return RadialProfile::constant_taper(a, 1.0, a / 2.0);
        case ProfileKind::table: break;
      }
      throw ValidationError("build_snowman: table profiles are not supported");
    }();
    return unit.scaled(mass / unit.total_mass());
  };
  return SPMA({{{1.0, 0.0, 0.0}, profile_with_mass(p.m1)},
               {{-1.0, 0.0, 0.0}, profile_with_mass(p.m2)}});
}

double snowman_waist_radius(double gamma) {
  require(gamma > 0.0, "snowman_waist_radius: gamma must be positive");
  // (1 + g)^2 - 1 = g (2 + g), without cancellation for small g.
  return std::sqrt(gamma * (2.0 + gamma));
}

SnowmanDescent snowman_descends_to_topography(const SnowmanParams& p, bool estimate_rc_flag,
                                              const DescentConfig& cfg) {
  const SPMA spma = build_snowman(p);
  const auto masses = spma.equivalent_point_masses();
  SnowmanDescent out;
  out.gamma = p.gamma;
  out.waist_radius = snowman_waist_radius(p.gamma);
  out.pointmass_radius = pointmass_brillouin_radius(masses);
  out.spma_radius = brillouin_radius(spma.support());
  out.descends = out.waist_radius > out.pointmass_radius;
  if (estimate_rc_flag) {
    const auto c = coeffs_from_point_masses(masses, out.spma_radius, cfg.n_max, cfg.grav);
    out.rc = estimate_rc(c, cfg.directions);
  }
  return out;
}

std::pair<double, double> snowman_threshold_bracket(double gamma_lo, double gamma_hi, double tol) {
  require(gamma_lo > 0.0 && gamma_hi > gamma_lo, "snowman threshold: need 0 < lo < hi");
  require(tol > 0.0, "snowman threshold: tolerance must be positive");
  auto gap = [](double g) {
    return snowman_descends_to_topography({g, 1.0, 1.0}, false).waist_radius - 1.0;
  };
  double lo = gamma_lo;
  double hi = gamma_hi;
  if (!(gap(lo) <= 0.0 && gap(hi) > 0.0))
    throw NumericError("snowman threshold: no sign change of waist - 1 in the interval");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  return {lo, hi};
}

}  // namespace shelab
