#include "neutral/newtonian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "neutral/error.hpp"
#include "neutral/simd/kernels.hpp"

namespace neutral {
namespace {

std::vector<double> combination(const Discretization& inner, const Discretization& outer, double f,
                                std::span<const Vec2> pts) {
  const std::vector<double> nd = newtonian_potential(inner, pts);
  const std::vector<double> no = newtonian_potential(outer, pts);
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = nd[i] - f * no[i];
  return v;
}

// -(S[n1], S[n2]) on the curve's own nodes.
std::vector<Vec2> gradient_on_curve(const Discretization& d) {
  const DenseOperator s = single_layer_on_boundary_matrix(d);
  const Eigen::Map<const Eigen::VectorXd> n1(d.nx.data(), static_cast<Eigen::Index>(d.n));
  const Eigen::Map<const Eigen::VectorXd> n2(d.ny.data(), static_cast<Eigen::Index>(d.n));
  const Eigen::VectorXd g1 = s * n1;
  const Eigen::VectorXd g2 = s * n2;
  std::vector<Vec2> g(d.n);
  for (std::size_t i = 0; i < d.n; ++i) g[i] = {-g1(static_cast<Eigen::Index>(i)), -g2(static_cast<Eigen::Index>(i))};
  return g;
}

}  // namespace

std::vector<double> newtonian_potential(const Discretization& d, std::span<const Vec2> points, NearZone zone) {
  check_near_zone(d, points, zone);
  std::vector<double> mx(d.n), my(d.n);
  for (std::size_t j = 0; j < d.n; ++j) {
    mx[j] = d.nx[j] * d.weight[j];
    my[j] = d.ny[j] * d.weight[j];
  }
  const auto& k = simd::active_kernels();
  const simd::SourceView src{d.x.data(), d.y.data(), d.n};
  const double scale = 1.0 / (8.0 * std::numbers::pi);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = scale * k.newton_sum(points[i].x, points[i].y, src, mx.data(), my.data());
  }
  return out;
}

std::vector<Vec2> newtonian_gradient(const Discretization& d, std::span<const Vec2> points, NearZone zone) {
  const std::vector<double> s1 = single_layer_off(d, d.nx, points, zone);
  const std::vector<double> s2 = single_layer_off(d, d.ny, points, zone);
  std::vector<Vec2> g(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) g[i] = {-s1[i], -s2[i]};
  return g;
}

QuadraticFit fit_quadratic(std::span<const Vec2> points, std::span<const double> values) {
  if (points.size() != values.size()) throw ValidationError("fit needs one value per point");
  if (points.size() < 12) throw ValidationError("quadratic fit needs at least 12 points");
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(m, 5);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec2 p = points[static_cast<std::size_t>(i)];
    a.row(i) << p.x * p.x, p.y * p.y, -p.x, -p.y, 1.0;
    b(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  QuadraticFit fit;
  fit.d1 = c(0);
  fit.d2 = c(1);
  fit.c1 = c(2);
  fit.c2 = c(3);
  fit.C = c(4);
  fit.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
  fit.points = points.size();
  return fit;
}

std::vector<Vec2> core_fit_grid(const Curve& inner, std::size_t per_ring) {
  const complex c = inner.coeff(0);
  std::vector<Vec2> pts{{c.real(), c.imag()}};
  for (double s : {0.2, 0.4, 0.6}) {
    for (std::size_t i = 0; i < per_ring; ++i) {
      const double t = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5 * s) / static_cast<double>(per_ring);
      const complex z = c + s * (inner.point(t) - c);
      pts.push_back({z.real(), z.imag()});
    }
  }
  return pts;
}

IdentityCheck combined_identity_check(const CoatedInclusion& inc, double f, double dmu, std::size_t nodes) {
  const Discretization inner = discretize(inc.inner, nodes);
  const Discretization outer = discretize(inc.outer, nodes);
  IdentityCheck out;
  out.f = f;
  out.predicted_d1 = (1.0 - f * (1.0 + dmu)) / 4.0;
  out.predicted_d2 = (1.0 - f * (1.0 - dmu)) / 4.0;

  const std::vector<Vec2> grid = core_fit_grid(inc.inner);
  const std::vector<double> vals = combination(inner, outer, f, grid);
  out.fit = fit_quadratic(grid, vals);

  const double radius = 3.0 * inc.outer.max_radius();
  const Vec2 c = inc.outer.center();
  std::vector<Vec2> probe(64);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(probe.size());
    probe[i] = {c.x + radius * std::cos(a), c.y + radius * std::sin(a)};
  }
  const std::vector<double> ext = combination(inner, outer, f, probe);
  double mean = 0.0;
  for (double v : ext) mean += v;
  mean /= static_cast<double>(ext.size());
  for (double v : ext) out.exterior_residual = std::max(out.exterior_residual, std::abs(v - mean));
  return out;
}

IdentityCheck combined_identity_check(const CoatedInclusion& inc, const DesignResult& dr, std::size_t nodes) {
  return combined_identity_check(inc, dr.f, dr.dmu, nodes);
}

FreeBvpReport free_bvp_residual(const CoatedInclusion& inc, double f, double beta, std::size_t nodes) {
  if (!(f > 0.0 && f < 1.0)) throw ValidationError("volume fraction must lie in (0, 1)");
  const Discretization inner = discretize(inc.inner, nodes);
  const Discretization outer = discretize(inc.outer, nodes);
  FreeBvpReport r;

  // Outer curve: grad N_Omega from the on-curve single layer (continuous
  // across the curve), grad N_D from the regular off-curve rule.
  {
    const std::vector<Vec2> pts = [&] {
      std::vector<Vec2> p(outer.n);
      for (std::size_t i = 0; i < outer.n; ++i) p[i] = outer.node(i);
      return p;
    }();
    const std::vector<Vec2> gd = newtonian_gradient(inner, pts);
    const std::vector<Vec2> go = gradient_on_curve(outer);
    for (std::size_t i = 0; i < outer.n; ++i) {
      const Vec2 gw = f * pts[i] + 2.0 * (gd[i] - f * go[i]);
      r.outer_bc = std::max(r.outer_bc, norm(gw - f * pts[i]));
    }
  }
  {
    std::vector<Vec2> pts(inner.n);
    for (std::size_t i = 0; i < inner.n; ++i) pts[i] = inner.node(i);
    const std::vector<Vec2> gd = gradient_on_curve(inner);
    const std::vector<Vec2> go = newtonian_gradient(outer, pts);
    for (std::size_t i = 0; i < inner.n; ++i) {
      const Vec2 gw = f * pts[i] + 2.0 * (gd[i] - f * go[i]);
      const Vec2 target = pts[i] + beta * Vec2{pts[i].x, -pts[i].y};
      r.inner_bc = std::max(r.inner_bc, norm(gw - target));
    }
  }

  // Finite-difference Laplacian at shell points.
  double diameter = 0.0;
  for (std::size_t i = 0; i < outer.n; ++i)
    for (std::size_t j = i + 1; j < outer.n; j += 7) diameter = std::max(diameter, norm(outer.node(i) - outer.node(j)));
  const double h = 1e-3 * diameter;
  // Candidates between the curves, splitting the gap in proportion to the two
  // near-zone widths; those still inside a near zone (thin parts of the
  // shell) are skipped.
  const NearZone zone;
  const double lim_in = zone.limit(inner) + 2.0 * h, lim_out = zone.limit(outer) + 2.0 * h;
  const double split = lim_in / (lim_in + lim_out);
  constexpr std::size_t kCandidates = 64;
  std::vector<Vec2> stencil;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kCandidates; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / kCandidates;
    const complex zc = inc.inner.point(t) + split * (inc.outer.point(t) - inc.inner.point(t));
    const Vec2 p{zc.real(), zc.imag()};
    const double di = inner.node_distance(p), dout = outer.node_distance(p);
    closest = std::min(closest, std::min(di, dout));
    if (di < lim_in || dout < lim_out) continue;
    stencil.insert(stencil.end(), {p, p + Vec2{h, 0}, p - Vec2{h, 0}, p + Vec2{0, h}, p - Vec2{0, h},
                                   p + Vec2{2 * h, 0}, p - Vec2{2 * h, 0}, p + Vec2{0, 2 * h}, p - Vec2{0, 2 * h}});
  }
  const std::size_t shell_points = stencil.size() / 9;
  if (shell_points < 8) {
    throw NearZoneError("shell too thin for the harmonicity check outside the near zones", closest,
                        std::max(lim_in, lim_out));
  }
  const std::vector<double> nd = newtonian_potential(inner, stencil);
  const std::vector<double> no = newtonian_potential(outer, stencil);
  auto w = [&](std::size_t k) {
    const Vec2 p = stencil[k];
    return 0.5 * f * dot(p, p) + 2.0 * (nd[k] - f * no[k]);
  };
  for (std::size_t i = 0; i < shell_points; ++i) {
    // Fourth-order cross stencil.
    const std::size_t b = 9 * i;
    const double near = w(b + 1) + w(b + 2) + w(b + 3) + w(b + 4);
    const double far = w(b + 5) + w(b + 6) + w(b + 7) + w(b + 8);
    const double lap = (16.0 * near - far - 60.0 * w(b)) / (12.0 * h * h);
    r.harmonicity = std::max(r.harmonicity, std::abs(lap));
  }
  return r;
}

}  // namespace neutral
