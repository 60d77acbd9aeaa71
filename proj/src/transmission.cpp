#include "neutral/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "neutral/error.hpp"
#include "neutral/simd/kernels.hpp"

namespace neutral {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Offsets for the one-sided normal derivative on the inner curve; the two
// values are combined by Richardson extrapolation.
constexpr double kOffsetCoarse = 1e-2;
constexpr double kOffsetFine = 5e-3;

double curve_diameter(const Curve& c) {
  constexpr std::size_t m = 128;
  std::vector<complex> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i] = c.point(2.0 * std::numbers::pi * static_cast<double>(i) / m);
  double d = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
  return d;
}

std::vector<Vec2> circle(Vec2 center, double radius, std::size_t m) {
  std::vector<Vec2> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
    pts[i] = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
  }
  return pts;
}

// Centroid plus a copy of the inner curve scaled by 1/2 about its center.
std::vector<Vec2> core_grid(const Curve& inner) {
  constexpr std::size_t m = 32;
  const complex c = inner.coeff(0);
  std::vector<Vec2> pts{{c.real(), c.imag()}};
  for (std::size_t i = 0; i < m; ++i) {
    const complex z = c + 0.5 * (inner.point(2.0 * std::numbers::pi * static_cast<double>(i) / m) - c);
    pts.push_back({z.real(), z.imag()});
  }
  return pts;
}

double augmentation_sign(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace

void ConductivityProfile::validate() const {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw ValidationError("shell conductivity must be finite and positive");
  for (double s : sigma_m) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("matrix conductivities must be finite and positive");
  }
  if (!(sigma_c >= 0.0)) throw ValidationError("core conductivity must be in [0, inf]");
  if (sigma_c == sigma_s) {
    throw DegenerateContrastError("core and shell conductivities coincide; lambda is undefined");
  }
}

double core_contrast(double sigma_c, double sigma_s) {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw ValidationError("shell conductivity must be finite and positive");
  if (!(sigma_c >= 0.0)) throw ValidationError("core conductivity must be in [0, inf]");
  if (sigma_c == sigma_s) throw DegenerateContrastError("core and shell conductivities coincide; lambda is undefined");
  if (std::isinf(sigma_c)) return 0.5;
  if (sigma_c == 0.0) return -0.5;
  return (sigma_c + sigma_s) / (2.0 * (sigma_c - sigma_s));
}

ContrastParams contrasts(const ConductivityProfile& p) {
  p.validate();
  ContrastParams c;
  c.lambda = core_contrast(p.sigma_c, p.sigma_s);
  for (std::size_t j = 0; j < 2; ++j) {
    const double sm = p.sigma_m[j];
    c.mu[j] = sm == p.sigma_s ? kInfinity : (p.sigma_s + sm) / (2.0 * (p.sigma_s - sm));
  }
  return c;
}

HarmonicField::HarmonicField(std::map<int, complex> coeffs) : coeffs_(std::move(coeffs)) {
  for (const auto& [k, c] : coeffs_) {
    if (k < 0) throw ValidationError("harmonic field exponents must be nonnegative");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ValidationError("harmonic field coefficients must be finite");
  }
}

HarmonicField HarmonicField::uniform(Axis a) {
  // Re(z) = x1, Re(-i z) = x2.
  return HarmonicField({{1, a == Axis::x1 ? complex(1.0, 0.0) : complex(0.0, -1.0)}});
}

double HarmonicField::value(Vec2 p) const {
  const complex z(p.x, p.y);
  double v = 0.0;
  for (const auto& [k, c] : coeffs_) v += (c * std::pow(z, k)).real();
  return v;
}

Vec2 HarmonicField::gradient(Vec2 p) const {
  const complex z(p.x, p.y);
  complex dF{0.0, 0.0};
  for (const auto& [k, c] : coeffs_) {
    if (k > 0) dF += static_cast<double>(k) * c * std::pow(z, k - 1);
  }
  return {dF.real(), -dF.imag()};
}

bool HarmonicField::is_constant() const {
  for (const auto& [k, c] : coeffs_) {
    if (k > 0 && c != complex(0.0, 0.0)) return false;
  }
  return true;
}

TransmissionSolver::TransmissionSolver(const CoatedInclusion& inc, std::size_t nodes)
    : inner_(discretize(inc.inner, nodes)),
      outer_(discretize(inc.outer, nodes)),
      kstar_inner_(kstar_matrix(inner_)),
      kstar_outer_(kstar_matrix(outer_)),
      inner_from_outer_(normal_derivative_coupling(outer_, inner_)),
      outer_from_inner_(normal_derivative_coupling(inner_, outer_)) {}

DensityPair TransmissionSolver::solve(double lambda, double mu, const HarmonicField& h) const {
  if (!std::isfinite(lambda) || std::abs(lambda) < 0.5) {
    throw ValidationError("lambda must be finite with |lambda| >= 1/2");
  }
  if (!std::isfinite(mu)) {
    throw DegenerateContrastError("matrix conductivity equals shell conductivity for this axis (mu undefined)");
  }
  const auto n = static_cast<Eigen::Index>(inner_.n);
  const auto m = static_cast<Eigen::Index>(outer_.n);
  const Eigen::Map<const Eigen::VectorXd> w_in(inner_.weight.data(), n);
  const Eigen::Map<const Eigen::VectorXd> w_out(outer_.weight.data(), m);

  Eigen::MatrixXd a(n + m, n + m);
  a.topLeftCorner(n, n) = -kstar_inner_;
  a.topLeftCorner(n, n).diagonal().array() += lambda;
  a.topLeftCorner(n, n).rowwise() += (augmentation_sign(lambda) / w_in.sum()) * w_in.transpose();
  a.topRightCorner(n, m) = -inner_from_outer_;
  a.bottomLeftCorner(m, n) = -outer_from_inner_;
  a.bottomRightCorner(m, m) = -kstar_outer_;
  a.bottomRightCorner(m, m).diagonal().array() += mu;
  a.bottomRightCorner(m, m).rowwise() += (augmentation_sign(mu) / w_out.sum()) * w_out.transpose();

  Eigen::VectorXd rhs(n + m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rhs(i) = dot(h.gradient(inner_.node(k)), inner_.normal(k));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rhs(n + i) = dot(h.gradient(outer_.node(k)), outer_.normal(k));
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw SolverError("transmission system is numerically singular (rcond " + std::to_string(rcond) + ")", rcond);
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw SolverError("transmission solve produced non-finite densities", rcond);

  DensityPair pair;
  pair.phi.assign(sol.data(), sol.data() + n);
  pair.psi.assign(sol.data() + n, sol.data() + n + m);
  pair.field = h;
  pair.rcond = rcond;
  return pair;
}

DensityPair TransmissionSolver::solve_uniform(const ConductivityProfile& p, Axis j) const {
  const ContrastParams c = contrasts(p);
  DensityPair pair = solve(c.lambda, c.mu[index(j)], HarmonicField::uniform(j));
  pair.axis = j;
  return pair;
}

UEval TransmissionSolver::eval(const DensityPair& pair, std::span<const Vec2> points, NearZone zone) const {
  const std::vector<double> s_in = single_layer_off(inner_, pair.phi, points, zone);
  const std::vector<double> s_out = single_layer_off(outer_, pair.psi, points, zone);
  const std::vector<Vec2> g_in = single_layer_grad_off(inner_, pair.phi, points, zone);
  const std::vector<Vec2> g_out = single_layer_grad_off(outer_, pair.psi, points, zone);
  UEval out;
  out.value.resize(points.size());
  out.gradient.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.value[i] = pair.field.value(points[i]) + s_in[i] + s_out[i];
    out.gradient[i] = pair.field.gradient(points[i]) + g_in[i] + g_out[i];
  }
  return out;
}

std::array<double, 2> TransmissionSolver::weighted_means(const DensityPair& pair) const {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < inner_.n; ++i) a += pair.phi[i] * inner_.weight[i];
  for (std::size_t i = 0; i < outer_.n; ++i) b += pair.psi[i] * outer_.weight[i];
  return {a, b};
}

DensityPair solve_uniform(const CoatedInclusion& inc, const ConductivityProfile& p, Axis j, std::size_t nodes) {
  return TransmissionSolver(inc, nodes).solve_uniform(p, j);
}

UEval eval_u(const CoatedInclusion& inc, const DensityPair& pair, std::span<const Vec2> points) {
  if (pair.phi.size() != pair.psi.size()) throw ValidationError("density pair sizes differ");
  const Discretization in = discretize(inc.inner, pair.phi.size());
  const Discretization out = discretize(inc.outer, pair.psi.size());
  const std::vector<double> s_in = single_layer_off(in, pair.phi, points);
  const std::vector<double> s_out = single_layer_off(out, pair.psi, points);
  const std::vector<Vec2> g_in = single_layer_grad_off(in, pair.phi, points);
  const std::vector<Vec2> g_out = single_layer_grad_off(out, pair.psi, points);
  UEval r;
  r.value.resize(points.size());
  r.gradient.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.value[i] = pair.field.value(points[i]) + s_in[i] + s_out[i];
    r.gradient[i] = pair.field.gradient(points[i]) + g_in[i] + g_out[i];
  }
  return r;
}

double probe_residual(const TransmissionSolver& solver, const DensityPair& pair, double radius, std::size_t m) {
  const std::vector<Vec2> probe = circle(solver.outer().curve.center(), radius, m);
  const UEval u = solver.eval(pair, probe);
  double r = 0.0;
  for (std::size_t i = 0; i < m; ++i) r = std::max(r, std::abs(u.value[i] - pair.field.value(probe[i])));
  return r;
}

namespace {

// max_i |phi_i - 2/(2 lambda - 1) du/dnu|_-(x_i)|, with the interior one-sided
// derivative from two inward offsets and Richardson extrapolation. The core
// density is upsampled so the trapezoid rule stays accurate at the offsets.
double phi_identity_residual(const TransmissionSolver& solver, const DensityPair& pair, double lambda) {
  const Discretization& in = solver.inner();
  const double perimeter = in.perimeter();
  std::size_t fine = static_cast<std::size_t>(std::ceil(8.0 * perimeter / kOffsetFine));
  fine += fine % 2;
  fine = std::clamp<std::size_t>(fine, in.n, 1u << 16);
  const Upsampled up = upsample(in, pair.phi, fine);
  std::vector<double> q(fine);
  for (std::size_t i = 0; i < fine; ++i) q[i] = kInvTwoPi * up.density[i] * up.disc.weight[i];
  const auto& k = simd::active_kernels();
  const simd::SourceView src{up.disc.x.data(), up.disc.y.data(), fine};

  auto normal_derivative = [&](double eps) {
    std::vector<Vec2> pts(in.n);
    for (std::size_t i = 0; i < in.n; ++i) pts[i] = in.node(i) - eps * in.normal(i);
    // The outer curve is far from these points; its regular rule suffices.
    const std::vector<Vec2> g_out = single_layer_grad_off(solver.outer(), pair.psi, pts);
    std::vector<double> dn(in.n);
    for (std::size_t i = 0; i < in.n; ++i) {
      Vec2 g;
      k.grad_sum(pts[i].x, pts[i].y, src, q.data(), &g.x, &g.y);
      g = g + g_out[i] + pair.field.gradient(pts[i]);
      dn[i] = dot(g, in.normal(i));
    }
    return dn;
  };

  const std::vector<double> coarse = normal_derivative(kOffsetCoarse);
  const std::vector<double> finer = normal_derivative(kOffsetFine);
  const double ratio = kOffsetCoarse / kOffsetFine;
  double worst = 0.0;
  for (std::size_t i = 0; i < in.n; ++i) {
    const double dn = (ratio * finer[i] - coarse[i]) / (ratio - 1.0);
    const double r = lambda == 0.5 ? std::abs(dn) : std::abs(pair.phi[i] - 2.0 / (2.0 * lambda - 1.0) * dn);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

NeutralityReport neutrality_report(const CoatedInclusion& inc, const ConductivityProfile& p, std::size_t nodes,
                                   const ProbeOptions& probe) {
  return neutrality_report(TransmissionSolver(inc, nodes), p, probe);
}

NeutralityReport neutrality_report(const TransmissionSolver& solver, const ConductivityProfile& p,
                                   const ProbeOptions& probe) {
  const Curve& outer = solver.outer().curve;
  const double rmax = outer.max_radius();
  const double radius = probe.radius.value_or(3.0 * rmax);
  const double diameter = curve_diameter(outer);
  if (radius - rmax < 0.5 * diameter) {
    throw ValidationError("probe radius " + std::to_string(radius) +
                          " leaves less than half a diameter of margin around the inclusion");
  }
  if (probe.points < 4) throw ValidationError("probe circle needs at least 4 points");

  NeutralityReport report;
  report.nodes = solver.inner().n;
  report.probe_radius = radius;
  report.probe_points = probe.points;
  report.contrast = contrasts(p);
  const double lambda = report.contrast.lambda;
  const double smu = report.contrast.mu[0] + report.contrast.mu[1];

  const std::vector<Vec2> probe_pts = circle(outer.center(), radius, probe.points);
  const std::vector<Vec2> grid = core_grid(solver.inner().curve);

  for (Axis axis : {Axis::x1, Axis::x2}) {
    const std::size_t j = index(axis);
    AxisReport& ar = report.axes[j];
    const DensityPair pair = solver.solve_uniform(p, axis);
    ar.rcond = pair.rcond;
    ar.density_means = solver.weighted_means(pair);

    const UEval far = solver.eval(pair, probe_pts);
    double sq = 0.0;
    for (std::size_t i = 0; i < probe_pts.size(); ++i) {
      const double d = far.value[i] - pair.field.value(probe_pts[i]);
      ar.residual = std::max(ar.residual, std::abs(d));
      sq += d * d;
    }
    ar.rms_residual = std::sqrt(sq / static_cast<double>(probe_pts.size()));

    const Discretization& in = solver.inner();
    const Discretization& out = solver.outer();
    for (std::size_t i = 0; i < in.n; ++i) ar.first_moment = ar.first_moment + (pair.phi[i] * in.weight[i]) * in.node(i);
    for (std::size_t i = 0; i < out.n; ++i) ar.first_moment = ar.first_moment + (pair.psi[i] * out.weight[i]) * out.node(i);

    const UEval core = solver.eval(pair, grid);
    Vec2 mean;
    for (const Vec2& g : core.gradient) mean = mean + g;
    mean = (1.0 / static_cast<double>(core.gradient.size())) * mean;
    ar.core_gradient_mean = mean;
    for (const Vec2& g : core.gradient) ar.core_gradient_deviation = std::max(ar.core_gradient_deviation, norm(g - mean));

    const double mu_j = report.contrast.mu[j];
    ar.predicted_core_slope = (2.0 * lambda - 1.0) * smu / (2.0 * lambda * (2.0 * mu_j + 1.0));
    const double measured = axis == Axis::x1 ? mean.x : mean.y;
    ar.core_slope_error = std::abs(measured - ar.predicted_core_slope);

    const std::vector<double>& nj = axis == Axis::x1 ? out.nx : out.ny;
    for (std::size_t i = 0; i < out.n; ++i) {
      ar.psi_identity_residual = std::max(ar.psi_identity_residual, std::abs(pair.psi[i] - 2.0 / (2.0 * mu_j + 1.0) * nj[i]));
    }
    if (probe.identities) ar.phi_identity_residual = phi_identity_residual(solver, pair, lambda);
  }
  return report;
}

double NeutralityReport::max_residual() const { return std::max(axes[0].residual, axes[1].residual); }

double decay_exponent(const CoatedInclusion& inc, const ConductivityProfile& p, const HarmonicField& h,
                      std::array<double, 2> radii, std::size_t nodes) {
  if (!p.is_isotropic()) {
    throw UnsupportedConfigurationError("decay exponent needs an isotropic matrix conductivity");
  }
  if (h.is_constant()) throw ValidationError("constant background field produces no perturbation; decay exponent undefined");
  const double rmax = inc.outer.max_radius();
  if (!(radii[0] >= 2.0 * rmax) || !(radii[1] > radii[0])) {
    throw ValidationError("decay radii must satisfy R2 > R1 >= 2 x outer radius");
  }
  const ContrastParams c = contrasts(p);
  const TransmissionSolver solver(inc, nodes);
  const DensityPair pair = solver.solve(c.lambda, c.mu[0], h);
  const double r1 = probe_residual(solver, pair, radii[0], 64);
  const double r2 = probe_residual(solver, pair, radii[1], 64);
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw NumericalError("far-field residual vanished; decay exponent undefined");
  return std::log(r1 / r2) / std::log(radii[1] / radii[0]);
}

}  // namespace neutral
