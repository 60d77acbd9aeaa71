#include "neutral/layerpot.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "neutral/error.hpp"
#include "neutral/simd/kernels.hpp"

namespace neutral {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

simd::SourceView view(const Discretization& d) { return {d.x.data(), d.y.data(), d.n}; }

void check_density(const Discretization& d, std::span<const double> density) {
  if (density.size() != d.n) {
    throw ValidationError("density has " + std::to_string(density.size()) + " values for " +
                          std::to_string(d.n) + " nodes");
  }
}

std::vector<double> charges(const Discretization& d, std::span<const double> density) {
  std::vector<double> q(d.n);
  for (std::size_t i = 0; i < d.n; ++i) q[i] = kInvTwoPi * density[i] * d.weight[i];
  return q;
}

}  // namespace

void check_near_zone(const Discretization& src, std::span<const Vec2> targets, NearZone zone) {
  const double limit = zone.limit(src);
  for (const Vec2& p : targets) {
    const double dist = src.node_distance(p);
    if (dist < limit) {
      throw NearZoneError("target (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") is within the near zone of the source curve (distance " +
                              std::to_string(dist) + " < " + std::to_string(limit) + ")",
                          dist, limit);
    }
  }
}

std::vector<double> single_layer_off(const Discretization& src, std::span<const double> density,
                                     std::span<const Vec2> targets, NearZone zone) {
  check_density(src, density);
  check_near_zone(src, targets, zone);
  const auto& k = simd::active_kernels();
  const std::vector<double> q = charges(src, density);
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out[i] = k.log_sum(targets[i].x, targets[i].y, view(src), q.data());
  }
  return out;
}

std::vector<Vec2> single_layer_grad_off(const Discretization& src, std::span<const double> density,
                                        std::span<const Vec2> targets, NearZone zone) {
  check_density(src, density);
  check_near_zone(src, targets, zone);
  const auto& k = simd::active_kernels();
  const std::vector<double> q = charges(src, density);
  std::vector<Vec2> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    k.grad_sum(targets[i].x, targets[i].y, view(src), q.data(), &out[i].x, &out[i].y);
  }
  return out;
}

DenseOperator kstar_matrix(const Discretization& d) {
  const auto& k = simd::active_kernels();
  // Row-major scratch so each kernel call writes a contiguous row.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(d.n, d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    k.dipole_row(d.x[i], d.y[i], d.nx[i], d.ny[i], view(d), d.weight.data(), kInvTwoPi, m.row(i).data());
    m(i, i) = 0.5 * kInvTwoPi * d.curvature[i] * d.weight[i];
  }
  return m;
}

DenseOperator normal_derivative_coupling(const Discretization& src, const Discretization& tgt) {
  const auto& k = simd::active_kernels();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(tgt.n, src.n);
  for (std::size_t i = 0; i < tgt.n; ++i) {
    k.dipole_row(tgt.x[i], tgt.y[i], tgt.nx[i], tgt.ny[i], view(src), src.weight.data(), kInvTwoPi,
                 m.row(i).data());
  }
  if (!m.allFinite()) throw GeometryError("coupled curves intersect (coincident nodes)");
  return m;
}

DenseOperator single_layer_on_boundary_matrix(const Discretization& d) {
  const std::size_t n = d.n;
  if (n % 2 != 0) throw ValidationError("on-curve single layer needs an even node count");
  const std::size_t half = n / 2;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);

  // Weights R(t_i - t_j) for ln(4 sin^2((t - s)/2)), indexed by (i - j) mod n.
  std::vector<double> r(n), sin2(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double delta = h * static_cast<double>(l);
    double acc = 0.0;
    for (std::size_t m = 1; m < half; ++m) acc += std::cos(static_cast<double>(m) * delta) / static_cast<double>(m);
    r[l] = -(2.0 * std::numbers::pi / static_cast<double>(half)) * acc -
           (std::numbers::pi / static_cast<double>(half * half)) * std::cos(static_cast<double>(half) * delta);
    const double s = std::sin(0.5 * delta);
    sin2[l] = 4.0 * s * s;
  }

  DenseOperator m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t l = (i + n - j) % n;
      double smooth;
      if (i == j) {
        smooth = std::log(d.speed[i] * d.speed[i]);
      } else {
        const double ex = d.x[i] - d.x[j];
        const double ey = d.y[i] - d.y[j];
        smooth = std::log((ex * ex + ey * ey) / sin2[l]);
      }
      m(i, j) = kInvTwoPi * 0.5 * (r[l] + h * smooth) * d.speed[j];
    }
  }
  return m;
}

std::vector<double> single_layer_on_boundary(const Discretization& d, std::span<const double> density) {
  check_density(d, density);
  const DenseOperator m = single_layer_on_boundary_matrix(d);
  const Eigen::Map<const Eigen::VectorXd> phi(density.data(), static_cast<Eigen::Index>(density.size()));
  const Eigen::VectorXd v = m * phi;
  return {v.data(), v.data() + v.size()};
}

Upsampled upsample(const Discretization& d, std::span<const double> density, std::size_t m) {
  check_density(d, density);
  const std::size_t n = d.n;
  const std::size_t half = n / 2;
  // Real DFT coefficients a_k, b_k for k = 0..n/2.
  std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      a[k] += density[j] * std::cos(static_cast<double>(k) * d.t[j]);
      b[k] += density[j] * std::sin(static_cast<double>(k) * d.t[j]);
    }
    const double scale = (k == 0 || k == half) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
    a[k] *= scale;
    b[k] *= scale;
  }
  Upsampled out{discretize(d.curve, m), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    const double t = out.disc.t[i];
    double v = a[0];
    for (std::size_t k = 1; k < half; ++k) {
      v += a[k] * std::cos(static_cast<double>(k) * t) + b[k] * std::sin(static_cast<double>(k) * t);
    }
    v += a[half] * std::cos(static_cast<double>(half) * t);
    out.density[i] = v;
  }
  return out;
}

}  // namespace neutral
