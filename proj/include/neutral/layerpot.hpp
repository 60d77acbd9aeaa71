#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "neutral/geometry.hpp"

namespace neutral {

/// Nodal operator with quadrature weights folded in: densities are point
/// values at the source nodes, outputs are point values at the targets.
using DenseOperator = Eigen::MatrixXd;

/// Targets closer than near_factor * feature_size() to the source curve are
/// refused by the off-curve evaluators.
struct NearZone {
  double factor = 0.2;
  double limit(const Discretization& src) const { return factor * src.feature_size(); }
};

/// Throws NearZoneError if any target violates the near zone of src.
void check_near_zone(const Discretization& src, std::span<const Vec2> targets, NearZone zone = {});

/// (1/2pi) sum_i ln|x - y_i| phi_i w_i at each target.
std::vector<double> single_layer_off(const Discretization& src, std::span<const double> density,
                                     std::span<const Vec2> targets, NearZone zone = {});

/// Gradient of single_layer_off.
std::vector<Vec2> single_layer_grad_off(const Discretization& src, std::span<const double> density,
                                        std::span<const Vec2> targets, NearZone zone = {});

/// Nystrom matrix of K*, kernel (1/2pi) <x - y, n_x> / |x - y|^2; diagonal
/// holds the smooth limit curvature / (4 pi) times the weight.
DenseOperator kstar_matrix(const Discretization& d);

/// Normal derivative on tgt of the single layer on src (disjoint curves).
DenseOperator normal_derivative_coupling(const Discretization& src, const Discretization& tgt);

/// On-curve single layer by product quadrature: ln(4 sin^2((t - s)/2)) is
/// integrated with exact trigonometric weights, the remainder by trapezoid.
DenseOperator single_layer_on_boundary_matrix(const Discretization& d);
std::vector<double> single_layer_on_boundary(const Discretization& d, std::span<const double> density);

/// Trigonometric interpolation of nodal density onto a finer discretization
/// of the same curve.
struct Upsampled {
  Discretization disc;
  std::vector<double> density;
};
Upsampled upsample(const Discretization& d, std::span<const double> density, std::size_t m);

}  // namespace neutral
