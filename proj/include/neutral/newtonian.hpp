#pragma once

#include <span>
#include <vector>

#include "neutral/designer.hpp"
#include "neutral/geometry.hpp"
#include "neutral/layerpot.hpp"

namespace neutral {

/// N_D(x) = (1/2pi) int_D ln|x - y| dy, reduced to the boundary flux of
/// F(y) = (y - x)(2 ln|x - y| - 1) / 4 (div F = ln|x - y|). Valid inside and
/// outside D away from the curve.
std::vector<double> newtonian_potential(const Discretization& d, std::span<const Vec2> points, NearZone zone = {});

/// grad N_D = -(S[n1], S[n2]).
std::vector<Vec2> newtonian_gradient(const Discretization& d, std::span<const Vec2> points, NearZone zone = {});

/// F(x) ~ d1 x1^2 + d2 x2^2 - (c1 x1 + c2 x2) + C by least squares.
struct QuadraticFit {
  double d1 = 0.0;
  double d2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double C = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

QuadraticFit fit_quadratic(std::span<const Vec2> points, std::span<const double> values);

struct IdentityCheck {
  QuadraticFit fit;              // of N_D - f N_Omega on the core grid
  double exterior_residual = 0;  // max deviation from its mean on a far circle
  double predicted_d1 = 0;       // (1 - f (1 + mu1 - mu2)) / 4
  double predicted_d2 = 0;       // (1 - f (1 + mu2 - mu1)) / 4
  double f = 0;
};

IdentityCheck combined_identity_check(const CoatedInclusion& inc, double f, double dmu, std::size_t nodes = 256);
IdentityCheck combined_identity_check(const CoatedInclusion& inc, const DesignResult& dr, std::size_t nodes = 256);

/// Residuals of the free boundary problem for
///   w = (f/2)|x|^2 + 2 (N_D - f N_Omega):
///   Laplacian w = 0 in the shell, grad w = f x on the outer curve,
///   grad w = x + beta (x1, -x2) on the inner curve.
struct FreeBvpReport {
  double harmonicity = 0.0;
  double outer_bc = 0.0;
  double inner_bc = 0.0;
};

FreeBvpReport free_bvp_residual(const CoatedInclusion& inc, double f, double beta, std::size_t nodes = 256);

/// Core sample grid: centroid plus copies of the inner curve scaled by
/// 0.2, 0.4, 0.6 about its center.
std::vector<Vec2> core_fit_grid(const Curve& inner, std::size_t per_ring = 16);

}  // namespace neutral
