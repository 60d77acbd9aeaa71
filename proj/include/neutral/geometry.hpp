#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace neutral {

using complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Smooth closed curve given by a trigonometric polynomial
///   z(t) = sum_{k=k_min}^{k_max} c_k e^{ikt},  t in [0, 2pi).
///
/// Construction validates regularity (z' != 0 at sample points) and
/// simplicity at sampled resolution, and normalizes the orientation to
/// counterclockwise by t -> -t when needed.
class Curve {
 public:
  static Curve from_fourier(std::vector<complex> coeffs, int k_min);

  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(coeffs_.size()) - 1; }
  std::span<const complex> coeffs() const { return coeffs_; }
  complex coeff(int k) const;

  complex point(double t) const;
  complex derivative(double t) const;
  complex second_derivative(double t) const;

  /// Exact enclosed area, pi * sum k |c_k|^2 (positive after normalization).
  double signed_area() const;

  /// Mean of the curve, c_0.
  Vec2 center() const { return {coeff(0).real(), coeff(0).imag()}; }

  /// Largest distance from center() over a dense sample.
  double max_radius() const;

 private:
  Curve(std::vector<complex> coeffs, int k_min)
      : coeffs_(std::move(coeffs)), k_min_(k_min) {}

  std::vector<complex> coeffs_;
  int k_min_;
};

/// Trapezoid-rule sampling of a curve at t_i = 2 pi i / N.
/// Normals are outward, n = (y', -x') / |z'|; weights carry arc length.
struct Discretization {
  Curve curve;
  std::size_t n;
  std::vector<double> t;
  std::vector<double> x, y;
  std::vector<double> dx, dy;  // z'(t)
  std::vector<double> nx, ny;
  std::vector<double> speed;
  std::vector<double> curvature;
  std::vector<double> weight;  // 2 pi |z'(t_i)| / N

  Vec2 node(std::size_t i) const { return {x[i], y[i]}; }
  Vec2 normal(std::size_t i) const { return {nx[i], ny[i]}; }
  double perimeter() const;

  /// Distance scale below which off-curve trapezoid evaluation is refused.
  /// min(smallest radius of curvature, equivalent-disk radius).
  double feature_size() const;

  /// Smallest distance from p to any node.
  double node_distance(Vec2 p) const;
};

/// Conformal map Phi(zeta) = sum a_n zeta^n on the annulus 1 <= |zeta| <= r0.
struct LaurentMap {
  std::map<int, complex> coeffs;
  double r0 = 2.0;

  complex operator()(complex zeta) const;
  complex derivative(complex zeta) const;
  complex coeff(int n) const;
};

struct CoatedInclusion {
  Curve inner;  // boundary of the core D
  Curve outer;  // boundary of Omega
  std::optional<LaurentMap> origin;
};

Curve make_ellipse(Vec2 center, double a, double b, double theta);

/// Images of |zeta| = 1 and |zeta| = r0 under a1 zeta + a_minus1 / zeta.
CoatedInclusion confocal_pair(double a1, double a_minus1, double r0);

/// Validates univalence and nesting, then returns the boundary images.
CoatedInclusion laurent_domain(const LaurentMap& map);

/// Checks that every inner node lies strictly inside the outer curve.
CoatedInclusion make_coated_inclusion(Curve inner, Curve outer);

/// Heuristic univalence check (grid of |Phi'| plus boundary simplicity and
/// nesting). Throws GeometryError naming the first defect.
void check_univalent(const LaurentMap& map);

Discretization discretize(const Curve& c, std::size_t n);

/// (1/2) sum <x, n> w: signed area by boundary quadrature.
double area(const Discretization& d);

/// Winding number of the curve (dense polyline) around p.
int winding_number(const Curve& c, Vec2 p, std::size_t samples = 1024);

}  // namespace neutral
