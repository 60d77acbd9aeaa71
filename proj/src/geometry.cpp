#include "neutral/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "neutral/error.hpp"

namespace neutral {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kShapeSamples = 512;

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<Vec2> polyline(const Curve& c, std::size_t m) {
  std::vector<Vec2> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const complex z = c.point(kTwoPi * static_cast<double>(i) / static_cast<double>(m));
    pts[i] = {z.real(), z.imag()};
  }
  return pts;
}

// Parameter of the first sampled self-intersection, if any.
std::optional<double> first_self_intersection(const std::vector<Vec2>& pts) {
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % m];
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (segments_cross(a, b, pts[j], pts[(j + 1) % m])) {
        return kTwoPi * static_cast<double>(i) / static_cast<double>(m);
      }
    }
  }
  return std::nullopt;
}

// Signed crossing count (Sunday's winding number) of a closed polyline.
int winding(const std::vector<Vec2>& pts, Vec2 p) {
  int wn = 0;
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % m];
    const double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

double scale_of(std::span<const complex> coeffs) {
  double s = 0.0;
  for (const complex& c : coeffs) s = std::max(s, std::abs(c));
  return s;
}

}  // namespace

Curve Curve::from_fourier(std::vector<complex> coeffs, int k_min) {
  if (coeffs.empty()) throw ValidationError("curve needs at least one Fourier coefficient");
  for (const complex& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ValidationError("curve Fourier coefficients must be finite");
    }
  }
  Curve curve(std::move(coeffs), k_min);
  const double scale = scale_of(curve.coeffs_);
  const double a = curve.signed_area();
  if (!(std::abs(a) > 1e-14 * scale * scale)) {
    throw GeometryError("curve encloses no area");
  }
  if (a < 0) {
    // t -> -t maps c_k to c_{-k}.
    std::reverse(curve.coeffs_.begin(), curve.coeffs_.end());
    curve.k_min_ = -curve.k_max();
  }

  double max_speed = 0.0;
  std::vector<double> speeds(kShapeSamples);
  for (std::size_t i = 0; i < kShapeSamples; ++i) {
    speeds[i] = std::abs(curve.derivative(kTwoPi * static_cast<double>(i) / kShapeSamples));
    max_speed = std::max(max_speed, speeds[i]);
  }
  for (std::size_t i = 0; i < kShapeSamples; ++i) {
    if (speeds[i] <= 1e-10 * max_speed) {
      const double t = kTwoPi * static_cast<double>(i) / kShapeSamples;
      throw GeometryError("curve is not regular: z'(t) vanishes near t = " + std::to_string(t), t);
    }
  }
  if (auto t = first_self_intersection(polyline(curve, kShapeSamples))) {
    throw GeometryError("curve self-intersects near t = " + std::to_string(*t), *t);
  }
  return curve;
}

complex Curve::coeff(int k) const {
  if (k < k_min_ || k > k_max()) return {0.0, 0.0};
  return coeffs_[static_cast<std::size_t>(k - k_min_)];
}

complex Curve::point(double t) const {
  complex z{0.0, 0.0};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const int k = k_min_ + static_cast<int>(i);
    z += coeffs_[i] * std::polar(1.0, k * t);
  }
  return z;
}

complex Curve::derivative(double t) const {
  complex z{0.0, 0.0};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const int k = k_min_ + static_cast<int>(i);
    z += complex(0.0, k) * coeffs_[i] * std::polar(1.0, k * t);
  }
  return z;
}

complex Curve::second_derivative(double t) const {
  complex z{0.0, 0.0};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const int k = k_min_ + static_cast<int>(i);
    z -= static_cast<double>(k) * k * coeffs_[i] * std::polar(1.0, k * t);
  }
  return z;
}

double Curve::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const int k = k_min_ + static_cast<int>(i);
    a += k * std::norm(coeffs_[i]);
  }
  return std::numbers::pi * a;
}

double Curve::max_radius() const {
  const complex c = coeff(0);
  double r = 0.0;
  for (std::size_t i = 0; i < 1024; ++i) {
    r = std::max(r, std::abs(point(kTwoPi * static_cast<double>(i) / 1024.0) - c));
  }
  return r;
}

double Discretization::perimeter() const {
  double p = 0.0;
  for (double w : weight) p += w;
  return p;
}

double Discretization::feature_size() const {
  double rmin = std::sqrt(std::abs(curve.signed_area()) / std::numbers::pi);
  for (double k : curvature) {
    if (std::abs(k) > 0) rmin = std::min(rmin, 1.0 / std::abs(k));
  }
  return rmin;
}

double Discretization::node_distance(Vec2 p) const {
  double d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double ddx = p.x - x[i];
    const double ddy = p.y - y[i];
    d2 = std::min(d2, ddx * ddx + ddy * ddy);
  }
  return std::sqrt(d2);
}

complex LaurentMap::operator()(complex zeta) const {
  complex z{0.0, 0.0};
  for (const auto& [n, a] : coeffs) z += a * std::pow(zeta, n);
  return z;
}

complex LaurentMap::derivative(complex zeta) const {
  complex z{0.0, 0.0};
  for (const auto& [n, a] : coeffs) z += static_cast<double>(n) * a * std::pow(zeta, n - 1);
  return z;
}

complex LaurentMap::coeff(int n) const {
  auto it = coeffs.find(n);
  return it == coeffs.end() ? complex{0.0, 0.0} : it->second;
}

Curve make_ellipse(Vec2 center, double a, double b, double theta) {
  if (!(b > 0.0) || !(a >= b) || !std::isfinite(a)) {
    throw ValidationError("ellipse needs semi-axes a >= b > 0");
  }
  const complex rot = std::polar(1.0, theta);
  return Curve::from_fourier({rot * (0.5 * (a - b)), complex(center.x, center.y), rot * (0.5 * (a + b))}, -1);
}

CoatedInclusion confocal_pair(double a1, double a_minus1, double r0) {
  if (!(r0 > 1.0) || !std::isfinite(r0)) throw ValidationError("conformal modulus r0 must exceed 1");
  if (!(a_minus1 >= 0.0)) throw ValidationError("a_minus1 must be nonnegative");
  if (!(a1 > a_minus1)) {
    throw ValidationError("confocal pair needs a1 > a_minus1 (a1 = a_minus1 collapses the core to a segment)");
  }
  LaurentMap map;
  map.coeffs = {{1, a1}};
  if (a_minus1 > 0.0) map.coeffs[-1] = a_minus1;
  map.r0 = r0;
  return laurent_domain(map);
}

void check_univalent(const LaurentMap& map) {
  if (!(map.r0 > 1.0) || !std::isfinite(map.r0)) throw ValidationError("conformal modulus r0 must exceed 1");
  if (map.coeffs.empty()) throw ValidationError("Laurent map has no coefficients");
  for (const auto& [n, a] : map.coeffs) {
    if (n == 0) throw ValidationError("Laurent map coefficient a_0 is not part of the model");
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw ValidationError("Laurent coefficients must be finite");
    }
  }

  constexpr int kAngles = 256;
  constexpr int kRadii = 16;
  std::vector<double> mags;
  mags.reserve(kAngles * kRadii);
  double peak = 0.0;
  for (int k = 0; k < kRadii; ++k) {
    const double rho = 1.0 + (map.r0 - 1.0) * k / (kRadii - 1);
    for (int i = 0; i < kAngles; ++i) {
      const double m = std::abs(map.derivative(std::polar(rho, kTwoPi * i / kAngles)));
      mags.push_back(m);
      peak = std::max(peak, m);
    }
  }
  for (std::size_t idx = 0; idx < mags.size(); ++idx) {
    if (mags[idx] <= 1e-8 * peak) {
      const double angle = kTwoPi * static_cast<double>(idx % kAngles) / kAngles;
      throw GeometryError("Laurent map derivative vanishes in the annulus near angle " + std::to_string(angle), angle);
    }
  }
  // Argument principle: zeros of the derivative between the two circles.
  auto winding = [&](double rho) {
    constexpr int kSamples = 2048;
    double total = 0.0;
    complex prev = map.derivative(complex(rho, 0.0));
    for (int i = 1; i <= kSamples; ++i) {
      const complex cur = map.derivative(std::polar(rho, kTwoPi * i / kSamples));
      total += std::arg(cur / prev);
      prev = cur;
    }
    return static_cast<int>(std::lround(total / kTwoPi));
  };
  if (const int zeros = winding(map.r0) - winding(1.0); zeros != 0) {
    throw GeometryError("Laurent map derivative has " + std::to_string(zeros) + " zero(s) inside the annulus");
  }
}

CoatedInclusion laurent_domain(const LaurentMap& map) {
  check_univalent(map);
  const int lo = std::min(map.coeffs.begin()->first, 0);
  const int hi = std::max(map.coeffs.rbegin()->first, 0);
  std::vector<complex> inner(static_cast<std::size_t>(hi - lo + 1));
  std::vector<complex> outer(inner.size());
  for (const auto& [n, a] : map.coeffs) {
    inner[static_cast<std::size_t>(n - lo)] = a;
    outer[static_cast<std::size_t>(n - lo)] = a * std::pow(map.r0, n);
  }
  // Orientation matters here: a map whose image of |zeta| = 1 is negatively
  // oriented sends the unit circle to the outer boundary.
  Curve ci = Curve::from_fourier(inner, lo);
  Curve co = Curve::from_fourier(outer, lo);
  if (ci.k_min() != lo) {
    throw GeometryError("Laurent map reverses orientation; |zeta| = 1 is not the inner boundary");
  }
  CoatedInclusion inc = make_coated_inclusion(std::move(ci), std::move(co));
  inc.origin = map;
  return inc;
}

CoatedInclusion make_coated_inclusion(Curve inner, Curve outer) {
  // Both curves are simple, so nesting reduces to: every inner sample inside
  // the outer curve and every outer sample outside the inner one.
  const std::vector<Vec2> outer_poly = polyline(outer, kShapeSamples);
  const std::vector<Vec2> inner_poly = polyline(inner, kShapeSamples);
  for (std::size_t i = 0; i < inner_poly.size(); ++i) {
    if (winding(outer_poly, inner_poly[i]) != 1) {
      const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(inner_poly.size());
      throw GeometryError("inner curve leaves the outer curve near t = " + std::to_string(t), t);
    }
  }
  for (std::size_t j = 0; j < outer_poly.size(); ++j) {
    if (winding(inner_poly, outer_poly[j]) != 0) {
      const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(outer_poly.size());
      throw GeometryError("outer curve enters the inner curve near t = " + std::to_string(t), t);
    }
  }
  return CoatedInclusion{std::move(inner), std::move(outer), std::nullopt};
}

Discretization discretize(const Curve& c, std::size_t n) {
  if (n < 16 || n % 2 != 0) throw ValidationError("discretization needs an even node count N >= 16");
  Discretization d{c, n, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  d.t.resize(n);
  d.x.resize(n);
  d.y.resize(n);
  d.dx.resize(n);
  d.dy.resize(n);
  d.nx.resize(n);
  d.ny.resize(n);
  d.speed.resize(n);
  d.curvature.resize(n);
  d.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    const complex z = c.point(t);
    const complex dz = c.derivative(t);
    const complex ddz = c.second_derivative(t);
    const double s = std::abs(dz);
    d.t[i] = t;
    d.x[i] = z.real();
    d.y[i] = z.imag();
    d.dx[i] = dz.real();
    d.dy[i] = dz.imag();
    d.speed[i] = s;
    d.nx[i] = dz.imag() / s;
    d.ny[i] = -dz.real() / s;
    d.curvature[i] = (dz.real() * ddz.imag() - dz.imag() * ddz.real()) / (s * s * s);
    d.weight[i] = kTwoPi * s / static_cast<double>(n);
  }
  return d;
}

double area(const Discretization& d) {
  double a = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) a += (d.x[i] * d.nx[i] + d.y[i] * d.ny[i]) * d.weight[i];
  return 0.5 * a;
}

int winding_number(const Curve& c, Vec2 p, std::size_t samples) {
  return winding(polyline(c, samples), p);
}

}  // namespace neutral
