#include <doctest.h>

#include <cmath>
#include <vector>

#include "neutral/designer.hpp"
#include "neutral/newtonian.hpp"

using namespace neutral;

namespace {

constexpr double kPi = 3.14159265358979323846;

// (1/2pi) int_E ln|x - y| dy over the ellipse x^2/a^2 + y^2/b^2 < 1 by the
// midpoint rule in elliptic polar coordinates.
double area_quadrature(double a, double b, Vec2 x, int n) {
  double s = 0.0;
  const double dr = 1.0 / n, dt = 2 * kPi / n;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < n; ++j) {
      const double t = (j + 0.5) * dt;
      const Vec2 y{a * r * std::cos(t), b * r * std::sin(t)};
      s += std::log(norm(x - y)) * a * b * r * dr * dt;
    }
  }
  return s / (2 * kPi);
}

}  // namespace

TEST_CASE("disk potential inside and outside") {
  const double R = 1.3;
  const Discretization d = discretize(make_ellipse({0, 0}, R, R, 0), 128);
  std::vector<Vec2> pts{{0, 0}, {0.4, -0.2}, {0.1, 0.9}, {2.5, 0.3}, {-3, 4}};
  const std::vector<double> n = newtonian_potential(d, pts);
  const std::vector<Vec2> g = newtonian_gradient(d, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = norm(pts[i]);
    const double expect = r < R ? (r * r - R * R) / 4 + R * R / 2 * std::log(R) : R * R / 2 * std::log(r);
    CHECK(n[i] == doctest::Approx(expect).epsilon(1e-12));
    const double radial = r < R ? r / 2 : R * R / (2 * r);
    if (r > 0) CHECK(dot(g[i], (1.0 / r) * pts[i]) == doctest::Approx(radial).epsilon(1e-12));
  }
}

TEST_CASE("ellipse potential agrees with area quadrature") {
  const double a = 2.0, b = 1.0;
  const Discretization d = discretize(make_ellipse({0, 0}, a, b, 0), 256);
  const std::vector<Vec2> pts{{0.3, 0.2}, {-1.0, 0.4}, {3.0, 1.0}};
  const std::vector<double> n = newtonian_potential(d, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(n[i] == doctest::Approx(area_quadrature(a, b, pts[i], 400)).epsilon(1e-4));
}

TEST_CASE("ellipse interior Hessian") {
  // N_E is quadratic inside with Hessian diag(b, a) / (a + b).
  const Curve e = make_ellipse({0, 0}, 2.0, 1.0, 0);
  const Discretization d = discretize(e, 256);
  const std::vector<Vec2> pts = core_fit_grid(e);
  const std::vector<double> v = newtonian_potential(d, pts);
  const QuadraticFit f = fit_quadratic(pts, v);
  CHECK(f.d1 == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  CHECK(f.d2 == doctest::Approx(2.0 / 6.0).epsilon(1e-10));
  CHECK(f.rms_residual < 1e-12);
}

TEST_CASE("quadratic fit recovers exact coefficients") {
  std::vector<Vec2> pts;
  std::vector<double> v;
  for (int i = 0; i < 20; ++i) {
    const Vec2 p{std::cos(1.3 * i) * 0.1 * i, std::sin(0.7 * i) * 0.05 * i};
    pts.push_back(p);
    v.push_back(0.3 * p.x * p.x - 1.1 * p.y * p.y - (0.2 * p.x - 0.4 * p.y) + 2.0);
  }
  const QuadraticFit f = fit_quadratic(pts, v);
  CHECK(f.d1 == doctest::Approx(0.3));
  CHECK(f.d2 == doctest::Approx(-1.1));
  CHECK(f.c1 == doctest::Approx(0.2));
  CHECK(f.c2 == doctest::Approx(-0.4));
  CHECK(f.C == doctest::Approx(2.0));
}

TEST_CASE("combined identity for a designed pair") {
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const IdentityCheck c = combined_identity_check(confocal_pair(1.0, 0.2, 1.5), d);
  CHECK(c.fit.rms_residual < 1e-8);
  CHECK(c.exterior_residual < 1e-8);
  CHECK(c.fit.d1 == doctest::Approx(0.10204081632653061).epsilon(1e-9));
  CHECK(c.fit.d2 == doctest::Approx(0.18292682926829268).epsilon(1e-9));
  CHECK(c.predicted_d1 == doctest::Approx(c.fit.d1).epsilon(1e-9));
}

TEST_CASE("non-confocal shell breaks the identity") {
  LaurentMap m;
  m.coeffs = {{1, 1.0}, {-1, 0.2}, {2, 0.1}};
  m.r0 = 1.5;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const IdentityCheck c = combined_identity_check(laurent_domain(m), d);
  CHECK(c.fit.rms_residual > 1e-4);
}

TEST_CASE("free boundary problem") {
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const CoatedInclusion inc = confocal_pair(1.0, 0.2, 1.5);
  const FreeBvpReport r = free_bvp_residual(inc, d.f, d.beta);
  CHECK(r.harmonicity < 1e-5);
  CHECK(r.outer_bc < 1e-5);
  CHECK(r.inner_bc < 1e-5);
  const FreeBvpReport off = free_bvp_residual(inc, d.f, -d.f * (d.dmu + 0.1));
  CHECK(off.inner_bc > 1e-2);
}
