#include <doctest.h>

#include <cmath>

#include "neutral/error.hpp"
#include "neutral/geometry.hpp"

using namespace neutral;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("ellipse area, perimeter and curvature") {
  const Curve e = make_ellipse({0.3, -0.2}, 2.0, 1.0, 0.4);
  CHECK(e.signed_area() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  const Discretization d = discretize(e, 128);
  CHECK(area(d) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  // 8 E(m = 3/4)
  CHECK(d.perimeter() == doctest::Approx(9.688448220547675).epsilon(1e-12));
  CHECK(e.center().x == doctest::Approx(0.3));

  const Discretization c = discretize(make_ellipse({0, 0}, 1.5, 1.5, 0.0), 64);
  for (std::size_t i = 0; i < c.n; ++i) {
    CHECK(c.curvature[i] == doctest::Approx(1.0 / 1.5).epsilon(1e-13));
    CHECK(c.weight[i] == doctest::Approx(2 * kPi * 1.5 / 64).epsilon(1e-13));
  }
}

TEST_CASE("normals point outward and orientation is normalized") {
  // Clockwise ellipse: c_1 and c_-1 swapped.
  const Curve cw = Curve::from_fourier({{1.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}}, -1);
  CHECK(cw.signed_area() > 0.0);
  const Discretization d = discretize(cw, 64);
  for (std::size_t i = 0; i < d.n; ++i) CHECK(dot(d.normal(i), d.node(i) - cw.center()) > 0.0);
}

TEST_CASE("invalid curves are rejected") {
  // z(t) = e^{it} + 0.9 e^{-3it}... the e^{2it} lobe crosses itself
  CHECK_THROWS_AS(Curve::from_fourier({{0.2, 0}, {0, 0}, {0, 0}, {1.0, 0}, {0.0, 0}, {1.2, 0}}, -2), GeometryError);
  CHECK_THROWS_AS(Curve::from_fourier({}, 0), ValidationError);
  CHECK_THROWS_AS(Curve::from_fourier({{std::nan(""), 0}}, 1), ValidationError);
  CHECK_THROWS_AS(make_ellipse({0, 0}, 1.0, 2.0, 0.0), ValidationError);
  CHECK_THROWS_AS(discretize(make_ellipse({0, 0}, 1, 1, 0), 15), ValidationError);
}

TEST_CASE("nesting is checked both ways") {
  const Curve small = make_ellipse({0, 0}, 1.0, 0.5, 0.0);
  const Curve big = make_ellipse({0, 0}, 2.0, 1.5, 0.0);
  CHECK_NOTHROW(make_coated_inclusion(small, big));
  CHECK_THROWS_AS(make_coated_inclusion(big, small), GeometryError);
  CHECK_THROWS_AS(make_coated_inclusion(make_ellipse({1.5, 0}, 1.0, 0.5, 0.0), big), GeometryError);
}

TEST_CASE("confocal pair volume fraction") {
  for (double am1 : {0.0, 0.1, 0.3}) {
    for (double r0 : {1.2, 1.5, 2.5}) {
      const CoatedInclusion inc = confocal_pair(1.0, am1, r0);
      const double expect = (1 - am1 * am1) / (r0 * r0 - am1 * am1 / (r0 * r0));
      const double got = area(discretize(inc.inner, 256)) / area(discretize(inc.outer, 256));
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("confocal curves share foci") {
  const CoatedInclusion inc = confocal_pair(1.0, 0.2, 1.5);
  // Semi-axes a = a1 r + a_-1 / r, b = a1 r - a_-1 / r.
  auto focus = [](double r) {
    const double a = r + 0.2 / r, b = r - 0.2 / r;
    return std::sqrt(a * a - b * b);
  };
  CHECK(focus(1.0) == doctest::Approx(focus(1.5)).epsilon(1e-14));
  CHECK(inc.outer.point(0.0).real() == doctest::Approx(1.5 + 0.2 / 1.5));
  CHECK(inc.inner.point(kPi / 2).imag() == doctest::Approx(0.8));
}

TEST_CASE("Laurent maps must be univalent with r0 > 1") {
  LaurentMap m;
  m.coeffs = {{1, 1.0}, {-1, 0.2}};
  m.r0 = 1.0;
  CHECK_THROWS_AS(laurent_domain(m), ValidationError);
  m.r0 = 1.5;
  m.coeffs[-1] = 1.2;  // critical point inside the annulus
  CHECK_THROWS_AS(laurent_domain(m), GeometryError);
  m.coeffs[-1] = 0.2;
  m.coeffs[2] = 0.05;
  const CoatedInclusion inc = laurent_domain(m);
  CHECK(inc.outer.coeff(2).real() == doctest::Approx(0.05 * 1.5 * 1.5));
  CHECK(inc.inner.coeff(-1).real() == doctest::Approx(0.2));
}

TEST_CASE("winding number") {
  const Curve c = make_ellipse({0, 0}, 2.0, 1.0, 0.0);
  CHECK(winding_number(c, {0.5, 0.2}) == 1);
  CHECK(winding_number(c, {2.5, 0.0}) == 0);
}
