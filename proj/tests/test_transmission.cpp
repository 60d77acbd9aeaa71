#include <doctest.h>

#include <cmath>
#include <vector>

#include "neutral/designer.hpp"
#include "neutral/error.hpp"
#include "neutral/transmission.hpp"

using namespace neutral;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Concentric disks: the coated disk acts like a homogeneous disk of radius
// ro with conductivity s_eff, so u - x1 = a ro^2 x1 / r^2 outside.
double coated_disk_effective(double sc, double ss, double f) {
  if (std::isinf(sc)) return ss * (1 + f) / (1 - f);
  return ss * (sc + ss + f * (sc - ss)) / (sc + ss - f * (sc - ss));
}

double exterior_dipole(double sc, double ss, double sm, double ri, double ro) {
  const double se = coated_disk_effective(sc, ss, ri * ri / (ro * ro));
  return ro * ro * (sm - se) / (sm + se);
}

CoatedInclusion disks(double ri, double ro) {
  return make_coated_inclusion(make_ellipse({0, 0}, ri, ri, 0), make_ellipse({0, 0}, ro, ro, 0));
}

}  // namespace

TEST_CASE("contrast parameters") {
  const ContrastParams c = contrasts(ConductivityProfile::isotropic(5, 1, 2));
  CHECK(c.lambda == doctest::Approx(0.75));
  CHECK(c.mu[0] == doctest::Approx(-1.5));
  CHECK(core_contrast(kInfinity, 1) == 0.5);
  CHECK(core_contrast(0, 1) == -0.5);
  CHECK(std::isinf(contrasts(ConductivityProfile::isotropic(5, 1, 1)).mu[0]));
  CHECK_THROWS_AS(contrasts(ConductivityProfile::isotropic(1, 1, 2)), DegenerateContrastError);
  CHECK_THROWS_AS(ConductivityProfile::isotropic(5, -1, 2).validate(), ValidationError);
}

TEST_CASE("coated disk far field matches the closed form") {
  const double ri = 1.0, ro = std::sqrt(2.0);
  const CoatedInclusion inc = disks(ri, ro);
  for (double sc : {5.0, 0.2, kInfinity}) {
    for (double sm : {2.4, 0.7}) {
      CAPTURE(sc);
      CAPTURE(sm);
      const ConductivityProfile p = ConductivityProfile::isotropic(sc, 1.0, sm);
      const DensityPair pair = solve_uniform(inc, p, Axis::x1, 128);
      std::vector<Vec2> pts;
      for (int i = 0; i < 8; ++i) pts.push_back({3 * std::cos(0.7 * i + 0.1), 3 * std::sin(0.7 * i + 0.1)});
      const UEval u = eval_u(inc, pair, pts);
      const double a = exterior_dipole(sc, 1.0, sm, ri, ro);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r2 = dot(pts[i], pts[i]);
        CHECK(u.value[i] - pts[i].x == doctest::Approx(a * pts[i].x / r2).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("neutral coated disk is invisible") {
  const CoatedInclusion inc = disks(1.0, std::sqrt(2.0));
  const NeutralityReport r = neutrality_report(inc, ConductivityProfile::isotropic(5, 1, 2), 256, {3.0});
  CHECK(r.max_residual() < 1e-8);
  for (const AxisReport& a : r.axes) {
    CHECK(std::abs(a.density_means[0]) < 1e-9);
    CHECK(std::abs(a.density_means[1]) < 1e-9);
    CHECK(a.core_gradient_deviation < 1e-8);
    CHECK(a.psi_identity_residual < 1e-7);
    CHECK(a.phi_identity_residual < 1e-6);
  }
  const NeutralityReport bad = neutrality_report(inc, ConductivityProfile::isotropic(5, 1, 2.4), 256, {3.0});
  CHECK(bad.axes[0].residual > 1e-3);
}

TEST_CASE("designed confocal coating is neutral for both axes") {
  for (double sc : {5.0, 0.0, kInfinity, 0.3}) {
    CAPTURE(sc);
    const DesignResult d = confocal_design(1.0, 0.2, 1.5, sc, 1.0);
    const CoatedInclusion inc = confocal_pair(1.0, 0.2, 1.5);
    const NeutralityReport r = neutrality_report(inc, d.profile(), 256);
    CHECK(r.max_residual() < 1e-8);
    CHECK(r.axes[1].core_slope_error < 1e-6);
    CHECK(r.axes[0].core_slope_error < 1e-6);
    CHECK(r.axes[1].core_gradient_deviation < 1e-6);
  }
}

TEST_CASE("resolution independence of the designed residual") {
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const CoatedInclusion inc = confocal_pair(1.0, 0.2, 1.5);
  ProbeOptions po;
  po.identities = false;
  const double r128 = neutrality_report(inc, d.profile(), 128, po).max_residual();
  const double r256 = neutrality_report(inc, d.profile(), 256, po).max_residual();
  CHECK(std::abs(r128 - r256) < 1e-9);
}

TEST_CASE("reciprocal profile is neutral to the orthogonal field") {
  // Geometry neutral to e1 only: keep sigma_m^1, the design for axis 1.
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const CoatedInclusion inc = confocal_pair(1.0, 0.2, 1.5);
  const ConductivityProfile one = ConductivityProfile::isotropic(d.sigma_c, d.sigma_s, d.sigma_m[0]);
  TransmissionSolver solver(inc, 256);
  const double r1 = probe_residual(solver, solver.solve_uniform(one, Axis::x1), 5.0, 64);
  CHECK(r1 < 1e-8);
  const ConductivityProfile dual = reciprocal_dual(one);
  const double r2 = probe_residual(solver, solver.solve_uniform(dual, Axis::x2), 5.0, 64);
  CHECK(r2 < 1e-7);
}

TEST_CASE("decay exponents") {
  const CoatedInclusion inc = disks(1.0, std::sqrt(2.0));
  HarmonicField quad({{2, complex(1.0, 0.0)}});
  CHECK(decay_exponent(inc, ConductivityProfile::isotropic(5, 1, 2), quad, {5, 10}, 128) >= 1.8);
  const double e = decay_exponent(inc, ConductivityProfile::isotropic(5, 1, 2.4), HarmonicField::uniform(Axis::x1),
                                  {5, 10}, 128);
  CHECK(e == doctest::Approx(1.0).epsilon(0.2));
  CHECK_THROWS_AS(decay_exponent(inc, ConductivityProfile{5, 1, {2, 3}}, quad, {5, 10}, 128),
                  UnsupportedConfigurationError);
  CHECK_THROWS_AS(decay_exponent(inc, ConductivityProfile::isotropic(5, 1, 2), HarmonicField({{0, 1.0}}), {5, 10}, 128),
                  ValidationError);
}

TEST_CASE("harmonic field gradient") {
  const HarmonicField h({{2, complex(1.0, 0.5)}});
  // Re((1 + 0.5i) z^2) = x^2 - y^2 - xy
  const Vec2 g = h.gradient({0.3, -0.7});
  CHECK(g.x == doctest::Approx(2 * 0.3 + 0.7));
  CHECK(g.y == doctest::Approx(-2 * -0.7 - 0.3));
  CHECK(h.value({0.3, -0.7}) == doctest::Approx(0.09 - 0.49 + 0.21));
  (void)kPi;
}
