// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "neutral/designer.hpp"
#include "neutral/error.hpp"
#include "neutral/laurent.hpp"
#include "neutral/layerpot.hpp"
#include "neutral/newtonian.hpp"
#include "neutral/shapesearch.hpp"
#include "neutral/transmission.hpp"

using namespace neutral;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  pass = pass && ok;
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) detail += " [x]";
}

double axis_residual(const TransmissionSolver& s, const ConductivityProfile& p, Axis a, double radius) {
  return probe_residual(s, s.solve_uniform(p, a), radius, 64);
}

CoatedInclusion disks(double ri, double ro) {
  return make_coated_inclusion(make_ellipse({0, 0}, ri, ri, 0), make_ellipse({0, 0}, ro, ro, 0));
}

// 1 -------------------------------------------------------------------------
Outcome disk_neutrality() {
  Outcome o;
  const double sm = disk_matrix_conductivity(5, 1, 0.5);
  o.check(std::abs(sm - 2.0) <= 1e-12, "sigma_m=%.12g", sm);
  const TransmissionSolver s(disks(1.0, std::sqrt(2.0)), 256);
  const auto p = ConductivityProfile::isotropic(5, 1, sm);
  const double r1 = axis_residual(s, p, Axis::x1, 3.0), r2 = axis_residual(s, p, Axis::x2, 3.0);
  o.check(r1 <= 1e-8 && r2 <= 1e-8, "residual %.2e/%.2e <= 1e-8", r1, r2);
  const double bad = axis_residual(s, ConductivityProfile::isotropic(5, 1, 2.4), Axis::x1, 3.0);
  o.check(bad > 1e-3, "sigma_m=2.4 residual %.2e > 1e-3", bad);
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome confocal_design_check() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  // Closed-form values as published for this configuration.
  const double f_ref = 0.430065, dmu_ref = -0.161772, s1_ref = 1.754826, s2_ref = 1.859803;
  o.check(std::abs(d.f - f_ref) <= 1e-5, "f=%.6f (ref %.6f)", d.f, f_ref);
  o.check(std::abs(d.dmu - dmu_ref) <= 1e-5, "mu1-mu2=%.6f (ref %.6f)", d.dmu, dmu_ref);
  o.check(std::abs(d.sigma_m[0] - s1_ref) <= 1e-5, "sigma_m1=%.6f (ref %.6f)", d.sigma_m[0], s1_ref);
  o.check(std::abs(d.sigma_m[1] - s2_ref) <= 1e-5, "sigma_m2=%.6f (ref %.6f)", d.sigma_m[1], s2_ref);

  const TransmissionSolver s(confocal_pair(1.0, 0.2, 1.5), 256);
  for (double sc : {5.0, 0.0, kInfinity}) {
    const DesignResult v = confocal_design(1.0, 0.2, 1.5, sc, 1.0);
    const double r1 = axis_residual(s, v.profile(), Axis::x1, 5.0);
    const double r2 = axis_residual(s, v.profile(), Axis::x2, 5.0);
    o.check(r1 <= 1e-6 && r2 <= 1e-6, "sc=%g residual %.2e/%.2e <= 1e-6", sc, r1, r2);
  }
  // The reference conductivities themselves, for the record.
  const double rr = axis_residual(s, ConductivityProfile{5, 1, {s1_ref, s2_ref}}, Axis::x2, 5.0);
  o.detail += "; residual with ref sigma_m " + std::to_string(rr);
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome uniform_core_field() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const NeutralityReport r = neutrality_report(confocal_pair(1.0, 0.2, 1.5), d.profile(), 256);
  const AxisReport& a = r.axes[1];
  const double slope = (2 * d.lambda - 1) * (d.mu1 + d.mu2) / (2 * d.lambda * (2 * d.mu2 + 1));
  o.check(a.core_gradient_deviation <= 1e-6, "deviation %.2e <= 1e-6", a.core_gradient_deviation);
  o.check(std::abs(a.core_gradient_mean.y - slope) <= 1e-6, "mean %.9f vs %.9f", a.core_gradient_mean.y, slope);
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome area_relation() {
  Outcome o;
  const double grid[10][2] = {{0.2, 1.5}, {0.0, 1.2}, {0.1, 1.3}, {0.3, 1.4}, {0.4, 1.6},
                              {0.5, 2.0}, {0.05, 1.1}, {0.25, 2.5}, {0.6, 1.8}, {0.15, 3.0}};
  double worst = 0.0;
  for (const auto& g : grid) {
    const DesignResult d = confocal_design(1.0, g[0], g[1], 5.0, 1.0);
    worst = std::max(worst, check_area_relation(d, confocal_pair(1.0, g[0], g[1])));
  }
  o.check(worst <= 1e-10, "max |2 lambda/(mu1+mu2) + f| = %.2e <= 1e-10 over 10 designs", worst);
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome newtonian_identity() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const IdentityCheck c = combined_identity_check(confocal_pair(1.0, 0.2, 1.5), d);
  const double d1 = (1 - d.f * (1 + d.mu1 - d.mu2)) / 4, d2 = (1 - d.f * (1 + d.mu2 - d.mu1)) / 4;
  o.check(c.fit.rms_residual <= 1e-8, "rms %.2e <= 1e-8", c.fit.rms_residual);
  o.check(std::abs(c.fit.d1 - d1) <= 1e-6, "d1 %.9f vs %.9f", c.fit.d1, d1);
  o.check(std::abs(c.fit.d2 - d2) <= 1e-6, "d2 %.9f vs %.9f", c.fit.d2, d2);
  o.check(c.exterior_residual <= 1e-8, "exterior %.2e <= 1e-8", c.exterior_residual);
  LaurentMap m{{{1, 1.0}, {-1, 0.2}, {2, 0.1}}, 1.5};
  const IdentityCheck bad = combined_identity_check(laurent_domain(m), d);
  o.check(bad.fit.rms_residual >= 1e-4, "non-confocal rms %.2e >= 1e-4", bad.fit.rms_residual);
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome free_bvp() {
  Outcome o;
  const double geos[3][2] = {{0.2, 1.5}, {0.1, 1.8}, {0.3, 2.0}};
  double worst = 0.0;
  for (const auto& g : geos) {
    const DesignResult d = confocal_design(1.0, g[0], g[1], 5.0, 1.0);
    const FreeBvpReport r = free_bvp_residual(confocal_pair(1.0, g[0], g[1]), d.f, d.beta);
    worst = std::max({worst, r.harmonicity, r.outer_bc, r.inner_bc});
  }
  o.check(worst <= 1e-5, "designed max residual %.2e <= 1e-5", worst);
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const FreeBvpReport off = free_bvp_residual(confocal_pair(1.0, 0.2, 1.5), d.f, -d.f * (d.dmu + 0.1));
  o.check(off.inner_bc >= 1e-2, "dmu+0.1 inner residual %.2e >= 1e-2", off.inner_bc);
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome duality() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const TransmissionSolver s(confocal_pair(1.0, 0.2, 1.5), 256);
  const auto one = ConductivityProfile::isotropic(5.0, 1.0, d.sigma_m[0]);
  const double r1 = axis_residual(s, one, Axis::x1, 5.0);
  const double r2 = axis_residual(s, reciprocal_dual(one), Axis::x2, 5.0);
  o.check(r1 <= 1e-7, "primal e1 residual %.2e", r1);
  o.check(r2 <= 1e-7, "dual e2 residual %.2e <= 1e-7", r2);
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome laurent_factor() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  const double f1 = std::abs(neutrality_factor(1, d.f, 1.5, d.beta));
  o.check(f1 <= 1e-12, "n=1 factor %.2e <= 1e-12", f1);
  double least = 1e300;
  for (int n = 2; n <= 5; ++n) least = std::min(least, std::abs(neutrality_factor(n, d.f, 1.5, d.beta)));
  o.check(least >= 1e-3, "min n=2..5 factor %.3e >= 1e-3", least);
  bool mono = true;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double r0 : {1.1, 1.3, 1.5, 2.0, 3.0})
      for (int n = 1; n < 6; ++n)
        mono = mono && neutrality_factor(n + 1, f, r0, 0.0) < neutrality_factor(n, f, r0, 0.0);
  o.check(mono, "monotone on 5x5 grid");
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome uniqueness_search() {
  Outcome o;
  const DesignResult d = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0);
  ShapePoint base;
  base.coeffs = {{-2, 0.0}, {-1, 0.2}, {2, 0.0}};
  base.r0 = 1.5;
  base.sigma_m = d.sigma_m;
  const SearchSpace space = SearchSpace::around(base, 5.0, 1.0);
  double worst_obj = 0.0, worst_gap = 0.0;
  bool converged = true;
  for (const ShapePoint& start : perturbed_starts(base, 2, 0.05, 5, 2024)) {
    const SearchResult r = search(space, start);
    worst_obj = std::max(worst_obj, r.objective);
    worst_gap = std::max(worst_gap, r.confocality_gap);
    converged = converged && r.converged;
  }
  o.check(worst_obj <= 1e-10 && converged, "5 starts: max objective %.2e <= 1e-10", worst_obj);
  o.check(worst_gap <= 1e-3, "max gap %.2e <= 1e-3", worst_gap);

  SearchSpace frozen = space;
  frozen.geometry_free = false;
  frozen.fixed_geometry = base;
  frozen.fixed_geometry.coeffs[2] = 0.1;
  ShapePoint start = frozen.fixed_geometry;
  const SearchResult fr = search(frozen, start);
  o.check(fr.objective >= 1e-6, "frozen a2=0.1 best objective %.2e >= 1e-6", fr.objective);
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome decay_orders() {
  Outcome o;
  const CoatedInclusion inc = disks(1.0, std::sqrt(2.0));
  const double e2 = decay_exponent(inc, ConductivityProfile::isotropic(5, 1, 2), HarmonicField({{2, 1.0}}), {5, 10});
  const double e1 = decay_exponent(inc, ConductivityProfile::isotropic(5, 1, 2.4), HarmonicField::uniform(Axis::x1), {5, 10});
  o.check(e2 >= 1.8, "neutral x1^2-x2^2 exponent %.3f >= 1.8", e2);
  o.check(std::abs(e1 - 1.0) <= 0.2, "non-neutral x1 exponent %.3f", e1);
  return o;
}

// 11 ------------------------------------------------------------------------
Outcome numerics_hygiene() {
  Outcome o;
  // Circle: S[cos kt] = -R/(2k) cos kt, S[1] = R ln R, K*[cos kt] = 0, K*[1] = 1/2,
  // and the exterior potential decays like (R/r)^k.
  const double R = 1.3;
  const Discretization d = discretize(make_ellipse({0, 0}, R, R, 0), 64);
  const DenseOperator S = single_layer_on_boundary_matrix(d);
  const DenseOperator K = kstar_matrix(d);
  std::vector<Vec2> far;
  for (int i = 0; i < 7; ++i) far.push_back({2.1 * std::cos(0.9 * i), 2.1 * std::sin(0.9 * i)});
  double err = 0.0;
  for (int k = 0; k <= 12; ++k) {
    std::vector<double> phi(d.n);
    for (std::size_t i = 0; i < d.n; ++i) phi[i] = std::cos(k * d.t[i]);
    const double s_eig = k == 0 ? R * std::log(R) : -R / (2.0 * k);
    const double k_eig = k == 0 ? 0.5 : 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
      double s = 0.0, kk = 0.0;
      for (std::size_t j = 0; j < d.n; ++j) {
        s += S(i, j) * phi[j];
        kk += K(i, j) * phi[j];
      }
      err = std::max({err, std::abs(s - s_eig * phi[i]), std::abs(kk - k_eig * phi[i])});
    }
    const std::vector<double> v = single_layer_off(d, phi, far);
    for (std::size_t m = 0; m < far.size(); ++m) {
      const double r = norm(far[m]), th = std::atan2(far[m].y, far[m].x);
      const double expect = k == 0 ? R * std::log(r) : -R / (2.0 * k) * std::pow(R / r, k) * std::cos(k * th);
      err = std::max(err, std::abs(v[m] - expect));
    }
  }
  o.check(err <= 1e-10, "circle Fourier suite max error %.2e <= 1e-10", err);

  // Designed thin confocal shell: the residual is a pure discretization error.
  const DesignResult dr = confocal_design(1.0, 0.5, 1.1, 5.0, 1.0);
  const CoatedInclusion inc = confocal_pair(1.0, 0.5, 1.1);
  auto resid = [&](std::size_t n) {
    const TransmissionSolver s(inc, n);
    return std::max(axis_residual(s, dr.profile(), Axis::x1, 5.0), axis_residual(s, dr.profile(), Axis::x2, 5.0));
  };
  const double e64 = resid(64), e128 = resid(128);
  o.check(e64 >= 10 * e128, "thin confocal shell residual N=64 %.2e, N=128 %.2e (factor %.1f >= 10)", e64, e128,
          e64 / e128);
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, "disk neutrality", disk_neutrality},
      {2, "confocal design", confocal_design_check},
      {3, "uniform core field", uniform_core_field},
      {4, "area relation", area_relation},
      {5, "newtonian identity", newtonian_identity},
      {6, "free boundary problem", free_bvp},
      {7, "duality", duality},
      {8, "laurent factor", laurent_factor},
      {9, "uniqueness search", uniqueness_search},
      {10, "decay orders", decay_orders},
      {11, "numerics hygiene", numerics_hygiene},
  };
  int failed = 0;
  for (const Item& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2d  %-22s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  (void)kPi;
  return failed == 0 ? 0 : 1;
}
