#include "neutral/designer.hpp"

#include <cmath>
#include <sstream>

#include "neutral/error.hpp"

namespace neutral {

double disk_matrix_conductivity(double sigma_c, double sigma_s, double f) {
  if (!(f > 0.0 && f < 1.0)) throw ValidationError("volume fraction must lie in (0, 1)");
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw ValidationError("shell conductivity must be finite and positive");
  if (!(sigma_c >= 0.0)) throw ValidationError("core conductivity must be in [0, inf]");
  double sm;
  if (std::isinf(sigma_c)) {
    sm = sigma_s * (1.0 + f) / (1.0 - f);
  } else {
    sm = sigma_s * (sigma_s + sigma_c - f * (sigma_s - sigma_c)) / (sigma_s + sigma_c + f * (sigma_s - sigma_c));
  }
  if (!(sm > 0.0) || !std::isfinite(sm)) {
    throw NoValidCoatingError("no positive matrix conductivity neutralizes these disks");
  }
  return sm;
}

double confocal_volume_fraction(double a1, double a_minus1, double r0) {
  return (a1 * a1 - a_minus1 * a_minus1) / (a1 * a1 * r0 * r0 - a_minus1 * a_minus1 / (r0 * r0));
}

double sigma_from_mu(double mu, double sigma_s) {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw ValidationError("shell conductivity must be finite and positive");
  if (std::isnan(mu) || !(std::abs(mu) > 0.5)) {
    throw NoValidCoatingError("|mu| <= 1/2 corresponds to a nonpositive or infinite conductivity");
  }
  if (std::isinf(mu)) return sigma_s;
  return sigma_s * (2.0 * mu - 1.0) / (2.0 * mu + 1.0);
}

DesignResult confocal_design(double a1, double a_minus1, double r0, double sigma_c, double sigma_s) {
  // Validates the pair (a1 > a_minus1 >= 0, r0 > 1).
  (void)confocal_pair(a1, a_minus1, r0);
  DesignResult d;
  d.sigma_c = sigma_c;
  d.sigma_s = sigma_s;
  d.lambda = core_contrast(sigma_c, sigma_s);
  d.f = confocal_volume_fraction(a1, a_minus1, r0);
  // n = 1 coefficient relation: f a_{-1} r0^-2 = a_{-1} + beta a_1.
  d.beta = a_minus1 * (d.f / (r0 * r0) - 1.0) / a1;
  d.dmu = -d.beta / d.f;
  d.smu = -2.0 * d.lambda / d.f;
  d.mu1 = 0.5 * (d.smu + d.dmu);
  d.mu2 = 0.5 * (d.smu - d.dmu);
  const double mus[2] = {d.mu1, d.mu2};
  for (std::size_t j = 0; j < 2; ++j) {
    if (!(std::abs(mus[j]) > 0.5)) {
      std::ostringstream msg;
      msg << "no positive matrix conductivity along x" << (j + 1) << ": mu" << (j + 1) << " = " << mus[j]
          << " has |mu| <= 1/2; admissible designs need |(-2 lambda / f) " << (j == 0 ? '+' : '-')
          << " (mu1 - mu2)| > 1 with lambda = " << d.lambda << ", f = " << d.f;
      throw NoValidCoatingError(msg.str());
    }
    d.sigma_m[j] = sigma_from_mu(mus[j], sigma_s);
  }
  return d;
}

ConductivityProfile reciprocal_dual(const ConductivityProfile& p) {
  auto inv = [](double s) { return s == 0.0 ? kInfinity : (std::isinf(s) ? 0.0 : 1.0 / s); };
  return ConductivityProfile::isotropic(inv(p.sigma_c), inv(p.sigma_s), inv(p.sigma_m[0]));
}

double check_area_relation(const DesignResult& dr, const CoatedInclusion& inc, std::size_t nodes) {
  const double f = area(discretize(inc.inner, nodes)) / area(discretize(inc.outer, nodes));
  return std::abs(2.0 * dr.lambda / dr.smu + f);
}

}  // namespace neutral
