#pragma once

#include <array>

#include "neutral/geometry.hpp"
#include "neutral/transmission.hpp"

namespace neutral {

/// Closed-form neutral coating for a confocal pair.
///
/// beta is the anisotropy of the free-boundary data on the core boundary,
/// grad w = x + beta (x1, -x2), and equals -f (mu1 - mu2). It is the
/// quantity entering the Laurent coefficient relations.
struct DesignResult {
  std::array<double, 2> sigma_m{0.0, 0.0};
  double f = 0.0;
  double lambda = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double dmu = 0.0;  // mu1 - mu2
  double smu = 0.0;  // mu1 + mu2
  double beta = 0.0;
  double sigma_c = 0.0;
  double sigma_s = 0.0;

  ConductivityProfile profile() const { return {sigma_c, sigma_s, sigma_m}; }
};

/// Isotropic matrix conductivity making concentric disks with volume
/// fraction f neutral: (ss + sc)(sm - ss) + f (ss - sc)(sm + ss) = 0.
double disk_matrix_conductivity(double sigma_c, double sigma_s, double f);

/// Volume fraction |D| / |Omega| of the confocal pair from its map.
double confocal_volume_fraction(double a1, double a_minus1, double r0);

DesignResult confocal_design(double a1, double a_minus1, double r0, double sigma_c, double sigma_s);

/// Inverse of mu = (ss + sm) / (2 (ss - sm)).
double sigma_from_mu(double mu, double sigma_s);

/// (1/sc, 1/ss, 1/sm1) with 1/0 = inf and 1/inf = 0; isotropic matrix.
ConductivityProfile reciprocal_dual(const ConductivityProfile& p);

/// |2 lambda / (mu1 + mu2) + |D| / |Omega||, areas by boundary quadrature.
double check_area_relation(const DesignResult& dr, const CoatedInclusion& inc, std::size_t nodes = 256);

}  // namespace neutral
