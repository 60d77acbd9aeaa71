#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "neutral/geometry.hpp"
#include "neutral/layerpot.hpp"

namespace neutral {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Core / shell / matrix conductivities. sigma_c may be 0 or +inf; the
/// matrix is diagonal diag(sigma_m[0], sigma_m[1]) in principal axes.
struct ConductivityProfile {
  double sigma_c = 1.0;
  double sigma_s = 1.0;
  std::array<double, 2> sigma_m{1.0, 1.0};

  static ConductivityProfile isotropic(double sigma_c, double sigma_s, double sigma_m) {
    return {sigma_c, sigma_s, {sigma_m, sigma_m}};
  }
  bool is_isotropic() const { return sigma_m[0] == sigma_m[1]; }

  /// Throws ValidationError / DegenerateContrastError.
  void validate() const;
};

/// lambda = (sc + ss) / (2 (sc - ss)),  mu_j = (ss + sm_j) / (2 (ss - sm_j)).
/// mu_j is +-inf when sm_j == ss (invisible outer interface).
struct ContrastParams {
  double lambda = 0.0;
  std::array<double, 2> mu{0.0, 0.0};
};

ContrastParams contrasts(const ConductivityProfile& p);

/// lambda alone; sigma_c = 0 and inf map to -1/2 and +1/2 exactly.
double core_contrast(double sigma_c, double sigma_s);

enum class Axis { x1 = 1, x2 = 2 };

inline std::size_t index(Axis a) { return a == Axis::x1 ? 0 : 1; }

/// Harmonic polynomial background potential h = Re sum_k c_k z^k.
class HarmonicField {
 public:
  HarmonicField() = default;
  explicit HarmonicField(std::map<int, complex> coeffs);

  static HarmonicField uniform(Axis a);

  double value(Vec2 p) const;
  Vec2 gradient(Vec2 p) const;
  bool is_constant() const;
  const std::map<int, complex>& coeffs() const { return coeffs_; }

 private:
  std::map<int, complex> coeffs_;
};

/// Boundary densities of u = h + S_D[phi] + S_Omega[psi].
struct DensityPair {
  std::vector<double> phi;  // on inner nodes
  std::vector<double> psi;  // on outer nodes
  std::optional<Axis> axis;
  HarmonicField field;
  double rcond = 0.0;  // reciprocal condition estimate of the dense system
};

struct UEval {
  std::vector<double> value;
  std::vector<Vec2> gradient;
};

/// Assembled Nystrom blocks for one coated inclusion at fixed resolution.
/// Operators depend only on geometry, so both axes (and any number of
/// contrast values) reuse them.
class TransmissionSolver {
 public:
  TransmissionSolver(const CoatedInclusion& inc, std::size_t nodes);

  const Discretization& inner() const { return inner_; }
  const Discretization& outer() const { return outer_; }

  /// (lambda I - K*_D) phi - d/dnu S_Omega psi = dh/dnu  on the inner curve
  /// -d/dnu S_D phi + (mu I - K*_Omega) psi = dh/dnu     on the outer curve
  /// with mean-zero densities enforced by rank-one augmentation.
  DensityPair solve(double lambda, double mu, const HarmonicField& h) const;

  /// Axis-j solve with mu replaced by mu_j.
  DensityPair solve_uniform(const ConductivityProfile& p, Axis j) const;

  UEval eval(const DensityPair& pair, std::span<const Vec2> points, NearZone zone = {}) const;

  /// Weighted means sum phi w and sum psi w.
  std::array<double, 2> weighted_means(const DensityPair& pair) const;

 private:
  Discretization inner_;
  Discretization outer_;
  DenseOperator kstar_inner_;
  DenseOperator kstar_outer_;
  DenseOperator inner_from_outer_;  // d/dnu on inner nodes of S_Omega
  DenseOperator outer_from_inner_;  // d/dnu on outer nodes of S_D
};

DensityPair solve_uniform(const CoatedInclusion& inc, const ConductivityProfile& p, Axis j, std::size_t nodes);

UEval eval_u(const CoatedInclusion& inc, const DensityPair& pair, std::span<const Vec2> points);

struct AxisReport {
  double residual = 0.0;       // max |u - h| on the probe circle
  double rms_residual = 0.0;   // root mean square of u - h on the probe circle
  Vec2 first_moment;           // sum y phi w + sum y psi w
  Vec2 core_gradient_mean;
  double core_gradient_deviation = 0.0;  // max |grad u - mean| on the core grid
  double predicted_core_slope = 0.0;     // d u_j / d x_j for a neutral inclusion
  double core_slope_error = 0.0;
  double phi_identity_residual = 0.0;    // phi vs (2/(2 lambda - 1)) du/dnu|_-
  double psi_identity_residual = 0.0;    // psi vs (2/(2 mu_j + 1)) n_j
  std::array<double, 2> density_means{0.0, 0.0};
  double rcond = 0.0;
};

struct NeutralityReport {
  std::size_t nodes = 0;
  double probe_radius = 0.0;
  std::size_t probe_points = 0;
  ContrastParams contrast;
  std::array<AxisReport, 2> axes;

  double max_residual() const;
};

struct ProbeOptions {
  std::optional<double> radius;  // default 3 x outer max radius
  std::size_t points = 64;
  bool identities = true;        // the near-boundary identity check is the costly part
};

NeutralityReport neutrality_report(const CoatedInclusion& inc, const ConductivityProfile& p, std::size_t nodes,
                                   const ProbeOptions& probe = {});

/// Same report from an already assembled solver.
NeutralityReport neutrality_report(const TransmissionSolver& solver, const ConductivityProfile& p,
                                   const ProbeOptions& probe = {});

/// Far-field decay order of u - h between two probe radii, for isotropic
/// matrix and a harmonic polynomial h.
double decay_exponent(const CoatedInclusion& inc, const ConductivityProfile& p, const HarmonicField& h,
                      std::array<double, 2> radii, std::size_t nodes = 256);

/// Max |u - h| over m points of a circle about the outer curve's center.
double probe_residual(const TransmissionSolver& solver, const DensityPair& pair, double radius, std::size_t m);

}  // namespace neutral
