#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "neutral/geometry.hpp"

namespace neutral {

/// Decoded search point: a shell map with a_1 = 1 and real coefficients,
/// plus the two matrix conductivities.
struct ShapePoint {
  std::map<int, double> coeffs;  // n in -M..M, n not in {0, 1}
  double r0 = 1.5;
  std::array<double, 2> sigma_m{1.0, 1.0};

  LaurentMap map() const;
  double confocality_gap() const;  // max |a_n| over |n| not in {0, 1}
};

/// Parametrization of the hypothesis space. Variables are, in order,
/// a_n for n = -M..M with n not in {0, 1}, then r0, ln sigma_m1, ln sigma_m2.
struct SearchSpace {
  // NOTE: when geometry_free is false the variables are ln sigma_m1, ln sigma_m2 only.
  int order = 2;
  double sigma_c = 5.0;
  double sigma_s = 1.0;
  std::size_t nodes = 128;
  double probe_radius = 5.0;
  std::size_t probe_points = 64;
  double coeff_bound = 0.5;
  std::array<double, 2> r0_bounds{1.05, 4.0};
  std::array<double, 2> log_sigma_bounds{-12.0, 12.0};
  bool geometry_free = true;  // false: only sigma_m varies
  ShapePoint fixed_geometry;  // geometry used when geometry_free is false

  std::vector<int> coefficient_indices() const;
  std::size_t dimension() const;
  std::vector<double> encode(const ShapePoint& p) const;
  ShapePoint decode(std::span<const double> x) const;

  /// Probe radius 3 x the outer radius of the given start geometry.
  static SearchSpace around(const ShapePoint& start, double sigma_c, double sigma_s, int order = 2);
};

inline constexpr double kInvalidPenalty = 1e6;

/// Sum over both axes of the mean squared probe residual of u - x_j.
/// Invalid parameters cost kInvalidPenalty plus the constraint violation.
double objective(const SearchSpace& space, std::span<const double> x);
double objective(const SearchSpace& space, const ShapePoint& p);

struct SearchOptions {
  std::size_t max_evaluations = 5000;
  double shrink_tol = 1e-12;        // simplex diameter
  double value_tol = 1e-22;         // spread of objective values over the simplex
  double initial_step = 0.05;
  std::size_t max_restarts = 8;
};

struct SearchResult {
  ShapePoint best;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<double> history;      // best objective after each iteration
  std::vector<double> gap_history;  // confocality gap of that best point
  double confocality_gap = 0.0;
  bool converged = false;
};

/// Restarted Nelder-Mead over the variables of `space`.
SearchResult search(const SearchSpace& space, const ShapePoint& start, const SearchOptions& opts = {});

/// Seeded random perturbation of the non-confocal coefficients (uniform in
/// [-amplitude, amplitude] for each |n| >= 2 coefficient).
std::vector<ShapePoint> perturbed_starts(const ShapePoint& base, int order, double amplitude, std::size_t count,
                                         std::uint64_t seed);

struct PerturbationRow {
  double amplitude = 0.0;
  bool valid = true;
  double residual_fixed = 0.0;      // sqrt(objective) with the base sigma_m
  double residual_optimized = 0.0;  // sqrt(objective) after re-optimizing sigma_m
  std::array<double, 2> sigma_m_optimized{0.0, 0.0};
};

/// Inject a_2 = amplitude into a neutral base and measure the residual.
std::vector<PerturbationRow> perturbation_study(const SearchSpace& space, const ShapePoint& base,
                                                std::span<const double> amplitudes);

/// Generic simplex minimizer used by search; exposed for tests.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  std::vector<double> history;
  std::vector<std::vector<double>> trajectory;  // best point after each iteration
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                          const SearchOptions& opts);

}  // namespace neutral
