#pragma once

#include <map>
#include <set>
#include <string_view>

#include "neutral/geometry.hpp"

namespace neutral {

/// (1 - f r0^{-2n}) (1 - f r0^{2n}) - beta^2.
///
/// A Laurent coefficient a_n of a neutral shell map can be nonzero only where
/// this vanishes. beta is the core-boundary anisotropy -f (mu1 - mu2).
double neutrality_factor(int n, double f, double r0, double beta);

enum class Verdict { confocal_compatible, incompatible, degenerate };

std::string_view to_string(Verdict v);

struct LaurentClassification {
  std::map<int, double> factors;  // n = -M..M, n != 0
  std::set<int> admissible_n;     // |factor| <= tol
  std::set<int> support;          // |a_n| > coeff_tol
  Verdict verdict = Verdict::degenerate;
  double tol = 0.0;
  double coeff_tol = 0.0;
};

struct ClassifyOptions {
  double tol = 1e-9;
  double coeff_tol = 1e-10;
};

LaurentClassification classify(const LaurentMap& map, double f, double beta, ClassifyOptions opts = {});

}  // namespace neutral
