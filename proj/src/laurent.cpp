#include "neutral/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "neutral/error.hpp"

namespace neutral {

double neutrality_factor(int n, double f, double r0, double beta) {
  if (!(f > 0.0 && f < 1.0)) throw ValidationError("volume fraction must lie in (0, 1)");
  if (!(r0 > 1.0) || !std::isfinite(r0)) throw ValidationError("conformal modulus r0 must exceed 1");
  const double up = std::pow(r0, 2.0 * std::abs(n));
  const double down = 1.0 / up;
  const double a = 1.0 - f * down;
  const double b = 1.0 - f * up;
  return a * b - beta * beta;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::confocal_compatible: return "confocal_compatible";
    case Verdict::incompatible: return "incompatible";
    case Verdict::degenerate: return "degenerate";
  }
  return "unknown";
}

LaurentClassification classify(const LaurentMap& map, double f, double beta, ClassifyOptions opts) {
  check_univalent(map);
  LaurentClassification c;
  c.tol = opts.tol;
  c.coeff_tol = opts.coeff_tol;

  int order = 1;
  for (const auto& [n, a] : map.coeffs) {
    order = std::max(order, std::abs(n));
    if (std::abs(a) > opts.coeff_tol) c.support.insert(n);
  }
  for (int n = -order; n <= order; ++n) {
    if (n == 0) continue;
    const double v = neutrality_factor(n, f, map.r0, beta);
    c.factors[n] = v;
    if (std::abs(v) <= opts.tol) c.admissible_n.insert(n);
  }

  if (c.support.empty()) {
    c.verdict = Verdict::degenerate;
    return c;
  }
  bool all_admissible = true;
  std::set<int> positive;
  for (int n : c.support) {
    if (!c.admissible_n.contains(n)) all_admissible = false;
    positive.insert(std::abs(n));
  }
  c.verdict = all_admissible && positive == std::set<int>{1} ? Verdict::confocal_compatible : Verdict::incompatible;
  return c;
}

}  // namespace neutral
