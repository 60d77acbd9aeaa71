#include "neutral/shapesearch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "neutral/error.hpp"
#include "neutral/transmission.hpp"

namespace neutral {

LaurentMap ShapePoint::map() const {
  LaurentMap m;
  m.coeffs[1] = 1.0;
  for (const auto& [n, a] : coeffs) {
    if (a != 0.0) m.coeffs[n] = a;
  }
  m.r0 = r0;
  return m;
}

double ShapePoint::confocality_gap() const {
  double g = 0.0;
  for (const auto& [n, a] : coeffs) {
    if (std::abs(n) > 1) g = std::max(g, std::abs(a));
  }
  return g;
}

std::vector<int> SearchSpace::coefficient_indices() const {
  std::vector<int> idx;
  for (int n = -order; n <= order; ++n) {
    if (n != 0 && n != 1) idx.push_back(n);
  }
  return idx;
}

std::size_t SearchSpace::dimension() const {
  return geometry_free ? coefficient_indices().size() + 3 : 2;
}

std::vector<double> SearchSpace::encode(const ShapePoint& p) const {
  std::vector<double> x;
  if (geometry_free) {
    for (int n : coefficient_indices()) {
      auto it = p.coeffs.find(n);
      x.push_back(it == p.coeffs.end() ? 0.0 : it->second);
    }
    x.push_back(p.r0);
  }
  x.push_back(std::log(p.sigma_m[0]));
  x.push_back(std::log(p.sigma_m[1]));
  return x;
}

ShapePoint SearchSpace::decode(std::span<const double> x) const {
  if (x.size() != dimension()) throw ValidationError("search vector has the wrong dimension");
  ShapePoint p;
  std::size_t k = 0;
  if (geometry_free) {
    for (int n : coefficient_indices()) p.coeffs[n] = x[k++];
    p.r0 = x[k++];
  } else {
    p.coeffs = fixed_geometry.coeffs;
    p.r0 = fixed_geometry.r0;
  }
  p.sigma_m = {std::exp(x[k]), std::exp(x[k + 1])};
  return p;
}

SearchSpace SearchSpace::around(const ShapePoint& start, double sigma_c, double sigma_s, int order) {
  SearchSpace s;
  s.order = order;
  s.sigma_c = sigma_c;
  s.sigma_s = sigma_s;
  s.fixed_geometry = start;
  s.probe_radius = 3.0 * laurent_domain(start.map()).outer.max_radius();
  return s;
}

namespace {

double bound_violation(const SearchSpace& space, std::span<const double> x) {
  double v = 0.0;
  std::size_t k = 0;
  if (space.geometry_free) {
    for (std::size_t i = 0; i < space.coefficient_indices().size(); ++i, ++k) {
      v += std::max(0.0, std::abs(x[k]) - space.coeff_bound);
    }
    v += std::max(0.0, space.r0_bounds[0] - x[k]) + std::max(0.0, x[k] - space.r0_bounds[1]);
    ++k;
  }
  for (std::size_t j = 0; j < 2; ++j, ++k) {
    v += std::max(0.0, space.log_sigma_bounds[0] - x[k]) + std::max(0.0, x[k] - space.log_sigma_bounds[1]);
  }
  return v;
}

double probe_mean_square(const SearchSpace& space, const TransmissionSolver& solver, const ConductivityProfile& p) {
  const ContrastParams c = contrasts(p);
  const Vec2 center = solver.outer().curve.center();
  std::vector<Vec2> probe(space.probe_points);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double a = 2.0 * 3.14159265358979323846 * static_cast<double>(i) / static_cast<double>(probe.size());
    probe[i] = {center.x + space.probe_radius * std::cos(a), center.y + space.probe_radius * std::sin(a)};
  }
  double total = 0.0;
  for (Axis axis : {Axis::x1, Axis::x2}) {
    const DensityPair pair = solver.solve(c.lambda, c.mu[index(axis)], HarmonicField::uniform(axis));
    const std::vector<double> s_in = single_layer_off(solver.inner(), pair.phi, probe);
    const std::vector<double> s_out = single_layer_off(solver.outer(), pair.psi, probe);
    double sq = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double d = s_in[i] + s_out[i];
      sq += d * d;
    }
    total += sq / static_cast<double>(probe.size());
  }
  return total;
}

}  // namespace

double objective(const SearchSpace& space, std::span<const double> x) {
  const double violation = bound_violation(space, x);
  if (violation > 0.0) return kInvalidPenalty + violation;
  const ShapePoint p = space.decode(x);
  try {
    const CoatedInclusion inc = laurent_domain(p.map());
    const double rmax = inc.outer.max_radius();
    if (space.probe_radius < 2.0 * rmax) {
      return kInvalidPenalty + (2.0 * rmax - space.probe_radius);
    }
    const TransmissionSolver solver(inc, space.nodes);
    return probe_mean_square(space, solver, {space.sigma_c, space.sigma_s, p.sigma_m});
  } catch (const ValidationError&) {
    return kInvalidPenalty + 1.0;
  } catch (const NumericalError&) {
    return kInvalidPenalty + 1.0;
  }
}

double objective(const SearchSpace& space, const ShapePoint& p) {
  const std::vector<double> x = space.encode(p);
  return objective(space, x);
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                          const SearchOptions& opts) {
  const std::size_t n = start.size();
  const double dim = static_cast<double>(n);
  // Dimension-adaptive coefficients (Gao & Han).
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dim;
  const double rho = 0.75 - 1.0 / (2.0 * dim);
  const double sigma = 1.0 - 1.0 / dim;

  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };

  res.x = start;
  res.value = eval(start);
  res.history.push_back(res.value);
  res.trajectory.push_back(res.x);
  if (res.value <= opts.value_tol) {
    res.converged = true;
    return res;
  }

  for (std::size_t restart = 0; restart <= opts.max_restarts; ++restart) {
    const double before = res.value;
    std::vector<std::vector<double>> simplex(n + 1, res.x);
    std::vector<double> values(n + 1, res.value);
    for (std::size_t i = 0; i < n; ++i) {
      simplex[i + 1][i] += opts.initial_step * std::max(1.0, std::abs(res.x[i]));
      values[i + 1] = eval(simplex[i + 1]);
    }

    bool local_converged = false;
    while (res.evaluations < opts.max_evaluations) {
      std::vector<std::size_t> order(n + 1);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      {
        std::vector<std::vector<double>> s2;
        std::vector<double> v2;
        for (std::size_t i : order) {
          s2.push_back(simplex[i]);
          v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
      }
      if (values[0] < res.value) {
        res.value = values[0];
        res.x = simplex[0];
      }
      ++res.iterations;
      res.history.push_back(res.value);
      res.trajectory.push_back(res.x);

      double diameter = 0.0;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[0][k]));
      if (diameter <= opts.shrink_tol || values[n] - values[0] <= opts.value_tol) {
        local_converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dim;
      auto along = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (simplex[n][k] - centroid[k]);
        return x;
      };

      const std::vector<double> xr = along(-alpha);
      const double fr = eval(xr);
      if (fr < values[0]) {
        const std::vector<double> xe = along(-alpha * gamma);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[n] = xe;
          values[n] = fe;
        } else {
          simplex[n] = xr;
          values[n] = fr;
        }
        continue;
      }
      if (fr < values[n - 1]) {
        simplex[n] = xr;
        values[n] = fr;
        continue;
      }
      const bool outside = fr < values[n];
      const std::vector<double> xc = along(outside ? -alpha * rho : rho);
      const double fc = eval(xc);
      if (fc < (outside ? fr : values[n])) {
        simplex[n] = xc;
        values[n] = fc;
        continue;
      }
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]);
        values[i] = eval(simplex[i]);
      }
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (values[i] < res.value) {
        res.value = values[i];
        res.x = simplex[i];
      }
    }
    if (!local_converged) {
      res.converged = false;
      return res;
    }
    // A restart that no longer improves confirms the minimum.
    if (res.value <= opts.value_tol || res.value >= before * (1.0 - 1e-3)) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;
  return res;
}

SearchResult search(const SearchSpace& space, const ShapePoint& start, const SearchOptions& opts) {
  const std::vector<double> x0 = space.encode(start);
  if (objective(space, x0) >= kInvalidPenalty) throw ValidationError("search start does not decode to a valid inclusion");

  auto f = [&](std::span<const double> x) { return objective(space, x); };
  const SimplexResult sr = nelder_mead(f, x0, opts);

  SearchResult r;
  r.best = space.decode(sr.x);
  r.objective = sr.value;
  r.iterations = sr.iterations;
  r.evaluations = sr.evaluations;
  r.history = sr.history;
  for (const auto& x : sr.trajectory) r.gap_history.push_back(space.decode(x).confocality_gap());
  r.confocality_gap = r.best.confocality_gap();
  r.converged = sr.converged;
  return r;
}

std::vector<ShapePoint> perturbed_starts(const ShapePoint& base, int order, double amplitude, std::size_t count,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<ShapePoint> starts;
  for (std::size_t i = 0; i < count; ++i) {
    ShapePoint p = base;
    for (int n = -order; n <= order; ++n) {
      if (std::abs(n) >= 2) p.coeffs[n] = u(rng);
    }
    starts.push_back(p);
  }
  return starts;
}

std::vector<PerturbationRow> perturbation_study(const SearchSpace& space, const ShapePoint& base,
                                                std::span<const double> amplitudes) {
  std::vector<PerturbationRow> rows;
  for (double eps : amplitudes) {
    PerturbationRow row;
    row.amplitude = eps;
    ShapePoint p = base;
    p.coeffs[2] = eps;

    SearchSpace frozen = space;
    frozen.geometry_free = false;
    frozen.fixed_geometry = p;
    const double fixed = objective(frozen, p);
    if (fixed >= kInvalidPenalty) {
      row.valid = false;
      rows.push_back(row);
      continue;
    }
    row.residual_fixed = std::sqrt(fixed);
    SearchOptions opts;
    opts.max_evaluations = 800;
    auto f = [&](std::span<const double> x) { return objective(frozen, x); };
    const SimplexResult sr = nelder_mead(f, frozen.encode(p), opts);
    row.residual_optimized = std::sqrt(sr.value);
    row.sigma_m_optimized = frozen.decode(sr.x).sigma_m;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace neutral
