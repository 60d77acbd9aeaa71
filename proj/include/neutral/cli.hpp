#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "neutral/geometry.hpp"
#include "neutral/transmission.hpp"

namespace neutral::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

/// Schema-checked experiment description. Parsing validates every section
/// (unknown keys rejected) before any computation happens.
struct ExperimentConfig {
  nlohmann::json raw;  // after flag overrides; hashed into reports

  std::optional<CoatedInclusion> inclusion;
  std::optional<LaurentMap> map;
  std::optional<std::array<double, 3>> confocal;  // a1, a_-1, r0

  std::optional<double> sigma_c;
  std::optional<double> sigma_s;
  std::optional<std::array<double, 2>> sigma_m;  // empty: design it

  std::size_t nodes = 256;
  std::optional<double> probe_radius;
  std::size_t probe_points = 64;
  double tol = 1e-9;
  double coeff_tol = 1e-10;
  double near_factor = 0.2;
  std::uint64_t seed = 0;

  nlohmann::json section(const std::string& name) const;
};

/// Overrides (from --nodes / --seed / --tol) are merged into `j` first.
ExperimentConfig parse_config(nlohmann::json j);

/// Whole front end; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neutral::cli
