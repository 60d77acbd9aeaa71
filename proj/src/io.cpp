#include "neutral/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "neutral/error.hpp"

namespace neutral::io {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ValidationError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
  }
}

double conductivity_from_json(const json& j, std::string_view where) {
  double s = 0.0;
  if (j.is_string()) {
    const std::string v = j.get<std::string>();
    if (v != "inf" && v != "infinity") throw ValidationError(std::string(where) + ": expected a number or \"inf\"");
    s = kInfinity;
  } else if (j.is_number()) {
    s = j.get<double>();
  } else {
    throw ValidationError(std::string(where) + ": expected a number or \"inf\"");
  }
  if (std::isnan(s) || s < 0.0) throw ValidationError(std::string(where) + ": conductivity must be >= 0");
  return s;
}

json conductivity_to_json(double s) {
  if (std::isinf(s)) return "inf";
  return s;
}

namespace {

complex complex_from_json(const json& j, std::string_view where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError(std::string(where) + ": expected a number or [re, im]");
}

json complex_to_json(complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

Curve curve_from_json(const json& j) {
  check_keys(j, {"fourier", "k_min"}, "curve");
  if (!j.contains("fourier") || !j.at("fourier").is_array()) throw ValidationError("curve: 'fourier' array required");
  if (!j.contains("k_min") || !j.at("k_min").is_number_integer()) throw ValidationError("curve: integer 'k_min' required");
  std::vector<complex> c;
  for (const auto& e : j.at("fourier")) c.push_back(complex_from_json(e, "curve.fourier"));
  return Curve::from_fourier(std::move(c), j.at("k_min").get<int>());
}

json to_json(const Curve& c) {
  json f = json::array();
  for (const auto& z : c.coeffs()) f.push_back(complex_to_json(z));
  return {{"fourier", f}, {"k_min", c.k_min()}};
}

LaurentMap laurent_from_json(const json& j) {
  check_keys(j, {"coeffs", "r0"}, "laurent map");
  if (!j.contains("coeffs") || !j.at("coeffs").is_object()) throw ValidationError("laurent map: 'coeffs' object required");
  if (!j.contains("r0") || !j.at("r0").is_number()) throw ValidationError("laurent map: numeric 'r0' required");
  LaurentMap m;
  for (const auto& [key, value] : j.at("coeffs").items()) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ValidationError("laurent map: coefficient key '" + key + "' is not an integer");
    }
    m.coeffs[n] = complex_from_json(value, "laurent map coefficient");
  }
  m.r0 = j.at("r0").get<double>();
  return m;
}

json to_json(const LaurentMap& m) {
  json c = json::object();
  for (const auto& [n, a] : m.coeffs) {
    c[std::to_string(n)] = a.imag() == 0.0 ? json(a.real()) : complex_to_json(a);
  }
  return {{"coeffs", c}, {"r0", m.r0}};
}

json to_json(const DesignResult& d) {
  return {{"sigma_m", {d.sigma_m[0], d.sigma_m[1]}},
          {"f", d.f},
          {"lambda", d.lambda},
          {"mu1", d.mu1},
          {"mu2", d.mu2},
          {"dmu", d.dmu},
          {"smu", d.smu},
          {"beta", d.beta},
          {"sigma_c", conductivity_to_json(d.sigma_c)},
          {"sigma_s", conductivity_to_json(d.sigma_s)}};
}

json to_json(const ConductivityProfile& p) {
  return {{"sigma_c", conductivity_to_json(p.sigma_c)},
          {"sigma_s", conductivity_to_json(p.sigma_s)},
          {"sigma_m", {conductivity_to_json(p.sigma_m[0]), conductivity_to_json(p.sigma_m[1])}}};
}

namespace {

json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

json to_json(const NeutralityReport& r) {
  json axes = json::array();
  for (std::size_t j = 0; j < 2; ++j) {
    const AxisReport& a = r.axes[j];
    axes.push_back({{"axis", j + 1},
                    {"residual", a.residual},
                    {"rms_residual", a.rms_residual},
                    {"first_moment", {a.first_moment.x, a.first_moment.y}},
                    {"core_gradient_mean", {a.core_gradient_mean.x, a.core_gradient_mean.y}},
                    {"core_gradient_deviation", a.core_gradient_deviation},
                    {"predicted_core_slope", finite_or_string(a.predicted_core_slope)},
                    {"core_slope_error", a.core_slope_error},
                    {"phi_identity_residual", a.phi_identity_residual},
                    {"psi_identity_residual", a.psi_identity_residual},
                    {"density_means", {a.density_means[0], a.density_means[1]}},
                    {"rcond", a.rcond}});
  }
  return {{"nodes", r.nodes},
          {"probe_radius", r.probe_radius},
          {"probe_points", r.probe_points},
          {"lambda", r.contrast.lambda},
          {"mu", {finite_or_string(r.contrast.mu[0]), finite_or_string(r.contrast.mu[1])}},
          {"max_residual", r.max_residual()},
          {"axes", axes}};
}

json to_json(const LaurentClassification& c) {
  json factors = json::array();
  for (const auto& [n, v] : c.factors) {
    factors.push_back({{"n", n}, {"factor", v}, {"admissible", c.admissible_n.count(n) > 0},
                       {"in_support", c.support.count(n) > 0}});
  }
  return {{"verdict", std::string(to_string(c.verdict))},
          {"tol", c.tol},
          {"coeff_tol", c.coeff_tol},
          {"admissible_n", c.admissible_n},
          {"support", c.support},
          {"factors", factors}};
}

json to_json(const QuadraticFit& f) {
  return {{"d1", f.d1}, {"d2", f.d2}, {"c1", f.c1}, {"c2", f.c2}, {"C", f.C},
          {"rms_residual", f.rms_residual}, {"points", f.points}};
}

json to_json(const IdentityCheck& c) {
  return {{"fit", to_json(c.fit)},
          {"exterior_residual", c.exterior_residual},
          {"predicted_d1", c.predicted_d1},
          {"predicted_d2", c.predicted_d2},
          {"f", c.f}};
}

json to_json(const FreeBvpReport& r) {
  return {{"harmonicity", r.harmonicity}, {"outer_bc", r.outer_bc}, {"inner_bc", r.inner_bc}};
}

json to_json(const ShapePoint& p) {
  json c = json::object();
  for (const auto& [n, a] : p.coeffs) c[std::to_string(n)] = a;
  return {{"coeffs", c}, {"r0", p.r0}, {"sigma_m", {p.sigma_m[0], p.sigma_m[1]}},
          {"confocality_gap", p.confocality_gap()}};
}

json to_json(const SearchResult& r) {
  return {{"best", to_json(r.best)},
          {"objective", r.objective},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"confocality_gap", r.confocality_gap},
          {"converged", r.converged}};
}

std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

Csv& Csv::row(std::initializer_list<double> values) { return row(std::vector<double>(values)); }

Csv& Csv::row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw std::logic_error("csv row width does not match header");
  rows_.push_back(values);
  return *this;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string Csv::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << csv_field(header_[i]);
  os << "\r\n";
  char buf[32];
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      os << (i ? "," : "") << buf;
    }
    os << "\r\n";
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace neutral::io
