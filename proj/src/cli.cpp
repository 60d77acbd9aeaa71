#include "neutral/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "neutral/designer.hpp"
#include "neutral/error.hpp"
#include "neutral/io.hpp"
#include "neutral/laurent.hpp"
#include "neutral/newtonian.hpp"
#include "neutral/shapesearch.hpp"
#include "neutral/simd/kernels.hpp"
#include "neutral/transmission.hpp"

namespace neutral::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---- schema helpers -------------------------------------------------------

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "." + key + ": must be finite");
  return x;
}

double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::size_t count(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ValidationError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

Vec2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(where + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Curve ellipse_from_json(const json& e, const std::string& where) {
  io::check_keys(e, {"center", "a", "b", "theta"}, where);
  const Vec2 c = e.contains("center") ? point(e.at("center"), where + ".center") : Vec2{0.0, 0.0};
  if (!e.contains("a") || !e.contains("b")) throw ValidationError(where + ": semi-axes 'a' and 'b' required");
  return make_ellipse(c, number(e, "a", where), number(e, "b", where), number_or(e, "theta", where, 0.0));
}

void parse_geometry(const json& g, ExperimentConfig& cfg) {
  if (!g.is_object() || !g.contains("type") || !g.at("type").is_string())
    throw ValidationError("geometry: string 'type' required");
  const std::string type = g.at("type").get<std::string>();
  if (type == "confocal") {
    io::check_keys(g, {"type", "a1", "am1", "r0"}, "geometry");
    for (const char* k : {"a1", "am1", "r0"})
      if (!g.contains(k)) throw ValidationError(std::string("geometry: '") + k + "' required");
    const double a1 = number(g, "a1", "geometry"), am1 = number(g, "am1", "geometry"), r0 = number(g, "r0", "geometry");
    cfg.confocal = {a1, am1, r0};
    cfg.inclusion = confocal_pair(a1, am1, r0);
    cfg.map = cfg.inclusion->origin;
  } else if (type == "disks") {
    io::check_keys(g, {"type", "inner_radius", "outer_radius"}, "geometry");
    if (!g.contains("inner_radius") || !g.contains("outer_radius"))
      throw ValidationError("geometry: 'inner_radius' and 'outer_radius' required");
    const double ri = number(g, "inner_radius", "geometry"), ro = number(g, "outer_radius", "geometry");
    if (!(ri > 0.0) || !(ro > ri)) throw GeometryError("disks need 0 < inner_radius < outer_radius");
    cfg.confocal = {ri, 0.0, ro / ri};
    cfg.inclusion = confocal_pair(ri, 0.0, ro / ri);
    cfg.map = cfg.inclusion->origin;
  } else if (type == "ellipses") {
    io::check_keys(g, {"type", "inner", "outer"}, "geometry");
    if (!g.contains("inner") || !g.contains("outer")) throw ValidationError("geometry: 'inner' and 'outer' required");
    cfg.inclusion = make_coated_inclusion(ellipse_from_json(g.at("inner"), "geometry.inner"),
                                          ellipse_from_json(g.at("outer"), "geometry.outer"));
  } else if (type == "laurent") {
    io::check_keys(g, {"type", "coeffs", "r0"}, "geometry");
    json m = g;
    m.erase("type");
    const LaurentMap map = io::laurent_from_json(m);
    cfg.map = map;
    cfg.inclusion = laurent_domain(map);
    bool confocal = true;
    for (const auto& [n, a] : map.coeffs) confocal = confocal && (n == 1 || n == -1);
    if (confocal && map.coeff(1).imag() == 0.0 && map.coeff(-1).imag() == 0.0)
      cfg.confocal = {map.coeff(1).real(), map.coeff(-1).real(), map.r0};
  } else if (type == "curves") {
    io::check_keys(g, {"type", "inner", "outer"}, "geometry");
    if (!g.contains("inner") || !g.contains("outer")) throw ValidationError("geometry: 'inner' and 'outer' required");
    cfg.inclusion = make_coated_inclusion(io::curve_from_json(g.at("inner")), io::curve_from_json(g.at("outer")));
  } else {
    throw ValidationError("geometry: unknown type '" + type + "' (confocal, disks, ellipses, laurent, curves)");
  }
}

void parse_profile(const json& p, ExperimentConfig& cfg) {
  io::check_keys(p, {"sigma_c", "sigma_s", "sigma_m"}, "profile");
  if (p.contains("sigma_c")) cfg.sigma_c = io::conductivity_from_json(p.at("sigma_c"), "profile.sigma_c");
  if (p.contains("sigma_s")) cfg.sigma_s = io::conductivity_from_json(p.at("sigma_s"), "profile.sigma_s");
  if (p.contains("sigma_m")) {
    const json& m = p.at("sigma_m");
    if (m.is_string() && m.get<std::string>() == "design") {
      // designed on demand
    } else if (m.is_array()) {
      if (m.size() != 2) throw ValidationError("profile.sigma_m: expected [sigma_m1, sigma_m2]");
      cfg.sigma_m = std::array<double, 2>{io::conductivity_from_json(m[0], "profile.sigma_m"),
                                          io::conductivity_from_json(m[1], "profile.sigma_m")};
    } else {
      const double s = io::conductivity_from_json(m, "profile.sigma_m");
      cfg.sigma_m = std::array<double, 2>{s, s};
    }
  }
}

void parse_numerics(const json& n, ExperimentConfig& cfg) {
  io::check_keys(n, {"nodes", "probe_radius", "probe_points", "tol", "coeff_tol", "near_factor"}, "numerics");
  if (n.contains("nodes")) cfg.nodes = count(n, "nodes", "numerics");
  if (n.contains("probe_radius")) cfg.probe_radius = number(n, "probe_radius", "numerics");
  if (n.contains("probe_points")) cfg.probe_points = count(n, "probe_points", "numerics");
  cfg.tol = number_or(n, "tol", "numerics", cfg.tol);
  cfg.coeff_tol = number_or(n, "coeff_tol", "numerics", cfg.coeff_tol);
  cfg.near_factor = number_or(n, "near_factor", "numerics", cfg.near_factor);
  if (cfg.nodes < 16 || cfg.nodes % 2 != 0) throw ValidationError("numerics.nodes: need an even count >= 16");
  if (cfg.probe_points < 4) throw ValidationError("numerics.probe_points: need at least 4");
  if (!(cfg.tol > 0.0) || !(cfg.coeff_tol > 0.0)) throw ValidationError("numerics: tolerances must be positive");
  if (!(cfg.near_factor > 0.0)) throw ValidationError("numerics.near_factor: must be positive");
}

void check_number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array");
  for (const auto& e : v)
    if (!e.is_number()) throw ValidationError(where + ": expected numbers");
}

void check_sections(const json& j) {
  if (j.contains("solve")) {
    const json& s = j.at("solve");
    io::check_keys(s, {"axis", "samples"}, "solve");
    if (s.contains("axis") && !(s.at("axis") == 1 || s.at("axis") == 2 || s.at("axis") == "both"))
      throw ValidationError("solve.axis: expected 1, 2 or \"both\"");
    if (s.contains("samples")) {
      if (!s.at("samples").is_array()) throw ValidationError("solve.samples: expected an array of [x, y]");
      for (const auto& p : s.at("samples")) point(p, "solve.samples");
    }
  }
  if (j.contains("decay")) {
    const json& d = j.at("decay");
    io::check_keys(d, {"field", "radii"}, "decay");
    if (d.contains("field")) {
      if (!d.at("field").is_object()) throw ValidationError("decay.field: expected {\"k\": coefficient}");
      for (const auto& [k, v] : d.at("field").items()) {
        if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos)
          throw ValidationError("decay.field: degree '" + k + "' is not a non-negative integer");
        if (!(v.is_number() || (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())))
          throw ValidationError("decay.field: coefficients are numbers or [re, im]");
      }
    }
    if (d.contains("radii")) {
      check_number_list(d.at("radii"), "decay.radii");
      if (d.at("radii").size() != 2) throw ValidationError("decay.radii: expected [R1, R2]");
    }
  }
  if (j.contains("search")) {
    const json& s = j.at("search");
    io::check_keys(s, {"order", "starts", "amplitude", "max_evaluations", "frozen", "perturbation_amplitudes",
                       "probe_radius", "nodes"},
                   "search");
    for (const char* k : {"order", "starts", "max_evaluations", "nodes"})
      if (s.contains(k)) count(s, k, "search");
    for (const char* k : {"amplitude", "probe_radius"})
      if (s.contains(k)) number(s, k, "search");
    if (s.contains("frozen") && !s.at("frozen").is_boolean()) throw ValidationError("search.frozen: expected a boolean");
    if (s.contains("perturbation_amplitudes")) check_number_list(s.at("perturbation_amplitudes"), "search.perturbation_amplitudes");
  }
  for (const char* name : {"newtonian", "classify"}) {
    if (!j.contains(name)) continue;
    const json& s = j.at(name);
    io::check_keys(s, {"f", "dmu", "beta"}, name);
    for (const char* k : {"f", "dmu", "beta"})
      if (s.contains(k)) number(s, k, name);
  }
  if (j.contains("disk")) {
    io::check_keys(j.at("disk"), {"f"}, "disk");
    if (j.at("disk").contains("f")) number(j.at("disk"), "f", "disk");
  }
}

}  // namespace

json ExperimentConfig::section(const std::string& name) const {
  return raw.contains(name) ? raw.at(name) : json::object();
}

ExperimentConfig parse_config(json j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  io::check_keys(j, {"geometry", "profile", "numerics", "seed", "solve", "decay", "search", "newtonian", "classify", "disk"},
                 "config");
  ExperimentConfig cfg;
  cfg.raw = j;
  if (j.contains("numerics")) parse_numerics(j.at("numerics"), cfg);
  if (j.contains("seed")) cfg.seed = count(j, "seed", "config");
  check_sections(j);
  if (j.contains("profile")) parse_profile(j.at("profile"), cfg);
  if (j.contains("geometry")) parse_geometry(j.at("geometry"), cfg);
  return cfg;
}

namespace {

// ---- command plumbing -----------------------------------------------------

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::size_t> nodes;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

struct Outcome {
  json result;
  std::map<std::string, std::string> files;  // name -> contents
  int code = kOk;
  std::string message;
};

const CoatedInclusion& need_inclusion(const ExperimentConfig& cfg) {
  if (!cfg.inclusion) throw ValidationError("config: 'geometry' required for this command");
  return *cfg.inclusion;
}

std::array<double, 3> need_confocal(const ExperimentConfig& cfg, const char* why) {
  if (!cfg.confocal) {
    if (cfg.map) throw ValidationError(std::string(why) + ": map is not a real confocal pair; rotate it so a1 and a_-1 are real");
    throw ValidationError(std::string(why) + ": needs a confocal geometry");
  }
  return *cfg.confocal;
}

DesignResult design_for(const ExperimentConfig& cfg, const char* why) {
  const auto [a1, am1, r0] = need_confocal(cfg, why);
  if (!cfg.sigma_c || !cfg.sigma_s) throw ValidationError(std::string(why) + ": profile.sigma_c and profile.sigma_s required");
  return confocal_design(a1, am1, r0, *cfg.sigma_c, *cfg.sigma_s);
}

ConductivityProfile profile_for(const ExperimentConfig& cfg) {
  if (!cfg.sigma_c || !cfg.sigma_s) throw ValidationError("profile: sigma_c and sigma_s required");
  if (cfg.sigma_m) {
    ConductivityProfile p{*cfg.sigma_c, *cfg.sigma_s, *cfg.sigma_m};
    p.validate();
    return p;
  }
  return design_for(cfg, "profile.sigma_m \"design\"").profile();
}

std::vector<Vec2> circle(Vec2 c, double r, std::size_t m) {
  std::vector<Vec2> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    pts[i] = {c.x + r * std::cos(a), c.y + r * std::sin(a)};
  }
  return pts;
}

double default_probe_radius(const ExperimentConfig& cfg) {
  return cfg.probe_radius ? *cfg.probe_radius : 3.0 * need_inclusion(cfg).outer.max_radius();
}

double area_ratio(const CoatedInclusion& inc, std::size_t nodes) {
  return area(discretize(inc.inner, nodes)) / area(discretize(inc.outer, nodes));
}

Outcome cmd_solve(const ExperimentConfig& cfg) {
  const CoatedInclusion& inc = need_inclusion(cfg);
  const ConductivityProfile p = profile_for(cfg);
  const json s = cfg.section("solve");
  std::vector<Axis> axes{Axis::x1, Axis::x2};
  if (s.contains("axis") && s.at("axis") != "both") axes = {s.at("axis") == 1 ? Axis::x1 : Axis::x2};
  std::vector<Vec2> samples;
  if (s.contains("samples")) {
    for (const auto& q : s.at("samples")) samples.push_back(point(q, "solve.samples"));
  } else {
    samples = circle(inc.outer.center(), default_probe_radius(cfg), cfg.probe_points);
  }

  const TransmissionSolver solver(inc, cfg.nodes);
  Outcome o;
  o.result = {{"profile", io::to_json(p)}, {"axes", json::array()}};
  for (Axis a : axes) {
    const DensityPair pair = solver.solve_uniform(p, a);
    const UEval u = solver.eval(pair, samples, NearZone{cfg.near_factor});
    const auto means = solver.weighted_means(pair);
    const std::string tag = std::to_string(static_cast<int>(a));
    o.result["axes"].push_back({{"axis", static_cast<int>(a)}, {"rcond", pair.rcond}, {"density_means", {means[0], means[1]}}});

    io::Csv dens({"curve", "i", "t", "x", "y", "density"});
    for (std::size_t i = 0; i < solver.inner().n; ++i)
      dens.row({0.0, double(i), solver.inner().t[i], solver.inner().x[i], solver.inner().y[i], pair.phi[i]});
    for (std::size_t i = 0; i < solver.outer().n; ++i)
      dens.row({1.0, double(i), solver.outer().t[i], solver.outer().x[i], solver.outer().y[i], pair.psi[i]});
    o.files["densities_axis" + tag + ".csv"] = dens.str();

    io::Csv field({"x", "y", "u", "ux", "uy"});
    for (std::size_t i = 0; i < samples.size(); ++i)
      field.row({samples[i].x, samples[i].y, u.value[i], u.gradient[i].x, u.gradient[i].y});
    o.files["samples_axis" + tag + ".csv"] = field.str();
  }
  return o;
}

Outcome cmd_neutrality(const ExperimentConfig& cfg) {
  const CoatedInclusion& inc = need_inclusion(cfg);
  const ConductivityProfile p = profile_for(cfg);
  const TransmissionSolver solver(inc, cfg.nodes);
  ProbeOptions probe;
  probe.radius = cfg.probe_radius;
  probe.points = cfg.probe_points;
  const NeutralityReport r = neutrality_report(solver, p, probe);

  Outcome o;
  o.result = io::to_json(r);
  o.result["profile"] = io::to_json(p);
  o.result["neutral"] = r.max_residual() <= cfg.tol;

  const std::vector<Vec2> pts = circle(inc.outer.center(), r.probe_radius, r.probe_points);
  io::Csv csv({"x", "y", "u_minus_h_axis1", "u_minus_h_axis2"});
  std::array<std::vector<double>, 2> dev;
  for (Axis a : {Axis::x1, Axis::x2}) {
    const DensityPair pair = solver.solve_uniform(p, a);
    const UEval u = solver.eval(pair, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) dev[index(a)].push_back(u.value[i] - pair.field.value(pts[i]));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) csv.row({pts[i].x, pts[i].y, dev[0][i], dev[1][i]});
  o.files["probe.csv"] = csv.str();
  return o;
}

Outcome cmd_design(const ExperimentConfig& cfg, bool report) {
  const DesignResult d = design_for(cfg, "design");
  Outcome o;
  o.result = io::to_json(d);
  if (report) {
    const auto [a1, am1, r0] = *cfg.confocal;
    ProbeOptions probe;
    probe.radius = cfg.probe_radius;
    probe.points = cfg.probe_points;
    o.result["neutrality"] = io::to_json(neutrality_report(confocal_pair(a1, am1, r0), d.profile(), cfg.nodes, probe));
  }
  return o;
}

Outcome cmd_disk(const ExperimentConfig& cfg) {
  if (!cfg.sigma_c || !cfg.sigma_s) throw ValidationError("disk: sigma_c and sigma_s required");
  const json s = cfg.section("disk");
  if (!s.contains("f")) throw ValidationError("disk: volume fraction f required");
  const double f = s.at("f").get<double>();
  Outcome o;
  o.result = {{"sigma_c", io::conductivity_to_json(*cfg.sigma_c)},
              {"sigma_s", io::conductivity_to_json(*cfg.sigma_s)},
              {"f", f},
              {"sigma_m", disk_matrix_conductivity(*cfg.sigma_c, *cfg.sigma_s, f)}};
  return o;
}

// f and mu1 - mu2 for the Newtonian / free-boundary checks: explicit values
// win, otherwise the confocal design provides them.
struct ShapeData {
  double f = 0.0;
  double dmu = 0.0;
  std::string source;
};

ShapeData shape_data(const ExperimentConfig& cfg, const char* name) {
  const json s = cfg.section(name);
  ShapeData d;
  if (s.contains("dmu") || s.contains("beta")) {
    d.f = s.contains("f") ? s.at("f").get<double>() : area_ratio(need_inclusion(cfg), cfg.nodes);
    if (s.contains("dmu")) {
      d.dmu = s.at("dmu").get<double>();
    } else {
      d.dmu = -s.at("beta").get<double>() / d.f;
    }
    d.source = "config";
    return d;
  }
  const DesignResult dr = design_for(cfg, name);
  d.f = s.contains("f") ? s.at("f").get<double>() : dr.f;
  d.dmu = dr.dmu;
  d.source = "design";
  return d;
}

Outcome cmd_newtonian(const ExperimentConfig& cfg) {
  const CoatedInclusion& inc = need_inclusion(cfg);
  const ShapeData d = shape_data(cfg, "newtonian");
  const IdentityCheck c = combined_identity_check(inc, d.f, d.dmu, cfg.nodes);
  Outcome o;
  o.result = io::to_json(c);
  o.result["dmu"] = d.dmu;
  o.result["source"] = d.source;
  io::Csv csv({"d1", "d2", "c1", "c2", "C", "rms_residual", "exterior_residual", "predicted_d1", "predicted_d2"});
  csv.row({c.fit.d1, c.fit.d2, c.fit.c1, c.fit.c2, c.fit.C, c.fit.rms_residual, c.exterior_residual, c.predicted_d1,
           c.predicted_d2});
  o.files["newtonian.csv"] = csv.str();
  return o;
}

Outcome cmd_freebvp(const ExperimentConfig& cfg) {
  const CoatedInclusion& inc = need_inclusion(cfg);
  const ShapeData d = shape_data(cfg, "newtonian");
  const double beta = -d.f * d.dmu;
  const FreeBvpReport r = free_bvp_residual(inc, d.f, beta, cfg.nodes);
  Outcome o;
  o.result = io::to_json(r);
  o.result["f"] = d.f;
  o.result["dmu"] = d.dmu;
  o.result["beta"] = beta;
  o.result["source"] = d.source;
  io::Csv csv({"harmonicity", "outer_bc", "inner_bc"});
  csv.row({r.harmonicity, r.outer_bc, r.inner_bc});
  o.files["freebvp.csv"] = csv.str();
  return o;
}

Outcome cmd_classify(const ExperimentConfig& cfg) {
  if (!cfg.map) throw ValidationError("laurent-classify: needs a confocal, disks or laurent geometry");
  const LaurentMap& map = *cfg.map;
  const json s = cfg.section("classify");
  double f = 0.0, beta = 0.0;
  std::string source = "config";
  if (s.contains("f") && s.contains("beta")) {
    f = s.at("f").get<double>();
    beta = s.at("beta").get<double>();
  } else {
    // Design from the confocal part of the map.
    if (map.coeff(1).imag() != 0.0 || map.coeff(-1).imag() != 0.0)
      throw ValidationError("laurent-classify: a1 and a_-1 must be real; rotate the map first");
    if (!cfg.sigma_c || !cfg.sigma_s) throw ValidationError("laurent-classify: give classify.f and classify.beta, or a profile");
    const DesignResult dr = confocal_design(map.coeff(1).real(), map.coeff(-1).real(), map.r0, *cfg.sigma_c, *cfg.sigma_s);
    f = s.contains("f") ? s.at("f").get<double>() : dr.f;
    beta = s.contains("beta") ? s.at("beta").get<double>() : dr.beta;
    source = "design";
  }
  const LaurentClassification c = classify(map, f, beta, {cfg.tol, cfg.coeff_tol});
  Outcome o;
  o.result = io::to_json(c);
  o.result["f"] = f;
  o.result["beta"] = beta;
  o.result["source"] = source;
  io::Csv csv({"n", "factor", "admissible", "in_support"});
  for (const auto& [n, v] : c.factors)
    csv.row({double(n), v, c.admissible_n.count(n) ? 1.0 : 0.0, c.support.count(n) ? 1.0 : 0.0});
  o.files["factors.csv"] = csv.str();
  return o;
}

ShapePoint base_point(const ExperimentConfig& cfg) {
  if (!cfg.map) throw ValidationError("search: needs a confocal, disks or laurent geometry");
  const LaurentMap& m = *cfg.map;
  const complex a1 = m.coeff(1);
  if (a1.imag() != 0.0 || !(a1.real() > 0.0)) throw ValidationError("search: a1 must be real and positive");
  ShapePoint p;
  p.r0 = m.r0;
  for (const auto& [n, a] : m.coeffs) {
    if (n == 1) continue;
    if (n == 0 || a.imag() != 0.0) throw ValidationError("search: coefficients must be real with no constant term");
    p.coeffs[n] = a.real() / a1.real();  // similarity: neutrality is scale invariant
  }
  p.sigma_m = profile_for(cfg).sigma_m;
  return p;
}

Outcome cmd_search(const ExperimentConfig& cfg) {
  const json s = cfg.section("search");
  if (!cfg.sigma_c || !cfg.sigma_s) throw ValidationError("search: profile.sigma_c and profile.sigma_s required");
  if (std::isinf(*cfg.sigma_c) || *cfg.sigma_c == 0.0) throw ValidationError("search: finite positive sigma_c required");
  const int order = s.contains("order") ? s.at("order").get<int>() : 2;
  if (order < 2) throw ValidationError("search.order: must be at least 2");
  const std::size_t starts = s.contains("starts") ? s.at("starts").get<std::size_t>() : 5;
  const double amplitude = s.contains("amplitude") ? s.at("amplitude").get<double>() : 0.05;
  const bool frozen = s.contains("frozen") && s.at("frozen").get<bool>();

  const ShapePoint base = base_point(cfg);
  SearchSpace space = SearchSpace::around(base, *cfg.sigma_c, *cfg.sigma_s, order);
  if (s.contains("probe_radius")) space.probe_radius = s.at("probe_radius").get<double>();
  if (s.contains("nodes")) space.nodes = s.at("nodes").get<std::size_t>();
  if (space.nodes < 16 || space.nodes % 2) throw ValidationError("search.nodes: need an even count >= 16");
  SearchOptions opts;
  if (s.contains("max_evaluations")) opts.max_evaluations = s.at("max_evaluations").get<std::size_t>();

  std::vector<ShapePoint> points;
  if (frozen) {
    space.geometry_free = false;
    space.fixed_geometry = base;
    points.push_back(base);
  } else {
    points = perturbed_starts(base, order, amplitude, starts, cfg.seed);
  }

  Outcome o;
  o.result = {{"frozen", frozen}, {"order", order}, {"probe_radius", space.probe_radius}, {"nodes", space.nodes},
              {"runs", json::array()}};
  io::Csv hist({"start", "iteration", "objective", "gap"});
  bool all_converged = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const SearchResult r = search(space, points[k], opts);
    json run = io::to_json(r);
    run["start"] = io::to_json(points[k]);
    o.result["runs"].push_back(run);
    for (std::size_t i = 0; i < r.history.size(); ++i) hist.row({double(k), double(i), r.history[i], r.gap_history[i]});
    all_converged = all_converged && r.converged;
  }
  o.files["history.csv"] = hist.str();

  if (s.contains("perturbation_amplitudes")) {
    const auto amps = s.at("perturbation_amplitudes").get<std::vector<double>>();
    io::Csv pc({"amplitude", "valid", "residual_fixed", "residual_optimized", "sigma_m1", "sigma_m2"});
    for (const auto& row : perturbation_study(space, base, amps))
      pc.row({row.amplitude, row.valid ? 1.0 : 0.0, row.residual_fixed, row.residual_optimized, row.sigma_m_optimized[0],
              row.sigma_m_optimized[1]});
    o.files["perturbation.csv"] = pc.str();
  }
  if (!all_converged) {
    o.code = kNumerical;
    o.message = "search did not converge within the evaluation budget";
  }
  return o;
}

HarmonicField decay_field(const json& f) {
  std::map<int, complex> c;
  for (const auto& [k, v] : f.items()) {
    c[std::stoi(k)] = v.is_number() ? complex(v.get<double>(), 0.0) : complex(v[0].get<double>(), v[1].get<double>());
  }
  return HarmonicField(std::move(c));
}

Outcome cmd_decay(const ExperimentConfig& cfg) {
  const CoatedInclusion& inc = need_inclusion(cfg);
  const ConductivityProfile p = profile_for(cfg);
  const json s = cfg.section("decay");
  const HarmonicField h = s.contains("field") ? decay_field(s.at("field")) : HarmonicField::uniform(Axis::x1);
  std::array<double, 2> radii{5.0, 10.0};
  if (s.contains("radii")) radii = {s.at("radii")[0].get<double>(), s.at("radii")[1].get<double>()};
  const double e = decay_exponent(inc, p, h, radii, cfg.nodes);
  Outcome o;
  o.result = {{"exponent", e}, {"radii", {radii[0], radii[1]}}, {"profile", io::to_json(p)}};
  return o;
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

json merged_config(const Flags& flags) {
  json j = flags.config.empty() ? json::object() : read_config(flags.config);
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  if (flags.nodes) j["numerics"]["nodes"] = *flags.nodes;
  if (flags.tol) j["numerics"]["tol"] = *flags.tol;
  if (flags.seed) j["seed"] = *flags.seed;
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coated inclusion neutrality lab", "neutral-lab"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "experiment config (JSON)");
  app.add_option("--out", flags.out, "directory for reports and CSV");
  app.add_option("--nodes", flags.nodes, "quadrature nodes per curve");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--tol", flags.tol, "tolerance");

  std::optional<double> a1, am1, r0, sc, ss, f;
  bool report = false;
  auto* solve = app.add_subcommand("solve", "densities and field samples for both axes");
  auto* neutrality = app.add_subcommand("neutrality", "neutrality report");
  auto* design = app.add_subcommand("design", "closed-form neutral coating of a confocal pair");
  design->add_option("--a1", a1);
  design->add_option("--am1", am1);
  design->add_option("--r0", r0);
  design->add_option("--sc", sc);
  design->add_option("--ss", ss);
  design->add_flag("--report", report, "also verify by the integral equation solver");
  auto* disk = app.add_subcommand("disk", "matrix conductivity of a neutral coated disk");
  disk->add_option("--sc", sc);
  disk->add_option("--ss", ss);
  disk->add_option("--f", f);
  auto* newtonian = app.add_subcommand("newtonian", "Newtonian potential identity check");
  auto* freebvp = app.add_subcommand("freebvp", "free boundary problem residuals");
  auto* classify_cmd = app.add_subcommand("laurent-classify", "Laurent coefficient admissibility");
  auto* search_cmd = app.add_subcommand("search", "shape search for neutral inclusions");
  auto* decay = app.add_subcommand("decay", "far-field decay exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    json j = merged_config(flags);
    auto put = [&](const char* section, const char* key, const std::optional<double>& v) {
      if (v) j[section][key] = *v;
    };
    if (cmd == design) {
      if (a1 || am1 || r0) {
        if (!(a1 && am1 && r0)) throw ValidationError("design: --a1, --am1 and --r0 go together");
        j["geometry"] = {{"type", "confocal"}, {"a1", *a1}, {"am1", *am1}, {"r0", *r0}};
      }
    }
    put("profile", "sigma_c", sc);
    put("profile", "sigma_s", ss);
    put("disk", "f", f);

    const ExperimentConfig cfg = parse_config(j);

    Outcome o;
    if (cmd == solve) o = cmd_solve(cfg);
    else if (cmd == neutrality) o = cmd_neutrality(cfg);
    else if (cmd == design) o = cmd_design(cfg, report);
    else if (cmd == disk) o = cmd_disk(cfg);
    else if (cmd == newtonian) o = cmd_newtonian(cfg);
    else if (cmd == freebvp) o = cmd_freebvp(cfg);
    else if (cmd == classify_cmd) o = cmd_classify(cfg);
    else if (cmd == search_cmd) o = cmd_search(cfg);
    else if (cmd == decay) o = cmd_decay(cfg);

    json envelope = {{"command", cmd->get_name()},
                     {"config_hash", io::config_hash(cfg.raw)},
                     {"parameters",
                      {{"nodes", cfg.nodes}, {"seed", cfg.seed}, {"tol", cfg.tol}, {"coeff_tol", cfg.coeff_tol},
                       {"kernels", std::string(simd::active_kernels().name)}}},
                     {"config", cfg.raw},
                     {"result", o.result}};
    const std::string text = envelope.dump(2) + "\n";
    out << text;
    if (!flags.out.empty()) {
      fs::create_directories(flags.out);
      std::string name = cmd->get_name();
      io::write_text(fs::path(flags.out) / (name + ".json"), text);
      for (const auto& [file, contents] : o.files) io::write_text(fs::path(flags.out) / file, contents);
    }
    if (o.code != kOk) err << "neutral-lab: " << o.message << "\n";
    return o.code;
  } catch (const ValidationError& e) {
    err << "neutral-lab: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "neutral-lab: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const json::exception& e) {
    err << "neutral-lab: config: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "neutral-lab: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace neutral::cli
