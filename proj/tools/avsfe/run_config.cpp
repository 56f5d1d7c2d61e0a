#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "avsfe/error.hpp"
#include "avsfe/io.hpp"

namespace avsfe::cli {

namespace {

using nlohmann::json;

constexpr double kEdgeTol = 1e-9;

// Rejects keys outside `allowed` so that typos do not pass silently.
void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  AVSFE_REQUIRE(obj.is_object(), ConfigError, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    AVSFE_REQUIRE(known, ConfigError, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

Vector2 get_vector(const json& obj, const char* key, const std::string& where, Vector2 fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(obj, key, where, {});
  AVSFE_REQUIRE(v.size() == 2, ConfigError, where + "." + key + " must have two entries");
  return {v[0], v[1]};
}

std::array<bool, 2> get_mask(const json& obj, const char* key, const std::string& where) {
  const auto v = get<std::vector<bool>>(obj, key, where, {true, true});
  AVSFE_REQUIRE(v.size() == 2, ConfigError, where + "." + key + " must have two entries");
  return {v[0], v[1]};
}

std::vector<std::string> get_edges(const json& obj, const std::string& where) {
  const auto edges = get<std::vector<std::string>>(obj, "edges", where, {});
  for (const auto& e : edges) {
    AVSFE_REQUIRE(e == "left" || e == "right" || e == "bottom" || e == "top" || e == "all",
                  ConfigError, "unknown edge preset '" + e + "' in " + where);
  }
  return edges;
}

Diagonal parse_diagonal(const std::string& s) {
  if (s == "right") return Diagonal::Right;
  if (s == "left") return Diagonal::Left;
  if (s == "crisscross") return Diagonal::Crisscross;
  throw ConfigError("unknown diagonal '" + s + "'");
}

void parse_geometry(const json& g, RunConfig& rc) {
  expect_keys(g, "geometry", {"type", "length", "height", "nx", "ny", "diagonal", "center", "radius",
                              "segments", "target_h", "clamped_fraction", "path"});
  GeometrySpec& spec = rc.geometry;
  const std::string type = get<std::string>(g, "type", "geometry", "square");
  InclusionParameters& inc = rc.study_config.inclusion;
  BeamParameters& beam = rc.study_config.beam;
  if (type == "square") {
    spec.kind = GeometrySpec::Kind::Square;
  } else if (type == "rectangle") {
    spec.kind = GeometrySpec::Kind::Rectangle;
    spec.length = get<double>(g, "length", "geometry", beam.length);
    spec.height = get<double>(g, "height", "geometry", beam.height);
    beam.length = spec.length;
    beam.height = spec.height;
  } else if (type == "inclusion") {
    spec.kind = GeometrySpec::Kind::Inclusion;
    inc.center = get_vector(g, "center", "geometry", inc.center);
    inc.radius = get<double>(g, "radius", "geometry", inc.radius);
    inc.segments = get<int>(g, "segments", "geometry", inc.segments);
    inc.target_h = get<double>(g, "target_h", "geometry", inc.target_h);
    inc.clamped_fraction = get<double>(g, "clamped_fraction", "geometry", inc.clamped_fraction);
  } else if (type == "file") {
    spec.kind = GeometrySpec::Kind::File;
    spec.path = get<std::string>(g, "path", "geometry", "");
    AVSFE_REQUIRE(!spec.path.empty(), ConfigError, "geometry.path is required for type 'file'");
  } else {
    throw ConfigError("unknown geometry type '" + type + "'");
  }
  spec.nx = get<int>(g, "nx", "geometry", spec.kind == GeometrySpec::Kind::Rectangle ? 2 : 1);
  spec.ny = get<int>(g, "ny", "geometry", 1);
  AVSFE_REQUIRE(spec.nx >= 1 && spec.ny >= 1, ConfigError, "geometry.nx and geometry.ny must be >= 1");
  spec.diagonal = parse_diagonal(get<std::string>(g, "diagonal", "geometry", "right"));
  rc.geometry_given = true;
}

void parse_boundary(const json& b, RunConfig& rc) {
  expect_keys(b, "boundary", {"dirichlet", "neumann", "points"});
  BoundarySpec& spec = rc.boundary;
  if (b.contains("dirichlet")) {
    const json& d = b.at("dirichlet");
    expect_keys(d, "boundary.dirichlet", {"edges", "components", "value"});
    spec.dirichlet_edges = get_edges(d, "boundary.dirichlet");
    spec.dirichlet_components = get_mask(d, "components", "boundary.dirichlet");
    if (d.contains("value")) spec.dirichlet_value = get_vector(d, "value", "boundary.dirichlet", {});
  }
  if (b.contains("neumann")) {
    const json& n = b.at("neumann");
    expect_keys(n, "boundary.neumann", {"edges", "traction"});
    spec.neumann_edges = get_edges(n, "boundary.neumann");
    spec.traction = get_vector(n, "traction", "boundary.neumann", spec.traction);
    rc.study_config.inclusion.traction = spec.traction;
    if (spec.traction.x() == 0.0) rc.study_config.beam.load = -spec.traction.y();
  }
  if (b.contains("points")) {
    AVSFE_REQUIRE(b.at("points").is_array(), ConfigError, "boundary.points must be an array");
    for (const json& p : b.at("points")) {
      expect_keys(p, "boundary.points[]", {"at", "components", "value"});
      AVSFE_REQUIRE(p.contains("at"), ConfigError, "boundary.points[] needs 'at'");
      spec.points.push_back({get_vector(p, "at", "boundary.points[]", {}), get_mask(p, "components", "boundary.points[]"),
                             get_vector(p, "value", "boundary.points[]", Vector2::Zero())});
    }
  }
  rc.boundary_given = true;
}

void parse_discretization(const json& d, DiscretizationOptions& opts) {
  expect_keys(d, "discretization", {"p", "stress_space", "rt_degree", "delta_p", "quadrature_degree"});
  opts.p = get<int>(d, "p", "discretization", opts.p);
  AVSFE_REQUIRE(opts.p == 0 || (opts.p >= 1 && opts.p <= 5), ConfigError, "discretization.p must lie in 1..5");
  if (d.contains("stress_space")) opts.stress = parse_stress_space(get<std::string>(d, "stress_space", "discretization", ""));
  opts.rt_degree = get<int>(d, "rt_degree", "discretization", opts.rt_degree);
  opts.delta_p = get<int>(d, "delta_p", "discretization", opts.delta_p);
  AVSFE_REQUIRE(opts.delta_p >= 0, ConfigError, "discretization.delta_p must be >= 0");
  opts.quadrature_degree = get<int>(d, "quadrature_degree", "discretization", opts.quadrature_degree);
}

void parse_adaptivity(const json& a, AdaptOptions& opts) {
  expect_keys(a, "adaptivity", {"theta", "max_steps", "stop_estimate", "marking_convention"});
  opts.theta = get<double>(a, "theta", "adaptivity", opts.theta);
  AVSFE_REQUIRE(opts.theta > 0.0 && opts.theta <= 1.0, ConfigError, "adaptivity.theta must lie in (0, 1]");
  opts.max_steps = get<int>(a, "max_steps", "adaptivity", opts.max_steps);
  AVSFE_REQUIRE(opts.max_steps >= 0, ConfigError, "adaptivity.max_steps must be >= 0");
  opts.stop_estimate = get<double>(a, "stop_estimate", "adaptivity", opts.stop_estimate);
  const std::string conv = get<std::string>(a, "marking_convention", "adaptivity", "squared");
  if (conv == "squared") {
    opts.convention = MarkingConvention::Squared;
  } else if (conv == "plain") {
    opts.convention = MarkingConvention::Plain;
  } else {
    throw ConfigError("unknown marking_convention '" + conv + "'");
  }
}

void parse_materials(const json& m, RunConfig& rc) {
  AVSFE_REQUIRE(m.is_object(), ConfigError, "materials must be an object keyed by cell tag");
  for (const auto& [key, value] : m.items()) {
    int tag = 0;
    try {
      std::size_t used = 0;
      tag = std::stoi(key, &used);
      AVSFE_REQUIRE(used == key.size() && tag >= 0, ConfigError, "");
    } catch (const std::exception&) {
      throw ConfigError("material tag '" + key + "' is not a non-negative integer");
    }
    const std::string where = "materials." + key;
    expect_keys(value, where, {"E", "nu"});
    AVSFE_REQUIRE(value.contains("E") && value.contains("nu"), ConfigError, where + " needs E and nu");
    const double e = get<double>(value, "E", where, 0.0);
    const double nu = get<double>(value, "nu", where, 0.0);
    AVSFE_REQUIRE(e > 0.0, ConfigError, where + ".E must be positive");
    AVSFE_REQUIRE(nu > -1.0 && nu < 0.5, ConfigError, where + ".nu must lie in (-1, 0.5)");
    rc.materials[tag] = from_engineering(e, nu);
  }
}

void parse_output(const json& o, OutputSpec& out) {
  expect_keys(o, "output", {"csv", "vtk_dir", "verbosity", "timing"});
  out.csv = get<std::string>(o, "csv", "output", out.csv.string());
  out.vtk_dir = get<std::string>(o, "vtk_dir", "output", out.vtk_dir.string());
  out.verbosity = get<int>(o, "verbosity", "output", out.verbosity);
  out.timing = get<bool>(o, "timing", "output", out.timing);
}

// Facet-midpoint predicate for named edges of [0, L] x [0, H].
PointPredicate edge_predicate(const std::vector<std::string>& edges, double length, double height) {
  if (edges.empty()) return {};
  return [edges, length, height](const Point2& x) {
    const double tx = kEdgeTol * std::max(1.0, length), ty = kEdgeTol * std::max(1.0, height);
    for (const auto& e : edges) {
      if (e == "all") return true;
      if (e == "left" && x.x() < tx) return true;
      if (e == "right" && x.x() > length - tx) return true;
      if (e == "bottom" && x.y() < ty) return true;
      if (e == "top" && x.y() > height - ty) return true;
    }
    return false;
  };
}

}  // namespace

StressSpace parse_stress_space(const std::string& name) {
  if (name == "rt") return StressSpace::RtRows;
  if (name == "c0") return StressSpace::C0Tensor;
  throw ConfigError("stress space must be 'rt' or 'c0', got '" + name + "'");
}

Precision parse_precision(const std::string& name) {
  if (name == "auto") return Precision::Auto;
  if (name == "double") return Precision::Double;
  if (name == "extended") return Precision::Extended;
  if (name == "quad") return Precision::Quad;
  throw ConfigError("precision must be auto, double, extended or quad, got '" + name + "'");
}

RunConfig parse_run_config(const json& doc) {
  expect_keys(doc, "config", {"description", "study", "geometry", "materials", "boundary", "exact",
                              "discretization", "degrees", "refinements", "adaptivity", "adaptive",
                              "neumann_mode", "solver", "galerkin_baseline", "inclusion_spaces",
                              "output"});
  RunConfig rc;
  StudyConfig& sc = rc.study_config;
  if (doc.contains("study")) rc.study = parse_study_id(get<std::string>(doc, "study", "config", ""));
  if (doc.contains("geometry")) parse_geometry(doc.at("geometry"), rc);
  if (doc.contains("materials")) parse_materials(doc.at("materials"), rc);
  if (doc.contains("boundary")) parse_boundary(doc.at("boundary"), rc);
  rc.exact = get<std::string>(doc, "exact", "config", "");
  AVSFE_REQUIRE(rc.exact.empty() || rc.exact == "case_a" || rc.exact == "case_b", ConfigError,
                "exact must be 'case_a' or 'case_b'");
  if (doc.contains("discretization")) parse_discretization(doc.at("discretization"), sc.discretization);
  sc.degrees = get<std::vector<int>>(doc, "degrees", "config", sc.degrees);
  for (int p : sc.degrees) AVSFE_REQUIRE(p >= 1 && p <= 5, ConfigError, "degrees must lie in 1..5");
  sc.refinements = get<int>(doc, "refinements", "config", sc.refinements);
  rc.refinements_given = doc.contains("refinements");
  AVSFE_REQUIRE(sc.refinements >= 0, ConfigError, "refinements must be >= 0");
  if (doc.contains("adaptivity")) parse_adaptivity(doc.at("adaptivity"), sc.adapt);
  rc.adaptive = get<bool>(doc, "adaptive", "config", doc.contains("adaptivity"));
  const std::string mode = get<std::string>(doc, "neumann_mode", "config", "weak");
  AVSFE_REQUIRE(mode == "weak" || mode == "strong", ConfigError, "neumann_mode must be 'weak' or 'strong'");
  sc.neumann_mode = mode == "strong" ? NeumannMode::Strong : NeumannMode::Weak;
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    expect_keys(s, "solver", {"precision", "threads", "residual_tolerance", "iterative_threshold"});
    sc.solver.precision = parse_precision(get<std::string>(s, "precision", "solver", "auto"));
    sc.solver.threads = get<int>(s, "threads", "solver", 0);
    AVSFE_REQUIRE(sc.solver.threads >= 0, ConfigError, "solver.threads must be >= 0");
    sc.solver.residual_tolerance = get<double>(s, "residual_tolerance", "solver", sc.solver.residual_tolerance);
    sc.solver.iterative_threshold = get<int>(s, "iterative_threshold", "solver", sc.solver.iterative_threshold);
  }
  sc.galerkin_baseline = get<bool>(doc, "galerkin_baseline", "config", sc.galerkin_baseline);
  if (doc.contains("inclusion_spaces")) {
    sc.inclusion_spaces.clear();
    for (const auto& s : get<std::vector<std::string>>(doc, "inclusion_spaces", "config", {})) {
      sc.inclusion_spaces.push_back(parse_stress_space(s));
    }
    AVSFE_REQUIRE(!sc.inclusion_spaces.empty(), ConfigError, "inclusion_spaces must not be empty");
  }
  if (doc.contains("output")) parse_output(doc.at("output"), rc.output);
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  AVSFE_REQUIRE(in, ConfigError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_run_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_materials(RunConfig& rc) {
  if (rc.materials.empty()) return;
  StudyConfig& sc = rc.study_config;
  if (auto it = rc.materials.find(0); it != rc.materials.end()) {
    sc.material = it->second;
    sc.inclusion.matrix = it->second;
    sc.beam.youngs_modulus = it->second.youngs_modulus;
    sc.beam.poisson_ratio = it->second.poisson_ratio;
  }
  if (auto it = rc.materials.find(1); it != rc.materials.end()) sc.inclusion.inclusion = it->second;
}

ProblemSetup build_single_problem(const RunConfig& rc) {
  const GeometrySpec& g = rc.geometry;
  const StudyConfig& sc = rc.study_config;
  Mesh mesh;
  double length = 1.0, height = 1.0;
  switch (g.kind) {
    case GeometrySpec::Kind::Square: mesh = build_unit_square(g.nx, g.ny, g.diagonal); break;
    case GeometrySpec::Kind::Rectangle:
      mesh = build_rectangle(g.length, g.height, g.nx, g.ny, g.diagonal);
      length = g.length;
      height = g.height;
      break;
    case GeometrySpec::Kind::Inclusion: {
      const InclusionParameters& p = sc.inclusion;
      mesh = build_inclusion_mesh(p.center, p.radius, p.segments, p.target_h);
      break;
    }
    case GeometrySpec::Kind::File: {
      mesh = read_mesh(g.path);
      Eigen::Vector2d hi = Eigen::Vector2d::Constant(-1e300);
      for (const Point2& x : mesh.vertices()) hi = hi.cwiseMax(x);
      length = hi.x();
      height = hi.y();
      break;
    }
  }

  std::optional<ExactSolution> exact;
  std::map<int, IsotropicMaterial> mats = rc.materials;
  if (!rc.exact.empty()) {
    const IsotropicMaterial m = mats.count(0) ? mats.at(0) : from_engineering(1500.0, 0.4999);
    exact = rc.exact == "case_a" ? exact_case_A(m) : exact_case_B(m);
    AVSFE_REQUIRE(g.kind == GeometrySpec::Kind::Square || g.kind == GeometrySpec::Kind::File,
                  ConfigError, "manufactured solutions are defined on the unit square");
  }
  if (mats.empty()) mats[0] = from_engineering(1500.0, 0.4999);
  std::set<int> used(mesh.materials().begin(), mesh.materials().end());
  for (int tag : used) {
    AVSFE_REQUIRE(mats.count(tag), ConfigError, "no material given for cell tag " + std::to_string(tag));
  }

  const BoundarySpec& b = rc.boundary;
  const bool file_tags = g.kind == GeometrySpec::Kind::File && !rc.boundary_given;
  if (!file_tags) {
    // Without a boundary block the whole boundary is clamped.
    const auto dir = rc.boundary_given ? b.dirichlet_edges : std::vector<std::string>{"all"};
    mesh = tag_boundary(mesh, edge_predicate(dir, length, height), edge_predicate(b.neumann_edges, length, height));
  }

  ProblemSetup s{std::move(mesh), {}, exact};
  s.config.materials = MaterialField(mats);
  s.config.discretization = sc.discretization;
  if (s.config.discretization.p <= 0) s.config.discretization.p = 1;
  s.config.solver = sc.solver;
  s.config.bc.dirichlet_components = b.dirichlet_components;
  s.config.bc.point_constraints = b.points;
  s.config.bc.neumann_mode = sc.neumann_mode;
  const Vector2 t = b.traction;
  s.config.bc.traction = [t](const Point2&) { return t; };
  if (exact) {
    s.config.body_force = exact->body_force;
    s.config.bc.dirichlet_value = exact->displacement;
  } else {
    s.config.body_force = [](const Point2&) { return Vector2::Zero().eval(); };
  }
  if (b.dirichlet_value) {
    const Vector2 v = *b.dirichlet_value;
    s.config.bc.dirichlet_value = [v](const Point2&) { return v; };
  }
  return s;
}

}  // namespace avsfe::cli
