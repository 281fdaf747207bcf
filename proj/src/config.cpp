#include "smxfem/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace smx {

RunMode parse_mode(const std::string& name) {
  if (name == "solve") return RunMode::Solve;
  if (name == "verify") return RunMode::Verify;
  if (name == "converge") return RunMode::Converge;
  if (name == "timing") return RunMode::Timing;
  if (name == "evolve") return RunMode::Evolve;
  fail(ErrorKind::Config, "unknown mode '" + name + "' (expected solve, verify, converge, timing or evolve)");
}

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Solve: return "solve";
    case RunMode::Verify: return "verify";
    case RunMode::Converge: return "converge";
    case RunMode::Timing: return "timing";
    case RunMode::Evolve: return "evolve";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void error(const YAML::Node& node, const std::string& what) const {
    std::ostringstream os;
    os << source_;
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) os << ":" << m.line + 1 << ":" << m.column + 1;
    os << ": " << what;
    fail(ErrorKind::Config, os.str());
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) error(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) const {
    require_map(node, section.empty() ? "config" : section);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        error(kv.first, "unknown key '" + key + "'" + (section.empty() ? "" : " in " + section) + " (allowed: " + list + ")");
      }
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, what + " must be a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      error(node, what + " must be a number, got '" + node.Scalar() + "'");
    }
  }

  int integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, what + " must be an integer");
    try {
      return node.as<int>();
    } catch (const YAML::Exception&) {
      error(node, what + " must be an integer, got '" + node.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, what + " must be true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      error(node, what + " must be true or false, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, what + " must be a string");
    return node.Scalar();
  }

  Vec2 vec2(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() != 2) error(node, what + " must be a list of two numbers");
    return Vec2(number(node[0], what), number(node[1], what));
  }

  std::array<int, 2> int2(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() != 2) error(node, what + " must be a list of two integers");
    return {integer(node[0], what), integer(node[1], what)};
  }

  double positive(const YAML::Node& node, const std::string& what) const {
    const double v = number(node, what);
    if (!(v > 0.0)) error(node, what + " must be positive");
    return v;
  }

  double non_negative(const YAML::Node& node, const std::string& what) const {
    const double v = number(node, what);
    if (!(v >= 0.0)) error(node, what + " must be >= 0");
    return v;
  }

  int positive_int(const YAML::Node& node, const std::string& what) const {
    const int v = integer(node, what);
    if (v <= 0) error(node, what + " must be a positive integer");
    return v;
  }

 private:
  std::string source_;
};

void read_mesh(const Reader& rd, const YAML::Node& n, MeshConfig& m) {
  rd.check_keys(n, "mesh", {"min", "max", "nx", "ny"});
  if (n["min"]) m.min = rd.vec2(n["min"], "mesh.min");
  if (n["max"]) m.max = rd.vec2(n["max"], "mesh.max");
  if (n["nx"]) m.nx = rd.positive_int(n["nx"], "mesh.nx");
  m.ny = n["ny"] ? rd.positive_int(n["ny"], "mesh.ny") : m.nx;
  if (!(m.max.x() > m.min.x()) || !(m.max.y() > m.min.y())) rd.error(n, "mesh.max must exceed mesh.min in both axes");
}

void read_particles(const Reader& rd, const YAML::Node& n, std::vector<Circle>& out) {
  if (!n.IsSequence()) rd.error(n, "particles must be a list");
  out.clear();
  for (const auto& p : n) {
    rd.check_keys(p, "particles entry", {"center", "radius"});
    Circle c{Vec2::Zero(), 1.0};
    if (p["center"]) c.center = rd.vec2(p["center"], "particle center");
    if (!p["radius"]) rd.error(p, "particle needs a radius");
    c.radius = rd.positive(p["radius"], "particle radius");
    out.push_back(c);
  }
}

void read_materials(const Reader& rd, const YAML::Node& n, MaterialConfig& m) {
  rd.check_keys(n, "materials", {"matrix", "alpha", "eigenstrain", "interface"});
  if (const auto mx = n["matrix"]) {
    rd.check_keys(mx, "materials.matrix", {"C11", "C12", "C44", "lambda", "mu"});
    const bool cubic = mx["C11"] || mx["C12"] || mx["C44"];
    const bool iso = mx["lambda"] || mx["mu"];
    if (cubic == iso) rd.error(mx, "materials.matrix needs either C11, C12, C44 or lambda, mu");
    if (cubic) {
      for (const char* k : {"C11", "C12", "C44"})
        if (!mx[k]) rd.error(mx, std::string("materials.matrix is missing ") + k);
      m.isotropic = false;
      m.matrix = BulkMaterial::cubic(rd.number(mx["C11"], "C11"), rd.number(mx["C12"], "C12"), rd.number(mx["C44"], "C44"));
    } else {
      for (const char* k : {"lambda", "mu"})
        if (!mx[k]) rd.error(mx, std::string("materials.matrix is missing ") + k);
      m.isotropic = true;
      m.lambda = rd.number(mx["lambda"], "lambda");
      m.mu = rd.number(mx["mu"], "mu");
      m.matrix = BulkMaterial::isotropic(m.lambda, m.mu);
    }
    try {
      m.matrix.validate("materials.matrix");
    } catch (const Error& e) {
      rd.error(mx, e.what());
    }
  }
  if (n["alpha"]) m.alpha = rd.positive(n["alpha"], "materials.alpha");
  if (n["eigenstrain"]) m.eigenstrain = rd.number(n["eigenstrain"], "materials.eigenstrain");
  if (const auto it = n["interface"]) {
    rd.check_keys(it, "materials.interface", {"gamma0", "tau", "stiffness"});
    if (it["gamma0"]) m.interface.gamma0 = rd.number(it["gamma0"], "interface.gamma0");
    if (it["tau"]) m.interface.tau = rd.number(it["tau"], "interface.tau");
    if (it["stiffness"]) {
      m.interface.stiffness = rd.number(it["stiffness"], "interface.stiffness");
      if (m.interface.stiffness < 0.0) rd.error(it["stiffness"], "interface.stiffness must be >= 0");
    }
  }
}

void read_smoothing(const Reader& rd, const YAML::Node& n, SmoothingOptions& s) {
  rd.check_keys(n, "smoothing", {"standard", "enriched"});
  if (n["standard"]) {
    const auto v = rd.int2(n["standard"], "smoothing.standard");
    if (v[0] <= 0 || v[1] <= 0) rd.error(n["standard"], "smoothing.standard entries must be positive");
    s.standard_m = v[0];
    s.standard_n = v[1];
  }
  if (n["enriched"]) {
    const auto v = rd.int2(n["enriched"], "smoothing.enriched");
    if (v[0] <= 0 || v[1] <= 0) rd.error(n["enriched"], "smoothing.enriched entries must be positive");
    s.enriched_m = v[0];
    s.enriched_n = v[1];
  }
}

void read_evolution(const Reader& rd, const YAML::Node& n, EvolutionConfig& ev) {
  rd.check_keys(n, "evolution",
                {"characteristic_length", "cfl", "curvature_dt_factor", "reinit_period", "band_width", "max_steps",
                 "max_time", "tol_v", "energy_tol", "window", "energy_increase_tol", "max_halvings",
                 "side_gradient", "recovery_radius"});
  EvolutionOptions& o = ev.options;
  if (n["characteristic_length"]) ev.characteristic_length = rd.positive(n["characteristic_length"], "characteristic_length");
  if (n["cfl"]) {
    o.cfl = rd.positive(n["cfl"], "evolution.cfl");
    if (o.cfl > 1.0) rd.error(n["cfl"], "evolution.cfl must not exceed 1");
  }
  if (n["curvature_dt_factor"]) o.curvature_dt_factor = rd.positive(n["curvature_dt_factor"], "curvature_dt_factor");
  if (n["reinit_period"]) o.reinit_period = rd.positive_int(n["reinit_period"], "reinit_period");
  if (n["band_width"]) {
    o.band_width = rd.positive_int(n["band_width"], "band_width");
    if (o.band_width < 4) rd.error(n["band_width"], "band_width must be at least 4 cells");
  }
  if (n["max_steps"]) o.max_steps = rd.positive_int(n["max_steps"], "max_steps");
  if (n["max_time"]) o.max_time = rd.positive(n["max_time"], "max_time");
  if (n["tol_v"]) o.tol_v = rd.positive(n["tol_v"], "tol_v");
  if (n["energy_tol"]) o.energy_tol = rd.positive(n["energy_tol"], "energy_tol");
  if (n["window"]) o.window = rd.positive_int(n["window"], "window");
  if (n["energy_increase_tol"]) o.energy_increase_tol = rd.positive(n["energy_increase_tol"], "energy_increase_tol");
  if (n["max_halvings"]) o.max_halvings = rd.integer(n["max_halvings"], "max_halvings");
  if (n["side_gradient"]) {
    const std::string s = rd.text(n["side_gradient"], "side_gradient");
    if (s == "recovered") o.side_gradient = SideGradient::Recovered;
    else if (s == "cells") o.side_gradient = SideGradient::Cells;
    else rd.error(n["side_gradient"], "side_gradient must be 'recovered' or 'cells'");
  }
  if (n["recovery_radius"]) o.recovery_radius = rd.positive(n["recovery_radius"], "recovery_radius");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    fail(ErrorKind::Config, os.str());
  }
  RunConfig c;
  c.hash = fnv1a(text);
  if (root.IsNull()) return c;
  rd.check_keys(root, "",
                {"mode", "mesh", "particles", "materials", "smoothing", "solver", "body_force", "study", "profile",
                 "evolution", "output", "threads"});
  if (root["mode"]) {
    try {
      c.mode = parse_mode(rd.text(root["mode"], "mode"));
    } catch (const Error& e) {
      rd.error(root["mode"], e.what());
    }
  }
  if (root["mesh"]) read_mesh(rd, root["mesh"], c.mesh);
  if (root["particles"]) read_particles(rd, root["particles"], c.particles);
  if (root["materials"]) read_materials(rd, root["materials"], c.materials);
  if (root["smoothing"]) read_smoothing(rd, root["smoothing"], c.smoothing);
  if (root["solver"]) {
    const std::string s = rd.text(root["solver"], "solver");
    if (s == "direct") c.solver = SolverKind::Direct;
    else if (s == "cg") c.solver = SolverKind::ConjugateGradient;
    else rd.error(root["solver"], "solver must be 'direct' or 'cg'");
  }
  if (root["body_force"]) c.body_force = rd.vec2(root["body_force"], "body_force");
  if (const auto st = root["study"]) {
    rd.check_keys(st, "study", {"sizes", "repeats"});
    if (st["sizes"]) {
      if (!st["sizes"].IsSequence()) rd.error(st["sizes"], "study.sizes must be a list");
      c.study.sizes.clear();
      for (const auto& s : st["sizes"]) c.study.sizes.push_back(rd.positive_int(s, "study.sizes entry"));
    }
    if (st["repeats"]) c.study.repeats = rd.positive_int(st["repeats"], "study.repeats");
  }
  if (const auto pr = root["profile"]) {
    rd.check_keys(pr, "profile", {"samples", "angle", "r_max"});
    if (pr["samples"]) c.profile.samples = rd.positive_int(pr["samples"], "profile.samples");
    if (pr["angle"]) c.profile.angle = rd.number(pr["angle"], "profile.angle");
    if (pr["r_max"]) c.profile.r_max = rd.non_negative(pr["r_max"], "profile.r_max");
  }
  if (root["evolution"]) read_evolution(rd, root["evolution"], c.evolution);
  if (const auto out = root["output"]) {
    rd.check_keys(out, "output", {"directory", "snapshot_period", "contour_period", "matrix_market"});
    if (out["directory"]) c.output.directory = rd.text(out["directory"], "output.directory");
    if (out["snapshot_period"]) c.output.snapshot_period = rd.integer(out["snapshot_period"], "snapshot_period");
    if (out["contour_period"]) c.output.contour_period = rd.integer(out["contour_period"], "contour_period");
    if (out["matrix_market"]) c.output.matrix_market = rd.boolean(out["matrix_market"], "matrix_market");
    if (c.output.snapshot_period < 0) rd.error(out["snapshot_period"], "snapshot_period must be >= 0");
    if (c.output.contour_period < 0) rd.error(out["contour_period"], "contour_period must be >= 0");
  }
  if (root["threads"]) c.threads = rd.positive_int(root["threads"], "threads");
  c.evolution.options.smoothing = c.smoothing;
  c.evolution.options.solver = c.solver;
  c.evolution.options.threads = c.threads;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

MaterialSet RunConfig::material_set() const {
  MaterialSet m;
  m.matrix = materials.matrix;
  m.particle = materials.matrix.scaled(materials.alpha);
  m.eigenstrain = dilatational(materials.eigenstrain);
  m.interface = materials.interface;
  return m;
}

void RunConfig::validate() const {
  if (mesh.nx <= 0 || mesh.ny <= 0) fail(ErrorKind::Config, "mesh: nx and ny must be positive");
  for (const auto& p : particles) {
    if (!(p.radius > 0.0)) fail(ErrorKind::Config, "particles: radius must be positive");
    const bool inside = (p.center.array() - p.radius > mesh.min.array()).all() &&
                        (p.center.array() + p.radius < mesh.max.array()).all();
    if (!inside) fail(ErrorKind::Config, "particles: every particle must lie strictly inside the mesh");
  }
  try {
    material_set().validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  if (threads <= 0) fail(ErrorKind::Config, "threads must be positive");
  if (!mode) return;
  switch (*mode) {
    case RunMode::Solve: break;
    case RunMode::Verify:
    case RunMode::Converge:
    case RunMode::Timing:
      if (particles.size() != 1) fail(ErrorKind::Config, std::string(mode_name(*mode)) + ": needs exactly one particle");
      if (!materials.isotropic || materials.alpha != 1.0)
        fail(ErrorKind::Config, std::string(mode_name(*mode)) +
                                    ": the circular-inclusion oracle needs an isotropic matrix (lambda, mu) and alpha = 1");
      if (*mode != RunMode::Verify && study.sizes.size() < (*mode == RunMode::Timing ? 4u : 3u))
        fail(ErrorKind::Config, std::string(mode_name(*mode)) + ": study.sizes has too few levels");
      break;
    case RunMode::Evolve:
      if (particles.empty()) fail(ErrorKind::Config, "evolve: particle list is empty");
      if (!evolution.characteristic_length && !(materials.interface.gamma0 > 0.0))
        fail(ErrorKind::Config, "evolve: needs interface.gamma0 > 0 or evolution.characteristic_length");
      if (materials.eigenstrain == 0.0) fail(ErrorKind::Config, "evolve: eigenstrain must be nonzero");
      break;
  }
}

}  // namespace smx
