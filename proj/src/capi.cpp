#include "smxfem/smxfem.h"

#include "smxfem/run.hpp"
#include "smxfem/verify.hpp"

#include <iostream>
#include <memory>
#include <new>
#include <string>

struct smx_config {
  smx::RunConfig config;
};

struct smx_result {
  smx::RunResult result;
};

struct smx_solution {
  smx::ProblemSolution solution;
};

namespace {

thread_local std::string last_error;

smx_status status_of(smx::ErrorKind kind) {
  switch (kind) {
    case smx::ErrorKind::InvalidArgument: return SMX_ERR_INVALID_ARGUMENT;
    case smx::ErrorKind::Geometry: return SMX_ERR_GEOMETRY;
    case smx::ErrorKind::Singular: return SMX_ERR_SINGULAR;
    case smx::ErrorKind::Config: return SMX_ERR_CONFIG;
    case smx::ErrorKind::Io: return SMX_ERR_IO;
    case smx::ErrorKind::Runtime: return SMX_ERR_RUNTIME;
  }
  return SMX_ERR_INTERNAL;
}

smx_status set_error(smx_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
smx_status guarded(Fn&& fn) {
  try {
    fn();
    return SMX_OK;
  } catch (const smx::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SMX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SMX_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SMX_ERR_INTERNAL, "unknown error");
  }
}

#define SMX_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(SMX_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* smx_version(void) { return "1.0.0"; }

const char* smx_last_error(void) { return last_error.c_str(); }

const char* smx_status_name(smx_status status) {
  switch (status) {
    case SMX_OK: return "ok";
    case SMX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SMX_ERR_GEOMETRY: return "geometry error";
    case SMX_ERR_SINGULAR: return "singular system";
    case SMX_ERR_CONFIG: return "config error";
    case SMX_ERR_IO: return "i/o error";
    case SMX_ERR_RUNTIME: return "runtime error";
    case SMX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

smx_status smx_config_load(const char* path, smx_config** out) {
  SMX_REQUIRE(path && out, "smx_config_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new smx_config{smx::load_config(path)}; });
}

smx_status smx_config_parse(const char* text, smx_config** out) {
  SMX_REQUIRE(text && out, "smx_config_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = new smx_config{smx::parse_config(text)}; });
}

smx_status smx_config_set_threads(smx_config* config, int threads) {
  SMX_REQUIRE(config, "smx_config_set_threads: null config");
  SMX_REQUIRE(threads > 0, "smx_config_set_threads: threads must be positive");
  config->config.threads = threads;
  return SMX_OK;
}

smx_status smx_config_mode(const smx_config* config, const char** mode) {
  SMX_REQUIRE(config && mode, "smx_config_mode: null argument");
  *mode = config->config.mode ? smx::mode_name(*config->config.mode) : nullptr;
  return SMX_OK;
}

void smx_config_free(smx_config* config) { delete config; }

smx_status smx_run(const smx_config* config, const char* mode, const char* out_dir, int echo, smx_result** out) {
  SMX_REQUIRE(config && out, "smx_run: null argument");
  *out = nullptr;
  return guarded([&] {
    std::optional<smx::RunMode> m = config->config.mode;
    if (mode) m = smx::parse_mode(mode);
    if (!m) smx::fail(smx::ErrorKind::Config, "no mode given and the config names none");
    const std::string dir = out_dir ? out_dir : config->config.output.directory;
    auto r = std::make_unique<smx_result>(smx::run(*m, config->config, dir, echo ? &std::cout : nullptr));
    *out = r.release();
  });
}

smx_status smx_result_scalar(const smx_result* result, const char* key, double* value) {
  SMX_REQUIRE(result && key && value, "smx_result_scalar: null argument");
  const auto it = result->result.scalars.find(key);
  if (it == result->result.scalars.end())
    return set_error(SMX_ERR_INVALID_ARGUMENT, std::string("smx_result_scalar: no value named '") + key + "'");
  *value = it->second;
  return SMX_OK;
}

smx_status smx_result_summary(const smx_result* result, const char** text) {
  SMX_REQUIRE(result && text, "smx_result_summary: null argument");
  *text = result->result.summary.c_str();
  return SMX_OK;
}

size_t smx_result_file_count(const smx_result* result) { return result ? result->result.files.size() : 0; }

const char* smx_result_file(const smx_result* result, size_t index) {
  if (!result || index >= result->result.files.size()) return nullptr;
  return result->result.files[index].c_str();
}

void smx_result_free(smx_result* result) { delete result; }

smx_status smx_solve(const smx_config* config, smx_solution** out) {
  SMX_REQUIRE(config && out, "smx_solve: null argument");
  *out = nullptr;
  return guarded([&] {
    smx::RunConfig c = config->config;
    c.mode = smx::RunMode::Solve;
    c.validate();
    const smx::Mesh mesh(c.mesh.min, c.mesh.max, c.mesh.nx, c.mesh.ny);
    smx::Loads loads;
    loads.body_force = c.body_force;
    smx::ProblemSpec spec{mesh, smx::init_signed_distance_circles(mesh, c.particles), c.material_set(), c.smoothing,
                          loads, {}, c.solver, c.threads};
    *out = new smx_solution{smx::solve_problem(spec)};
  });
}

smx_status smx_solution_displacement(const smx_solution* solution, double x, double y, double* ux, double* uy) {
  SMX_REQUIRE(solution && ux && uy, "smx_solution_displacement: null argument");
  return guarded([&] {
    const smx::Vec2 u = smx::displacement_at(solution->solution.disc, solution->solution.u, smx::Vec2(x, y));
    *ux = u.x();
    *uy = u.y();
  });
}

smx_status smx_solution_energy(const smx_solution* solution, double* bulk, double* interface_energy,
                               double* external_work, double* total) {
  SMX_REQUIRE(solution, "smx_solution_energy: null solution");
  const auto& e = solution->solution.energy;
  if (bulk) *bulk = e.bulk;
  if (interface_energy) *interface_energy = e.interface;
  if (external_work) *external_work = e.external;
  if (total) *total = e.total;
  return SMX_OK;
}

smx_status smx_solution_dofs(const smx_solution* solution, size_t* dofs) {
  SMX_REQUIRE(solution && dofs, "smx_solution_dofs: null argument");
  *dofs = static_cast<size_t>(solution->solution.disc.dofs.num_dofs());
  return SMX_OK;
}

void smx_solution_free(smx_solution* solution) { delete solution; }

smx_status smx_oracle_radial_displacement(double radius, double lambda, double mu, double eigenstrain, double tau,
                                          double stiffness, double r, double* u_r) {
  SMX_REQUIRE(u_r, "smx_oracle_radial_displacement: null output");
  SMX_REQUIRE(radius > 0.0 && mu > 0.0 && 3.0 * lambda + 2.0 * mu > 0.0 && r >= 0.0,
              "smx_oracle_radial_displacement: need radius > 0, mu > 0, 3 lambda + 2 mu > 0, r >= 0");
  return guarded([&] {
    smx::InclusionParams p;
    p.radius = radius;
    p.lambda = lambda;
    p.mu = mu;
    p.eigenstrain = eigenstrain;
    p.tau = tau;
    p.stiffness = stiffness;
    *u_r = smx::oracle_solve(p).radial_displacement(r);
  });
}

}  // extern "C"
