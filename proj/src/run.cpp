#include "smxfem/run.hpp"

#include "smxfem/io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace smx {

namespace {

namespace fs = std::filesystem;

class RunContext {
 public:
  RunContext(RunMode mode, const RunConfig& cfg, const std::string& dir, std::ostream* log)
      : cfg_(cfg), dir_(dir), log_(log) {
    result_.mode = mode;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
    run_log_.open(path("run.log"));
    if (!run_log_) fail(ErrorKind::Io, "cannot write '" + path("run.log") + "'");
    result_.files.push_back("run.log");
    line(std::string("mode ") + mode_name(mode) + " config_hash=" + hex_hash(cfg.hash));
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
  std::string header(const std::string& columns) const {
    return csv_header(mode_name(result_.mode), cfg_.hash, columns);
  }
  void wrote(const std::string& name) { result_.files.push_back(name); }

  void line(const std::string& text) {
    run_log_ << text << "\n";
    run_log_.flush();
    if (log_) *log_ << text << "\n" << std::flush;
  }

  void scalar(const std::string& key, double value) { result_.scalars[key] = value; }

  RunResult finish() {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "mode = " << mode_name(result_.mode) << "\n";
    os << "config_hash = " << hex_hash(cfg_.hash) << "\n";
    for (const auto& [k, v] : result_.scalars) os << k << " = " << v << "\n";
    result_.summary = os.str();
    write_text(path("summary.txt"), result_.summary);
    wrote("summary.txt");
    line("done");
    return std::move(result_);
  }

 private:
  const RunConfig& cfg_;
  std::string dir_;
  std::ostream* log_;
  std::ofstream run_log_;
  RunResult result_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mesh config_mesh(const RunConfig& c) { return Mesh(c.mesh.min, c.mesh.max, c.mesh.nx, c.mesh.ny); }

InclusionParams inclusion_params(const RunConfig& c) {
  InclusionParams p;
  p.radius = c.particles.front().radius;
  p.center = c.particles.front().center;
  p.lambda = c.materials.lambda;
  p.mu = c.materials.mu;
  p.eigenstrain = c.materials.eigenstrain;
  p.tau = c.materials.interface.tau;
  p.stiffness = c.materials.interface.stiffness;
  return p;
}

// Square mesh centred on the particle, as the oracle-based modes need.
double inclusion_half_width(const RunConfig& c) {
  const Vec2 mid = 0.5 * (c.mesh.min + c.mesh.max);
  const Vec2 ext = c.mesh.max - c.mesh.min;
  const double tol = 1e-9 * ext.norm();
  if (std::abs(ext.x() - ext.y()) > tol || c.mesh.nx != c.mesh.ny || (mid - c.particles.front().center).norm() > tol)
    fail(ErrorKind::Config, "oracle modes need a square mesh (nx = ny) centred on the particle");
  return 0.5 * ext.x();
}

void run_solve(RunContext& ctx, const RunConfig& c) {
  const Mesh mesh = config_mesh(c);
  LevelSetField field = init_signed_distance_circles(mesh, c.particles);
  const MaterialSet mat = c.material_set();
  Loads loads;
  loads.body_force = c.body_force;
  ProblemSpec spec{mesh, std::move(field), mat, c.smoothing, loads, {}, c.solver, c.threads};
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSolution sol = solve_problem(spec);
  const double total = seconds_since(t0);
  ctx.line("dofs " + std::to_string(sol.disc.dofs.num_dofs()) + ", Pi " + fmt(sol.energy.total) + ", residual " +
           fmt(sol.relative_residual) + ", " + fmt(total) + " s");
  write_vtk(ctx.path("fields.vtk"), sol.disc, sol.u, mat, "smxfem solve");
  ctx.wrote("fields.vtk");
  write_cells_csv(ctx.path("cells.csv"), sol.disc, ctx.header("element_id,cell_id,phase,area,vertices"));
  ctx.wrote("cells.csv");
  if (c.output.matrix_market) {
    write_matrix_market(assemble(sol.disc, mat, loads, c.threads).K, ctx.path("stiffness.mtx"));
    ctx.wrote("stiffness.mtx");
  }
  ctx.scalar("dofs", sol.disc.dofs.num_dofs());
  ctx.scalar("enriched_nodes", sol.disc.dofs.num_enriched_nodes);
  ctx.scalar("bulk_energy", sol.energy.bulk);
  ctx.scalar("interface_energy", sol.energy.interface);
  ctx.scalar("external_energy", sol.energy.external);
  ctx.scalar("total_energy", sol.energy.total);
  ctx.scalar("relative_residual", sol.relative_residual);
  ctx.scalar("particle_area", discrete_particle_area(sol.disc));
  ctx.scalar("interface_length", discrete_interface_length(sol.disc));
  ctx.scalar("formation_seconds", sol.formation_seconds);
  ctx.scalar("seconds", total);
}

void run_verify(RunContext& ctx, const RunConfig& c) {
  const InclusionParams p = inclusion_params(c);
  const double half = inclusion_half_width(c);
  const CircularInclusionOracle oracle = oracle_solve(p);
  const double ur_closed = oracle.radial_displacement(p.radius);
  const double ur_radial = radial_fd_oracle(p).at(p.radius);
  ctx.line("oracle u_r(R): closed form " + fmt(ur_closed) + ", radial discretization " + fmt(ur_radial));

  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSolution sol = solve_inclusion(p, half, c.mesh.nx, c.smoothing, c.solver, c.threads);
  const double r_max = c.profile.r_max > 0.0 ? c.profile.r_max : half;
  const auto profile = radial_profile(sol.disc, sol.u, oracle, c.profile.angle, c.profile.samples, r_max);
  const ErrorNorms norms = error_norms(sol.disc, sol.u, oracle);
  const double seconds = seconds_since(t0);
  const ProfileErrors err = profile_errors(profile, p.radius, 2.0 * sol.disc.mesh.h());

  {
    std::ostringstream os;
    os << std::setprecision(12) << ctx.header("r,u_r_h,u_r_exact,e_rr_h,e_rr_exact");
    for (const auto& s : profile) os << s.r << "," << s.u_h << "," << s.u_exact << "," << s.err_h << "," << s.err_exact << "\n";
    write_text(ctx.path("verify_profile.csv"), os.str());
    ctx.wrote("verify_profile.csv");
  }
  write_oracle_csv(ctx.path("oracle_fields.csv"), oracle, c.profile.samples, r_max, ctx.header("r,phase,u_r,e_rr,e_tt"));
  ctx.wrote("oracle_fields.csv");
  write_vtk(ctx.path("fields.vtk"), sol.disc, sol.u, oracle.materials(), "smxfem verify");
  ctx.wrote("fields.vtk");

  ctx.line("max relative error u_r: " + fmt(err.displacement_outside) + " away from the interface, " +
           fmt(err.displacement_band) + " inside the band");
  ctx.line("max relative error e_rr: " + fmt(err.strain_outside) + " away from the interface, " +
           fmt(err.strain_band) + " inside the band");
  ctx.scalar("oracle_ur_closed", ur_closed);
  ctx.scalar("oracle_ur_radial", ur_radial);
  ctx.scalar("displacement_error_outside", err.displacement_outside);
  ctx.scalar("displacement_error_band", err.displacement_band);
  ctx.scalar("strain_error_outside", err.strain_outside);
  ctx.scalar("strain_error_band", err.strain_band);
  ctx.scalar("e_d", norms.displacement);
  ctx.scalar("e_e", norms.energy);
  ctx.scalar("seconds", seconds);
}

void run_converge(RunContext& ctx, const RunConfig& c) {
  const InclusionParams p = inclusion_params(c);
  const double half = inclusion_half_width(c);
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceTable t = convergence_study(p, half, c.study.sizes, c.smoothing, c.solver, c.threads);
  const double seconds = seconds_since(t0);
  std::ostringstream os;
  os << std::setprecision(12) << ctx.header("n,h,dofs,e_d,e_e");
  for (const auto& r : t.rows) {
    os << r.n << "," << r.h << "," << r.dofs << "," << r.errors.displacement << "," << r.errors.energy << "\n";
    ctx.line("n " + std::to_string(r.n) + ": e_d " + fmt(r.errors.displacement) + ", e_e " + fmt(r.errors.energy));
  }
  os << "# displacement_rate=" << t.displacement_rate << " energy_rate=" << t.energy_rate << "\n";
  write_text(ctx.path("convergence.csv"), os.str());
  ctx.wrote("convergence.csv");
  ctx.line("rates: displacement " + fmt(t.displacement_rate) + ", energy " + fmt(t.energy_rate));
  ctx.scalar("displacement_rate", t.displacement_rate);
  ctx.scalar("energy_rate", t.energy_rate);
  ctx.scalar("seconds", seconds);
}

void run_timing(RunContext& ctx, const RunConfig& c) {
  const InclusionParams p = inclusion_params(c);
  const double half = inclusion_half_width(c);
  const TimingTable t = timing_study(p, half, c.study.sizes, c.smoothing, c.study.repeats, c.threads);
  std::ostringstream os;
  os << std::setprecision(12) << ctx.header("n,elements,seconds");
  for (const auto& r : t.rows) {
    os << r.n << "," << r.elements << "," << r.seconds << "\n";
    ctx.line("n " + std::to_string(r.n) + ": " + std::to_string(r.elements) + " elements, " + fmt(r.seconds) + " s");
  }
  os << "# slope=" << t.slope << "\n";
  write_text(ctx.path("timing.csv"), os.str());
  ctx.wrote("timing.csv");
  const double decades = std::log10(static_cast<double>(t.rows.back().elements) / t.rows.front().elements);
  ctx.line("slope " + fmt(t.slope) + " over " + fmt(decades) + " decades");
  ctx.scalar("slope", t.slope);
  ctx.scalar("decades", decades);
}

void run_evolve(RunContext& ctx, const RunConfig& c) {
  const ShapeSetup setup = shape_setup(c);
  ctx.line("R0 " + fmt(setup.r0) + ", L " + fmt(setup.characteristic_length) + ", gamma (dimensionless) " +
           fmt(setup.problem.gamma()));
  std::ostringstream metrics;
  metrics << std::setprecision(12)
          << ctx.header("step,time,dt,area,perimeter,a2,a4,kappa_min,kappa_max,d4_asymmetry,Pi,U_B,U_S,max_vn,rejections");
  fs::create_directories(fs::path(ctx.path("contours")));
  const int cperiod = c.output.contour_period;
  const int speriod = c.output.snapshot_period;
  auto contour = [&](const EvolutionState& s) {
    std::ostringstream name;
    name << "contours/contour_" << std::setw(6) << std::setfill('0') << s.step << ".csv";
    write_contour_csv(ctx.path(name.str()), s.field, ctx.header("x,y,segment_id"));
    ctx.wrote(name.str());
  };
  auto snapshot = [&](const EvolutionState& s) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << s.step << ".vtk";
    write_vtk(ctx.path(name.str()), s.solution.disc, s.solution.u, setup.problem.materials, "smxfem evolve");
    ctx.wrote(name.str());
  };
  int last_contour = -1, last_snapshot = -1;
  const auto t0 = std::chrono::steady_clock::now();
  const EvolutionSummary sum = run_evolution(setup.problem, setup.initial, [&](const EvolutionState& s, const ShapeMetrics& m) {
    const double vmax = s.speed_history.empty() ? 0.0 : s.speed_history.back();
    metrics << s.step << "," << s.time << "," << s.dt << "," << s.area << "," << m.perimeter << "," << m.a2 << ","
            << m.a4 << "," << m.kappa_min << "," << m.kappa_max << "," << m.d4_asymmetry << ","
            << s.solution.energy.total << "," << s.solution.energy.bulk << "," << s.solution.energy.interface << ","
            << vmax << "," << s.rejections << "\n";
    ctx.line("step " + std::to_string(s.step) + " t " + fmt(s.time) + " Pi " + fmt(s.solution.energy.total) +
             " area " + fmt(s.area) + " a4 " + fmt(m.a4) + " max|v| " + fmt(vmax));
    if (cperiod > 0 && s.step % cperiod == 0) {
      contour(s);
      last_contour = s.step;
    }
    if (s.step == 0 || (speriod > 0 && s.step % speriod == 0)) {
      snapshot(s);
      last_snapshot = s.step;
    }
  });
  if (last_contour != sum.state.step) contour(sum.state);
  if (last_snapshot != sum.state.step) snapshot(sum.state);
  write_text(ctx.path("metrics.csv"), metrics.str());
  ctx.wrote("metrics.csv");

  const ShapeMetrics& m = sum.metrics;
  ctx.line(std::string(sum.converged ? "equilibrium reached" : "step/time budget exhausted") + " after " +
           std::to_string(sum.state.step) + " steps");
  ctx.scalar("r0", setup.r0);
  ctx.scalar("characteristic_length", setup.characteristic_length);
  ctx.scalar("converged", sum.converged ? 1.0 : 0.0);
  ctx.scalar("steps", sum.state.step);
  ctx.scalar("time", sum.state.time);
  ctx.scalar("rejections", sum.state.rejections);
  ctx.scalar("a2", m.a2);
  ctx.scalar("a4", m.a4);
  ctx.scalar("kappa_min", m.kappa_min);
  ctx.scalar("kappa_max", m.kappa_max);
  ctx.scalar("d4_asymmetry", m.d4_asymmetry);
  ctx.scalar("max_d4_asymmetry", sum.max_d4_asymmetry);
  ctx.scalar("max_area_drift", sum.max_area_drift);
  ctx.scalar("total_energy", sum.state.solution.energy.total);
  ctx.scalar("seconds", seconds_since(t0));
}

}  // namespace

ShapeSetup shape_setup(const RunConfig& c) {
  if (c.particles.empty()) fail(ErrorKind::Config, "evolve: particle list is empty");
  double area = 0.0;
  for (const auto& p : c.particles) area += std::numbers::pi * p.radius * p.radius;
  const double r0 = std::sqrt(area / (std::numbers::pi * static_cast<double>(c.particles.size())));
  const BulkMaterial particle = c.materials.matrix.scaled(c.materials.alpha);
  const double L = c.evolution.characteristic_length
                       ? *c.evolution.characteristic_length
                       : characteristic_length(particle, c.materials.eigenstrain, r0, c.materials.interface.gamma0);
  Mesh mesh(c.mesh.min / r0, c.mesh.max / r0, c.mesh.nx, c.mesh.ny);
  std::vector<Circle> circles;
  for (const auto& p : c.particles) circles.push_back(Circle{p.center / r0, p.radius / r0});
  LevelSetField field = init_signed_distance_circles(mesh, circles);
  EvolutionOptions opt = c.evolution.options;
  opt.smoothing = c.smoothing;
  opt.solver = c.solver;
  opt.threads = c.threads;
  EvolutionProblem problem{std::move(mesh), shape_materials(c.materials.matrix, c.materials.alpha, L), opt};
  return ShapeSetup{std::move(problem), std::move(field), r0, L};
}

RunResult run(RunMode mode, const RunConfig& config, const std::string& out_dir, std::ostream* log) {
  RunConfig c = config;
  c.mode = mode;
  c.validate();
  RunContext ctx(mode, c, out_dir, log);
  switch (mode) {
    case RunMode::Solve: run_solve(ctx, c); break;
    case RunMode::Verify: run_verify(ctx, c); break;
    case RunMode::Converge: run_converge(ctx, c); break;
    case RunMode::Timing: run_timing(ctx, c); break;
    case RunMode::Evolve: run_evolve(ctx, c); break;
  }
  return ctx.finish();
}

}  // namespace smx
