#include "smxfem/evolution.hpp"

#include "smxfem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace smx {

MaterialSet shape_materials(const BulkMaterial& matrix, double alpha, double characteristic_length) {
  if (!(characteristic_length > 0.0)) fail(ErrorKind::InvalidArgument, "shape problem: L must be positive");
  const BulkMaterial particle = matrix.scaled(alpha);
  const double c44 = particle.C(2, 2);
  if (!(c44 > 0.0)) fail(ErrorKind::InvalidArgument, "shape problem: C44 must be positive");
  MaterialSet m;
  m.matrix.C = matrix.C / c44;
  m.particle.C = particle.C / c44;
  m.eigenstrain = dilatational(1.0);
  m.interface.gamma0 = 1.0 / characteristic_length;
  m.validate();
  return m;
}

double characteristic_length(const BulkMaterial& particle, double eigenstrain, double r0, double gamma) {
  if (!(gamma > 0.0) || !(r0 > 0.0)) fail(ErrorKind::InvalidArgument, "characteristic length: gamma and R0 must be positive");
  return particle.C(2, 2) * eigenstrain * eigenstrain * r0 / gamma;
}

double lagrange_multiplier(std::span<const InterfaceSample> samples) {
  double flux = 0.0, length = 0.0;
  for (const auto& s : samples) {
    const double l = (s.b - s.a).norm();
    flux += 0.5 * l * (s.va + s.vb);
    length += l;
  }
  if (!(length > 0.0)) fail(ErrorKind::Geometry, "lagrange_multiplier: interface has zero length");
  return -flux / length;
}

InterfaceSpeeds interface_speeds(const Discretization& disc, const Eigen::VectorXd& u, const MaterialSet& mat,
                                 const LevelSetField& field, const EvolutionOptions& options) {
  const double gamma = mat.interface.gamma0;
  const NodalGeometry geom = nodal_geometry(field);
  const bool recovered = options.side_gradient == SideGradient::Recovered;
  const CellGradients grads = recovered ? all_cell_gradients(disc, u, options.threads) : CellGradients{};
  const double radius = options.recovery_radius * disc.mesh.h();

  std::vector<std::vector<InterfaceSample>> per_element(disc.cut_elements.size());
  parallel_for(disc.cut_elements.size(), options.threads, [&](std::size_t k) {
    const int e = disc.cut_elements[k];
    const ElementData& ed = disc.elements[e];
    for (const auto& seg : ed.segments) {
      if (seg.particle_cells.empty() || seg.matrix_cells.empty())
        fail(ErrorKind::Geometry, "interface_speeds: segment without cells on both sides");
      InterfaceSample s{seg.p0, seg.p1, 0.0, 0.0};
      if (recovered) {
        auto jump_at = [&](const Vec2& p) {
          return eshelby_jump(recovered_gradient(disc, grads, p, Phase::Particle, radius),
                              recovered_gradient(disc, grads, p, Phase::Matrix, radius), mat, seg.normal);
        };
        s.va = jump_at(seg.p0);
        s.vb = jump_at(seg.p1);
      } else {
        const double jump = eshelby_jump(side_gradient(disc, u, e, seg.particle_cells),
                                         side_gradient(disc, u, e, seg.matrix_cells), mat, seg.normal);
        s.va = s.vb = jump;
      }
      s.va = configurational_speed(s.va, gamma, normal_and_curvature(field, geom, seg.p0).curvature, 0.0);
      s.vb = configurational_speed(s.vb, gamma, normal_and_curvature(field, geom, seg.p1).curvature, 0.0);
      per_element[k].push_back(s);
    }
  });

  InterfaceSpeeds out;
  for (auto& v : per_element) out.samples.insert(out.samples.end(), v.begin(), v.end());
  out.lambda = lagrange_multiplier(out.samples);
  for (auto& s : out.samples) {
    s.va += out.lambda;
    s.vb += out.lambda;
    out.length += (s.b - s.a).norm();
    out.max_speed = std::max({out.max_speed, std::abs(s.va), std::abs(s.vb)});
  }
  return out;
}

namespace {

ProblemSolution solve_shape(const EvolutionProblem& problem, const LevelSetField& field) {
  ProblemSpec spec{problem.mesh, field, problem.materials, problem.options.smoothing, {}, {},
                   problem.options.solver, problem.options.threads};
  return solve_problem(spec);
}

}  // namespace

EvolutionState initial_state(const EvolutionProblem& problem, const LevelSetField& field) {
  problem.materials.validate();
  if (!(problem.gamma() > 0.0)) fail(ErrorKind::InvalidArgument, "evolution: interface energy must be positive");
  const double area = particle_area(field);
  if (!(area > 0.0)) fail(ErrorKind::Geometry, "evolution: no particle in the initial level set");
  ProblemSolution sol = solve_shape(problem, field);
  const double pi = sol.energy.total;
  return EvolutionState{.field = field, .solution = std::move(sol), .area0 = area, .area = area, .energy_history = {pi}, .speed_history = {}};
}

EvolutionState evolve_step(const EvolutionState& state, const EvolutionProblem& problem) {
  const EvolutionOptions& opt = problem.options;
  const Lattice& lat = state.field.lattice;
  const InterfaceSpeeds speeds =
      interface_speeds(state.solution.disc, state.solution.u, problem.materials, state.field, opt);
  const VelocityField vel = extend_velocity(state.field, speeds.samples, opt.band_width);
  double vmax = 0.0;
  for (double v : vel.v) vmax = std::max(vmax, std::abs(v));

  double dt = opt.curvature_dt_factor * lat.h_min() * lat.h_min() / problem.gamma();
  if (vmax > 0.0) dt = std::min(dt, opt.cfl * lat.h_min() / vmax);
  if (std::isfinite(opt.max_time)) dt = std::min(dt, std::max(opt.max_time - state.time, 0.0));

  const double pi0 = state.energy_history.front();
  const double pi_old = state.energy_history.back();
  const bool reinit = opt.reinit_period > 0 && (state.step + 1) % opt.reinit_period == 0;
  for (int attempt = 0; attempt <= opt.max_halvings; ++attempt, dt *= 0.5) {
    LevelSetField next = advect(state.field, vel, dt, opt.cfl);
    if (reinit) next = reinitialize(next, opt.band_width);
    next = conserve_area(next, state.area0);
    const double area = particle_area(next);
    if (std::abs(area - state.area0) > opt.max_area_drift * state.area0)
      fail(ErrorKind::Runtime, "evolve_step: area drift beyond tolerance after correction");
    ProblemSolution sol = solve_shape(problem, next);
    if (sol.energy.total > pi_old + opt.energy_increase_tol * std::abs(pi0)) continue;

    EvolutionState out{.step = state.step + 1,
                       .time = state.time + dt,
                       .field = std::move(next),
                       .solution = std::move(sol),
                       .area0 = state.area0,
                       .area = area,
                       .dt = dt,
                       .rejections = state.rejections + attempt,
                       .energy_history = state.energy_history,
                       .speed_history = {}};
    out.energy_history.push_back(out.solution.energy.total);
    out.speed_history = state.speed_history;
    out.speed_history.push_back(speeds.max_speed);
    return out;
  }
  fail(ErrorKind::Runtime, "evolve_step: energy increased at step " + std::to_string(state.step + 1) +
                               " after " + std::to_string(opt.max_halvings) + " halvings (dt " +
                               std::to_string(dt) + ", Pi " + std::to_string(pi_old) + ")");
}

bool detect_equilibrium(const EvolutionState& state, double tol_v, double gamma, double energy_tol, int window) {
  if (state.speed_history.size() < 2 || state.energy_history.size() < 2) return false;
  if (state.speed_history.back() > tol_v * gamma) return false;
  const std::size_t n = state.energy_history.size();
  const std::size_t first = n > static_cast<std::size_t>(window) ? n - 1 - window : 0;
  const double pi = state.energy_history.back();
  return std::abs(pi - state.energy_history[first]) <= energy_tol * std::abs(pi);
}

namespace {

// Largest positive ray parameter at which c + t d crosses the polygon.
double ray_hit(const std::vector<Vec2>& poly, const Vec2& c, const Vec2& d) {
  double best = -1.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const Vec2 e = b - a;
    const double den = cross2(d, e);
    if (den == 0.0) continue;
    const Vec2 w = a - c;
    const double t = cross2(w, e) / den;
    const double s = cross2(w, d) / den;
    if (s >= -1e-12 && s <= 1.0 + 1e-12 && t > 0.0) best = std::max(best, t);
  }
  return best;
}

}  // namespace

ShapeMetrics polyline_metrics(const Polyline& contour, int samples, int modes) {
  if (!contour.closed) fail(ErrorKind::Geometry, "shape_metrics: contour is open (particle touches the boundary)");
  if (contour.points.size() < 3) fail(ErrorKind::Geometry, "shape_metrics: degenerate contour");
  if (samples < 16 || samples % 4 != 0) fail(ErrorKind::InvalidArgument, "shape_metrics: samples must be a multiple of 4");
  const auto& P = contour.points;
  ShapeMetrics m;
  m.contours = 1;
  m.area = std::abs(signed_area(P));
  for (std::size_t i = 0; i < P.size(); ++i) m.perimeter += (P[(i + 1) % P.size()] - P[i]).norm();
  m.centroid = polygon_centroid(P);

  using cd = std::complex<double>;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> r(samples);
  for (int j = 0; j < samples; ++j) {
    const double th = two_pi * j / samples;
    r[j] = ray_hit(P, m.centroid, Vec2(std::cos(th), std::sin(th)));
    if (!(r[j] > 0.0)) fail(ErrorKind::Geometry, "shape_metrics: ray from the centroid misses the contour");
  }
  const int kmax = std::min(samples / 2 - 1, 3 * modes);
  std::vector<cd> c(kmax + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    for (int j = 0; j < samples; ++j) c[k] += r[j] * std::polar(1.0, -two_pi * k * j / samples);
    c[k] /= static_cast<double>(samples);
  }
  m.a2 = std::abs(c[2]) / c[0].real();
  m.a4 = kmax >= 4 ? std::abs(c[4]) / c[0].real() : 0.0;

  for (int j = 0; j < samples / 4 * 3; ++j)
    m.d4_asymmetry = std::max(m.d4_asymmetry, std::abs(r[j] - r[j + samples / 4]));
  m.d4_asymmetry /= c[0].real();

  m.kappa_min = std::numeric_limits<double>::infinity();
  m.kappa_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double th = two_pi * j / samples;
    double f = c[0].real(), f1 = 0.0, f2 = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      const double w = 2.0 * std::exp(-static_cast<double>(k * k) / (modes * modes));
      const cd z = w * c[k] * std::polar(1.0, k * th);
      f += z.real();
      f1 += (cd(0.0, k) * z).real();
      f2 -= k * k * z.real();
    }
    const double kappa = (f * f + 2.0 * f1 * f1 - f * f2) / std::pow(f * f + f1 * f1, 1.5);
    m.kappa_min = std::min(m.kappa_min, kappa);
    m.kappa_max = std::max(m.kappa_max, kappa);
  }
  return m;
}

ShapeMetrics shape_metrics(const LevelSetField& field, int samples, int modes) {
  const auto lines = zero_contour_polylines(field);
  if (lines.empty()) fail(ErrorKind::Geometry, "shape_metrics: no zero contour");
  std::size_t best = 0;
  double best_area = -1.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].closed) fail(ErrorKind::Geometry, "shape_metrics: contour is open (particle touches the boundary)");
    const double a = std::abs(signed_area(lines[i].points));
    if (a > best_area) {
      best_area = a;
      best = i;
    }
  }
  ShapeMetrics m = polyline_metrics(lines[best], samples, modes);
  m.contours = static_cast<int>(lines.size());
  return m;
}

EvolutionSummary run_evolution(const EvolutionProblem& problem, const LevelSetField& initial,
                               const StepCallback& on_step) {
  const EvolutionOptions& opt = problem.options;
  EvolutionSummary out{.state = initial_state(problem, initial), .metrics = {}};
  out.metrics = shape_metrics(out.state.field);
  out.max_d4_asymmetry = out.metrics.d4_asymmetry;
  if (on_step) on_step(out.state, out.metrics);
  while (out.state.step < opt.max_steps && out.state.time < opt.max_time) {
    out.state = evolve_step(out.state, problem);
    out.metrics = shape_metrics(out.state.field);
    out.max_area_drift = std::max(out.max_area_drift, std::abs(out.state.area - out.state.area0) / out.state.area0);
    out.max_d4_asymmetry = std::max(out.max_d4_asymmetry, out.metrics.d4_asymmetry);
    if (on_step) on_step(out.state, out.metrics);
    if (detect_equilibrium(out.state, opt.tol_v, problem.gamma(), opt.energy_tol, opt.window)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace smx
