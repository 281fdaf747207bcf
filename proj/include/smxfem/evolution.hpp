#pragma once

#include "smxfem/system.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace smx {

/// How the displacement gradient on each side of an interface segment is
/// obtained for the Eshelby jump.
enum class SideGradient {
  Cells,      // mean smoothed gradient of the bordering cells, constant per segment
  Recovered,  // same-phase least-squares fit of nearby cells, evaluated at the segment endpoints
};

struct EvolutionOptions {
  double cfl = 0.5;
  /// Explicit curvature-flow limit dt <= factor * h^2 / gamma.
  double curvature_dt_factor = 0.25;
  int reinit_period = 5;
  int band_width = 8;
  int max_steps = 2000;
  double max_time = std::numeric_limits<double>::infinity();
  /// Equilibrium when max |v_n| <= tol_v * gamma / R0 and the energy has settled.
  /// Segment speeds keep a grid-scale noise floor of about gamma / R0 near
  /// high-curvature corners, so the energy test does the real work.
  double tol_v = 2.0;
  double energy_tol = 1e-5;
  int window = 5;
  /// A step is rejected when the energy rises by more than this times |Pi_0|.
  double energy_increase_tol = 1e-3;
  int max_halvings = 5;
  double max_area_drift = 0.01;
  SideGradient side_gradient = SideGradient::Recovered;
  double recovery_radius = 2.0;  // in units of h
  SmoothingOptions smoothing;
  SolverKind solver = SolverKind::Direct;
  int threads = 1;
};

/// Shape problem in dimensionless form: lengths in units of R0 and
/// stresses in units of C44 of the particle, eigenstrain 1, interface
/// energy 1 / L. Outer boundary clamped.
struct EvolutionProblem {
  Mesh mesh;
  MaterialSet materials;  // interface.gamma0 is the constant gamma
  EvolutionOptions options;

  double gamma() const { return materials.interface.gamma0; }
};

/// Dimensionless materials for a cubic matrix, particle constants alpha
/// times the matrix ones, and a dilatational misfit.
MaterialSet shape_materials(const BulkMaterial& matrix, double alpha, double characteristic_length);

/// L = C44 eps*^2 R0 / gamma with C44 taken from the particle.
double characteristic_length(const BulkMaterial& particle, double eigenstrain, double r0, double gamma);

/// lambda = -sum int (jump - gamma kappa) dS / sum length over speed samples
/// that do not yet include lambda.
double lagrange_multiplier(std::span<const InterfaceSample> samples);

struct InterfaceSpeeds {
  std::vector<InterfaceSample> samples;  // lambda included
  double lambda = 0.0;
  double length = 0.0;
  double max_speed = 0.0;
};

/// v_n = n.[[Sigma]].n - gamma kappa + lambda at the endpoints of every
/// interface segment of the discretization.
InterfaceSpeeds interface_speeds(const Discretization& disc, const Eigen::VectorXd& u, const MaterialSet& mat,
                                 const LevelSetField& field, const EvolutionOptions& options);

struct EvolutionState {
  int step = 0;
  double time = 0.0;
  LevelSetField field;
  ProblemSolution solution;
  double area0 = 0.0;
  double area = 0.0;
  double dt = 0.0;       // last accepted step
  int rejections = 0;    // total over the run
  std::vector<double> energy_history;
  std::vector<double> speed_history;  // max |v_n| driving each accepted step
};

/// Solves the elasticity problem on the initial level set.
EvolutionState initial_state(const EvolutionProblem& problem, const LevelSetField& field);

/// One accepted step: speeds from the current solution, extension, RK3
/// advection, periodic reinitialization, area correction, re-solve on the
/// new interface. The new solution is kept for the next step. Throws
/// Error(Runtime) when the energy still rises after the allowed halvings and
/// Error(Geometry) when the particle vanishes.
EvolutionState evolve_step(const EvolutionState& state, const EvolutionProblem& problem);

bool detect_equilibrium(const EvolutionState& state, double tol_v, double gamma, double energy_tol = 1e-5,
                        int window = 5);

struct ShapeMetrics {
  double area = 0.0;
  double perimeter = 0.0;
  Vec2 centroid = Vec2::Zero();
  double a2 = 0.0;
  double a4 = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  /// max |r(theta) - r(theta + pi/2)| / mean r.
  double d4_asymmetry = 0.0;
  int contours = 0;
};

/// Metrics of a closed polyline. r(theta) is sampled on `samples` rays about
/// the area centroid; curvature comes from the Fourier series of r(theta)
/// with a Gaussian taper of width `modes`, so grid-scale kinks of the
/// polyline do not show up as spurious concavity.
ShapeMetrics polyline_metrics(const Polyline& contour, int samples = 720, int modes = 16);

/// Metrics of the largest closed zero contour. Throws Error(Geometry) for an
/// open contour or when no contour exists.
ShapeMetrics shape_metrics(const LevelSetField& field, int samples = 720, int modes = 16);

struct EvolutionSummary {
  EvolutionState state;
  ShapeMetrics metrics;
  bool converged = false;
  double max_area_drift = 0.0;
  double max_d4_asymmetry = 0.0;
};

/// Runs to equilibrium or until the step/time budget is exhausted. The
/// callback sees every accepted state.
using StepCallback = std::function<void(const EvolutionState&, const ShapeMetrics&)>;
EvolutionSummary run_evolution(const EvolutionProblem& problem, const LevelSetField& initial,
                               const StepCallback& on_step = {});

}  // namespace smx
