#pragma once

#include "smxfem/system.hpp"

#include <string>
#include <vector>

namespace smx {

/// Circular inclusion of radius R in an infinite isotropic plane-strain
/// matrix, both phases sharing (lambda, mu); dilatational eigenstrain in the
/// inclusion and an interface with residual stress tau and stiffness LS.
struct InclusionParams {
  double radius = 5.0;
  double lambda = 58.17;
  double mu = 26.13;
  double eigenstrain = 0.01;
  double tau = -1.0;
  double stiffness = 10.0;
  Vec2 center = Vec2::Zero();
};

/// u_r = a r inside, b / r outside.
struct CircularInclusionOracle {
  InclusionParams p;
  double a = 0.0;
  double b = 0.0;

  double radial_displacement(double r) const { return r <= p.radius ? a * r : b / r; }
  /// (e_rr, e_tt) total strains.
  std::array<double, 2> radial_strains(double r) const;
  /// (s_rr, s_tt) stresses.
  std::array<double, 2> radial_stresses(double r) const;
  Vec2 displacement(const Vec2& x) const;
  Voigt3 strain(const Vec2& x) const;
  Eigen::Matrix2d gradient(const Vec2& x) const;
  Phase phase(const Vec2& x) const { return (x - p.center).norm() < p.radius ? Phase::Particle : Phase::Matrix; }
  /// Residuals of displacement continuity and of the interface traction jump.
  std::array<double, 2> residuals() const;
  MaterialSet materials() const;
};

/// Solves the 2x2 system of displacement continuity and the traction jump
/// s_rr(matrix) - s_rr(inclusion) = (tau + LS u_r(R)/R) / R.
CircularInclusionOracle oracle_solve(const InclusionParams& p);

/// Independent cross-check: linear finite elements for the axisymmetric
/// radial problem on [0, r_out] with a node at R, the interface energy
/// lumped at that node and the exact exterior energy of the decaying
/// solution beyond r_out. Returns nodal (r, u_r) pairs.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
  double at(double radius) const;
};
RadialProfile radial_fd_oracle(const InclusionParams& p, int elements_per_radius = 20000, double outer_factor = 4.0);

struct ErrorNorms {
  double displacement = 0.0;
  double energy = 0.0;
};

/// Relative L2 displacement error and energy-norm error, integrated with the
/// midpoints of a k x k subdivision of every element; elements crossed by
/// the exact interface use `interface_subdivisions` instead.
ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u, const CircularInclusionOracle& oracle,
                       int subdivisions = 4, int interface_subdivisions = 32);

/// Solves the inclusion problem with exact boundary displacements.
ProblemSolution solve_inclusion(const InclusionParams& p, double half_width, int n, const SmoothingOptions& smoothing,
                                SolverKind solver = SolverKind::Direct, int threads = 1);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  ErrorNorms errors;
  int dofs = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double displacement_rate = 0.0;
  double energy_rate = 0.0;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceTable convergence_study(const InclusionParams& p, double half_width, const std::vector<int>& sizes,
                                   const SmoothingOptions& smoothing, SolverKind solver = SolverKind::Direct,
                                   int threads = 1);

struct TimingRow {
  int n = 0;
  std::size_t elements = 0;
  double seconds = 0.0;
};

struct TimingTable {
  std::vector<TimingRow> rows;
  double slope = 0.0;
};

/// Global matrix formation time (discretization plus assembly), minimum over
/// `repeats` runs per size.
TimingTable timing_study(const InclusionParams& p, double half_width, const std::vector<int>& sizes,
                         const SmoothingOptions& smoothing, int repeats = 3, int threads = 1);

struct ProfileSample {
  double r = 0.0;
  double u_h = 0.0, u_exact = 0.0;
  double err_h = 0.0, err_exact = 0.0;  // radial strain
};

/// Radial displacement and strain along the ray from the inclusion centre at
/// angle theta. The strain uses a same-phase least-squares linear fit of the
/// nearby cell strains.
std::vector<ProfileSample> radial_profile(const Discretization& disc, const Eigen::VectorXd& u,
                                          const CircularInclusionOracle& oracle, double theta, int samples,
                                          double r_max);

struct ProfileErrors {
  double displacement_outside = 0.0, displacement_band = 0.0;
  double strain_outside = 0.0, strain_band = 0.0;
};

/// Largest profile errors relative to the largest exact magnitude along the
/// profile, split into samples farther than `band` from the interface and
/// the rest.
ProfileErrors profile_errors(const std::vector<ProfileSample>& samples, double radius, double band);

}  // namespace smx
