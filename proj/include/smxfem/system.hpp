#pragma once

#include "smxfem/physics.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <vector>

namespace smx {

struct SmoothingOptions {
  int standard_m = 2, standard_n = 2;
  int enriched_m = 4, enriched_n = 4;
};

/// Standard dofs 2n, 2n+1 for every node n, followed by two enriched dofs per
/// enriched node.
struct DofMap {
  int num_nodes = 0;
  std::vector<int> enriched_slot;  // -1 when the node is not enriched
  int num_enriched_nodes = 0;

  int num_dofs() const { return 2 * (num_nodes + num_enriched_nodes); }
  bool enriched(int node) const { return enriched_slot[node] >= 0; }
  int standard(int node, int comp) const { return 2 * node + comp; }
  int enrichment(int node, int comp) const { return 2 * (num_nodes + enriched_slot[node]) + comp; }
};

/// Nodal phi with values closer than 1e-4 h to zero moved to +1e-4 h, which
/// keeps the enriched stiffness of a barely cut node away from zero.
std::vector<double> snapped_phi(const LevelSetField& field, double h);

/// A node is enriched iff it belongs to an element with nodal phi of both signs.
DofMap enumerate_dofs(const Mesh& mesh, const std::vector<double>& phi);

/// Everything the assembly needs from one element.
struct ElementData {
  WachspressBasis basis;
  Nodal4 phi;
  ElementPartition partition;
  std::vector<int> dofs;  // 8 standard, plus 8 enriched for cut elements
  std::vector<GradientOperator> gradients;  // one per cell
  std::vector<InterfaceSegment> segments;
  std::vector<RowOperator> segment_ops;
};

struct Discretization {
  Mesh mesh;
  std::vector<double> phi;  // snapped nodal values
  DofMap dofs;
  SmoothingOptions smoothing;
  std::vector<ElementData> elements;
  std::vector<int> cut_elements;

  /// Index of the cell of `element` containing p (closest cell if p sits on
  /// a shared edge within round-off).
  int locate_cell(int element, const Vec2& p) const;
};

Discretization discretize(const Mesh& mesh, const LevelSetField& field, const SmoothingOptions& smoothing,
                          int threads = 1);

/// Constant body force per unit area and constant traction on the outer boundary.
struct Loads {
  Vec2 body_force = Vec2::Zero();
  Vec2 traction = Vec2::Zero();
  bool any() const { return body_force.squaredNorm() > 0.0 || traction.squaredNorm() > 0.0; }
};

struct LinearSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd f;
};

/// K = sum_cells A B^T C B + sum_segments interface blocks; f = eigenstrain
/// and interface pre-stress loads plus external loads. Element blocks are
/// computed concurrently and inserted in element order, so the result does
/// not depend on the thread count.
LinearSystem assemble(const Discretization& disc, const MaterialSet& mat, const Loads& loads = {}, int threads = 1);

/// Prescribed values for a set of dofs.
struct Constraints {
  std::vector<int> dofs;
  std::vector<double> values;
};

using DisplacementFn = std::function<Vec2(const Vec2&)>;

/// Standard dofs of every outer-boundary node set to g(x); enriched dofs stay free.
Constraints boundary_constraints(const Discretization& disc, const DisplacementFn& g);

/// System restricted to the free dofs by symmetric elimination.
struct ReducedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd rhs;
  std::vector<int> free_dofs;
  Eigen::VectorXd prescribed;  // full-length vector holding the constrained values
};

ReducedSystem apply_dirichlet(const LinearSystem& sys, const Constraints& bc);

enum class SolverKind { Direct, ConjugateGradient };

struct SolveReport {
  Eigen::VectorXd u;  // full dof vector
  double relative_residual = 0.0;
};

/// Throws Error(Singular) when the factorization fails or a pivot is not
/// positive, and Error(Runtime) when the residual exceeds 1e-10.
SolveReport solve(const ReducedSystem& sys, SolverKind kind = SolverKind::Direct);

/// Matrix Market coordinate dump.
void write_matrix_market(const Eigen::SparseMatrix<double>& K, const std::string& path);

/// Displacement at p (any point of the domain).
Vec2 displacement_at(const Discretization& disc, const Eigen::VectorXd& u, const Vec2& p);

/// Smoothed displacement gradient H_ij = du_i/dx_j of one cell.
Eigen::Matrix2d cell_gradient(const Discretization& disc, const Eigen::VectorXd& u, int element, int cell);
Voigt3 cell_strain(const Discretization& disc, const Eigen::VectorXd& u, int element, int cell);

/// Mean gradient of a set of cells of one element.
Eigen::Matrix2d side_gradient(const Discretization& disc, const Eigen::VectorXd& u, int element,
                              const std::vector<int>& cells);

/// Smoothed gradients of every cell, indexed [element][cell].
using CellGradients = std::vector<std::vector<Eigen::Matrix2d>>;
CellGradients all_cell_gradients(const Discretization& disc, const Eigen::VectorXd& u, int threads = 1);

/// Gradient at p recovered from the cells of one phase whose centroids lie
/// within `radius` of p: area-weighted least-squares linear fit, evaluated
/// at p. Falls back to the area mean when the fit is ill-posed.
Eigen::Matrix2d recovered_gradient(const Discretization& disc, const CellGradients& grads, const Vec2& p, Phase phase,
                                   double radius);

/// Interface strain of one segment.
double segment_strain(const Discretization& disc, const Eigen::VectorXd& u, int element, int segment);

struct EnergyBreakdown {
  double bulk = 0.0;
  double interface = 0.0;
  double external = 0.0;  // minus the work of applied loads
  double total = 0.0;
};

EnergyBreakdown total_energy(const Discretization& disc, const MaterialSet& mat, const Eigen::VectorXd& u,
                             const Loads& loads = {});

/// Particle area and interface length as seen by the discretization.
double discrete_particle_area(const Discretization& disc);
double discrete_interface_length(const Discretization& disc);

struct ProblemSpec {
  Mesh mesh;
  LevelSetField field;
  MaterialSet materials;
  SmoothingOptions smoothing;
  Loads loads;
  /// Boundary displacement; zero when empty.
  DisplacementFn boundary;
  SolverKind solver = SolverKind::Direct;
  int threads = 1;
};

struct ProblemSolution {
  Discretization disc;
  Eigen::VectorXd u;
  EnergyBreakdown energy;
  double relative_residual = 0.0;
  double formation_seconds = 0.0;  // discretization and global matrix formation
};

ProblemSolution solve_problem(const ProblemSpec& spec);

}  // namespace smx
