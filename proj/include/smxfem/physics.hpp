#pragma once

#include "smxfem/levelset.hpp"
#include "smxfem/smoothing.hpp"

#include <vector>

namespace smx {

/// Plane-strain stiffness in Voigt form [e11, e22, g12].
struct BulkMaterial {
  Stiffness C = Stiffness::Identity();

  static BulkMaterial cubic(double c11, double c12, double c44);
  static BulkMaterial isotropic(double lambda, double mu);
  BulkMaterial scaled(double alpha) const;
  /// Throws Error(InvalidArgument) unless C is symmetric positive definite.
  void validate(const char* what) const;
};

/// Interface excess energy gamma = gamma0 + tau eS + 1/2 stiffness eS^2.
struct InterfaceMaterial {
  double gamma0 = 0.0;
  double tau = 0.0;
  double stiffness = 0.0;
};

struct MaterialSet {
  BulkMaterial matrix;
  BulkMaterial particle;
  Voigt3 eigenstrain = Voigt3::Zero();  // carried by the particle only
  InterfaceMaterial interface;

  const Stiffness& stiffness(Phase p) const { return p == Phase::Particle ? particle.C : matrix.C; }
  Voigt3 eigenstrain_of(Phase p) const { return p == Phase::Particle ? eigenstrain : Voigt3::Zero(); }
  void validate() const;
};

inline Voigt3 dilatational(double eps) { return Voigt3(eps, eps, 0.0); }

/// Straight piece of the interface inside one element. The normal points
/// from the particle into the matrix and tangent x normal = -1 (particle on
/// the left when walking along the tangent).
struct InterfaceSegment {
  Vec2 p0, p1;
  Vec2 midpoint;
  Vec2 tangent;
  Vec2 normal;
  double length = 0.0;
  int element = -1;
  std::vector<QuadPoint> points;  // 2-point Gauss
  /// Cells of the element partition bordering the segment on each side;
  /// empty for segments extracted from nodal values alone.
  std::vector<int> particle_cells;
  std::vector<int> matrix_cells;
};

/// Builds a segment from its endpoints and a point known to lie on the
/// particle side.
InterfaceSegment make_segment(const Vec2& p0, const Vec2& p1, const Vec2& particle_point, int element);

/// Element-level interface pieces: per cut element, the chord(s) joining the
/// crossings of the nodal level set on the element edges.
std::vector<InterfaceSegment> extract_interface_segments(const Mesh& mesh, const LevelSetField& field);

/// Subcell-level interface pieces carried by an element partition, with the
/// bordering cells recorded.
std::vector<InterfaceSegment> partition_segments(const ElementPartition& partition, int element);

/// Area-weighted mean strain operator over a set of cells.
BMatrix mean_B(const ElementPartition& partition, const std::vector<int>& cells, const WachspressBasis& basis,
               const Nodal4& nodal_phi);
GradientOperator mean_gradient(const ElementPartition& partition, const std::vector<int>& cells,
                               const WachspressBasis& basis, const Nodal4& nodal_phi);

using RowOperator = Eigen::RowVectorXd;

/// Tangential strain of the segment as a row acting on element dofs: the
/// mean of t.grad(u).t along the segment, t.(u(p1) - u(p0)) / length, which
/// needs shape function values at the endpoints only.
RowOperator interface_strain_operator(const InterfaceSegment& seg, const WachspressBasis& basis,
                                      const Nodal4& nodal_phi);

/// t.eps.t for a Voigt strain.
double tangential_strain(const Vec2& t, const Voigt3& eps);

struct InterfaceBlock {
  Eigen::MatrixXd K;
  Eigen::VectorXd f;
};

/// K = int L^S op^T op dS, f = -int tau op^T dS.
InterfaceBlock interface_stiffness_and_residual(const InterfaceSegment& seg, const RowOperator& op,
                                                const InterfaceMaterial& mat);

/// f = A B^T C eps* for a particle cell, zero for a matrix cell.
Eigen::VectorXd eigenstrain_load(const SmoothingCell& cell, const BMatrix& B, const MaterialSet& mat);

/// 1/2 (eps - eps*)^T C (eps - eps*).
double bulk_energy_density(const Stiffness& C, const Voigt3& strain, const Voigt3& eigenstrain);

/// gamma0 + tau eS + 1/2 L eS^2.
double interface_energy_density(const InterfaceMaterial& mat, double eS);

/// Voigt strain of a displacement gradient H_ij = du_i/dx_j.
Voigt3 strain_of(const Eigen::Matrix2d& H);

/// n.Sigma.n for Sigma = w I - H^T sigma, with w and sigma from the elastic
/// part of the strain.
double eshelby_normal(const Eigen::Matrix2d& H, const Stiffness& C, const Voigt3& eigenstrain, const Vec2& n);

/// n.[[Sigma]].n, matrix side minus particle side.
double eshelby_jump(const Eigen::Matrix2d& H_particle, const Eigen::Matrix2d& H_matrix, const MaterialSet& mat,
                    const Vec2& n);

/// v_n = n.[[Sigma]].n - gamma kappa + lambda.
inline double configurational_speed(double jump, double gamma, double kappa, double lambda) {
  return jump - gamma * kappa + lambda;
}

}  // namespace smx
