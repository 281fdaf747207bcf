#include "smxfem/physics.hpp"

#include <cmath>
#include <sstream>

namespace smx {

BulkMaterial BulkMaterial::cubic(double c11, double c12, double c44) {
  BulkMaterial m;
  m.C << c11, c12, 0.0, c12, c11, 0.0, 0.0, 0.0, c44;
  return m;
}

BulkMaterial BulkMaterial::isotropic(double lambda, double mu) { return cubic(lambda + 2.0 * mu, lambda, mu); }

BulkMaterial BulkMaterial::scaled(double alpha) const {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "material: stiffness ratio must be positive");
  return {alpha * C};
}

void BulkMaterial::validate(const char* what) const {
  if (!C.allFinite() || (C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * C.cwiseAbs().maxCoeff()) {
    fail(ErrorKind::InvalidArgument, std::string(what) + ": stiffness must be finite and symmetric");
  }
  Eigen::LLT<Stiffness> llt(C);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::InvalidArgument, std::string(what) + ": stiffness is not positive definite");
}

void MaterialSet::validate() const {
  matrix.validate("matrix material");
  particle.validate("particle material");
  if (!eigenstrain.allFinite()) fail(ErrorKind::InvalidArgument, "material: eigenstrain must be finite");
  if (!std::isfinite(interface.gamma0) || !std::isfinite(interface.tau) || !std::isfinite(interface.stiffness))
    fail(ErrorKind::InvalidArgument, "material: interface constants must be finite");
  if (interface.stiffness < 0.0) fail(ErrorKind::InvalidArgument, "material: interface stiffness must be >= 0");
}

InterfaceSegment make_segment(const Vec2& p0, const Vec2& p1, const Vec2& particle_point, int element) {
  InterfaceSegment s;
  s.p0 = p0;
  s.p1 = p1;
  s.element = element;
  s.midpoint = 0.5 * (p0 + p1);
  s.length = (p1 - p0).norm();
  if (!(s.length > 0.0)) fail(ErrorKind::Geometry, "interface segment has zero length");
  Vec2 t = (p1 - p0) / s.length;
  Vec2 n(t.y(), -t.x());
  if ((particle_point - s.midpoint).dot(n) > 0.0) {
    std::swap(s.p0, s.p1);
    t = -t;
    n = -n;
  }
  s.tangent = t;
  s.normal = n;
  s.points = gauss_on_segment(s.p0, s.p1, 2);
  return s;
}

std::vector<InterfaceSegment> extract_interface_segments(const Mesh& mesh, const LevelSetField& field) {
  std::vector<InterfaceSegment> out;
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    const auto& conn = mesh.element(e);
    const Nodal4 phi{field.phi[conn[0]], field.phi[conn[1]], field.phi[conn[2]], field.phi[conn[3]]};
    if (!is_cut(phi)) continue;
    const Quad q = mesh.element_vertices(e);
    const WachspressBasis basis(q);
    const Vec2 center = 0.25 * (q[0] + q[1] + q[2] + q[3]);
    const SignSplit split = split_by_sign(q, phi, interpolate(basis.eval(center), phi));
    for (std::size_t c = 0; c < split.chords.size(); ++c) {
      const auto& ch = split.chords[c];
      if (ch[0] == ch[1]) continue;
      const Vec2 inside = polygon_centroid(split.negative[split.chord_pieces[c][0]]);
      out.push_back(make_segment(ch[0], ch[1], inside, e));
    }
  }
  if (out.empty()) fail(ErrorKind::Geometry, "extract_interface_segments: no cut elements");
  return out;
}

std::vector<InterfaceSegment> partition_segments(const ElementPartition& partition, int element) {
  std::vector<InterfaceSegment> out;
  for (const auto& ch : partition.chords) {
    Vec2 inside = Vec2::Zero();
    double area = 0.0;
    for (int c : ch.particle_cells) {
      const auto& cell = partition.cells[c];
      inside += cell.area * polygon_centroid(cell.polygon);
      area += cell.area;
    }
    InterfaceSegment s = make_segment(ch.p0, ch.p1, inside / area, element);
    s.particle_cells = ch.particle_cells;
    s.matrix_cells = ch.matrix_cells;
    out.push_back(std::move(s));
  }
  return out;
}

GradientOperator mean_gradient(const ElementPartition& partition, const std::vector<int>& cells,
                               const WachspressBasis& basis, const Nodal4& nodal_phi) {
  if (cells.empty()) fail(ErrorKind::InvalidArgument, "mean_gradient: empty cell set");
  GradientOperator G;
  double area = 0.0;
  for (int c : cells) {
    const auto& cell = partition.cells[c];
    const GradientOperator Gc = smoothed_gradient(cell, basis, nodal_phi);
    if (G.size() == 0) G = GradientOperator::Zero(4, Gc.cols());
    G += cell.area * Gc;
    area += cell.area;
  }
  return G / area;
}

BMatrix mean_B(const ElementPartition& partition, const std::vector<int>& cells, const WachspressBasis& basis,
               const Nodal4& nodal_phi) {
  return strain_rows(mean_gradient(partition, cells, basis, nodal_phi));
}

double tangential_strain(const Vec2& t, const Voigt3& eps) {
  return t.x() * t.x() * eps[0] + t.y() * t.y() * eps[1] + t.x() * t.y() * eps[2];
}

RowOperator interface_strain_operator(const InterfaceSegment& seg, const WachspressBasis& basis,
                                      const Nodal4& nodal_phi) {
  const bool cut = is_cut(nodal_phi);
  RowOperator op = RowOperator::Zero(cut ? 16 : 8);
  const Nodal4 N0 = basis.eval(seg.p0), N1 = basis.eval(seg.p1);
  const double F0 = cut ? eval_enrichment(N0, nodal_phi) : 0.0;
  const double F1 = cut ? eval_enrichment(N1, nodal_phi) : 0.0;
  const Vec2 g = seg.tangent / seg.length;
  for (int I = 0; I < 4; ++I) {
    const double dN = N1[I] - N0[I];
    op[2 * I] = g.x() * dN;
    op[2 * I + 1] = g.y() * dN;
    if (!cut) continue;
    const double dF = F1 * N1[I] - F0 * N0[I];
    op[8 + 2 * I] = g.x() * dF;
    op[8 + 2 * I + 1] = g.y() * dF;
  }
  return op;
}

InterfaceBlock interface_stiffness_and_residual(const InterfaceSegment& seg, const RowOperator& op,
                                                const InterfaceMaterial& mat) {
  double len = 0.0;
  for (const auto& qp : seg.points) len += qp.w;  // operator is constant along the segment
  InterfaceBlock b;
  b.K = (mat.stiffness * len) * (op.transpose() * op);
  b.f = (-mat.tau * len) * op.transpose();
  return b;
}

Eigen::VectorXd eigenstrain_load(const SmoothingCell& cell, const BMatrix& B, const MaterialSet& mat) {
  if (cell.phase != Phase::Particle) return Eigen::VectorXd::Zero(B.cols());
  return cell.area * B.transpose() * (mat.particle.C * mat.eigenstrain);
}

double bulk_energy_density(const Stiffness& C, const Voigt3& strain, const Voigt3& eigenstrain) {
  const Voigt3 e = strain - eigenstrain;
  return 0.5 * e.dot(C * e);
}

double interface_energy_density(const InterfaceMaterial& mat, double eS) {
  return mat.gamma0 + mat.tau * eS + 0.5 * mat.stiffness * eS * eS;
}

Voigt3 strain_of(const Eigen::Matrix2d& H) { return Voigt3(H(0, 0), H(1, 1), H(0, 1) + H(1, 0)); }

double eshelby_normal(const Eigen::Matrix2d& H, const Stiffness& C, const Voigt3& eigenstrain, const Vec2& n) {
  const Voigt3 e = strain_of(H) - eigenstrain;
  const Voigt3 s = C * e;
  const double w = 0.5 * e.dot(s);
  Eigen::Matrix2d sigma;
  sigma << s[0], s[2], s[2], s[1];
  return w - (sigma * n).dot(H * n);
}

double eshelby_jump(const Eigen::Matrix2d& H_particle, const Eigen::Matrix2d& H_matrix, const MaterialSet& mat,
                    const Vec2& n) {
  return eshelby_normal(H_matrix, mat.matrix.C, Voigt3::Zero(), n) -
         eshelby_normal(H_particle, mat.particle.C, mat.eigenstrain, n);
}

}  // namespace smx
