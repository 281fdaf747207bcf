#include "smxfem/system.hpp"

#include "smxfem/parallel.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace smx {

std::vector<double> snapped_phi(const LevelSetField& field, double h) {
  const double eps = 1e-4 * h;
  std::vector<double> out = field.phi;
  for (double& v : out)
    if (std::abs(v) < eps) v = eps;
  return out;
}

DofMap enumerate_dofs(const Mesh& mesh, const std::vector<double>& phi) {
  if (phi.size() != mesh.num_nodes()) fail(ErrorKind::InvalidArgument, "enumerate_dofs: phi size mismatch");
  DofMap map;
  map.num_nodes = static_cast<int>(mesh.num_nodes());
  map.enriched_slot.assign(mesh.num_nodes(), -1);
  std::vector<char> flag(mesh.num_nodes(), 0);
  for (const auto& conn : mesh.elements()) {
    const Nodal4 p{phi[conn[0]], phi[conn[1]], phi[conn[2]], phi[conn[3]]};
    if (!is_cut(p)) continue;
    for (int n : conn) flag[n] = 1;
  }
  for (int n = 0; n < map.num_nodes; ++n)
    if (flag[n]) map.enriched_slot[n] = map.num_enriched_nodes++;
  return map;
}

int Discretization::locate_cell(int element, const Vec2& p) const {
  const auto& cells = elements[element].partition.cells;
  const double tol = 1e-10 * mesh.h();
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    if (point_in_convex_polygon(cells[c].polygon, p, tol)) return c;
    const double d = (polygon_centroid(cells[c].polygon) - p).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Discretization discretize(const Mesh& mesh, const LevelSetField& field, const SmoothingOptions& smoothing,
                          int threads) {
  if (field.phi.size() != mesh.num_nodes()) fail(ErrorKind::InvalidArgument, "discretize: level set size mismatch");
  if (smoothing.standard_m < 1 || smoothing.standard_n < 1 || smoothing.enriched_m < 1 || smoothing.enriched_n < 1)
    fail(ErrorKind::InvalidArgument, "discretize: smoothing partitions must be at least 1x1");
  Discretization disc{mesh, snapped_phi(field, mesh.h()), {}, smoothing, {}, {}};
  disc.dofs = enumerate_dofs(mesh, disc.phi);

  const std::size_t ne = mesh.num_elements();
  std::vector<std::optional<ElementData>> built(ne);
  parallel_for(ne, threads, [&](std::size_t e) {
    const auto& conn = mesh.element(static_cast<int>(e));
    const Nodal4 phi{disc.phi[conn[0]], disc.phi[conn[1]], disc.phi[conn[2]], disc.phi[conn[3]]};
    WachspressBasis basis(mesh.element_vertices(static_cast<int>(e)));
    const bool cut = is_cut(phi);
    ElementPartition part = cut ? partition_element(basis, phi, smoothing.enriched_m, smoothing.enriched_n)
                                : partition_element(basis, phi, smoothing.standard_m, smoothing.standard_n);
    std::vector<int> dofs;
    dofs.reserve(cut ? 16 : 8);
    for (int n : conn) {
      dofs.push_back(disc.dofs.standard(n, 0));
      dofs.push_back(disc.dofs.standard(n, 1));
    }
    if (cut) {
      for (int n : conn) {
        dofs.push_back(disc.dofs.enrichment(n, 0));
        dofs.push_back(disc.dofs.enrichment(n, 1));
      }
    }
    std::vector<GradientOperator> grads;
    grads.reserve(part.cells.size());
    for (const auto& cell : part.cells) grads.push_back(smoothed_gradient(cell, basis, phi));
    std::vector<InterfaceSegment> segs = partition_segments(part, static_cast<int>(e));
    std::vector<RowOperator> ops;
    ops.reserve(segs.size());
    for (const auto& s : segs) ops.push_back(interface_strain_operator(s, basis, phi));
    built[e].emplace(ElementData{std::move(basis), phi, std::move(part), std::move(dofs), std::move(grads),
                                 std::move(segs), std::move(ops)});
  });
  disc.elements.reserve(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    if (built[e]->partition.cut) disc.cut_elements.push_back(static_cast<int>(e));
    disc.elements.push_back(std::move(*built[e]));
  }
  return disc;
}

namespace {

/// Values of [N | F N] at p, matching the element dof layout per component.
Eigen::VectorXd shape_row(const ElementData& ed, const Vec2& p) {
  const Nodal4 N = ed.basis.eval(p);
  const bool cut = ed.partition.cut;
  Eigen::VectorXd row = Eigen::VectorXd::Zero(cut ? 8 : 4);
  const double F = cut ? eval_enrichment(N, ed.phi) : 0.0;
  for (int I = 0; I < 4; ++I) {
    row[I] = N[I];
    if (cut) row[4 + I] = F * N[I];
  }
  return row;
}

/// Adds the consistent load of a constant vector `load` weighted by `w` at p.
void add_point_load(const ElementData& ed, const Vec2& p, double w, const Vec2& load, Eigen::VectorXd& fe) {
  const Eigen::VectorXd row = shape_row(ed, p);
  for (int k = 0; k < row.size(); ++k) {
    fe[2 * k] += w * row[k] * load.x();
    fe[2 * k + 1] += w * row[k] * load.y();
  }
}

void external_load(const Mesh& mesh, int e, const ElementData& ed, const Loads& loads, Eigen::VectorXd& fe) {
  if (loads.body_force.squaredNorm() > 0.0) {
    for (const auto& cell : ed.partition.cells) {
      // Linear-exact cell rule: mean of the vertex values.
      const double w = cell.area / static_cast<double>(cell.polygon.size());
      for (const auto& v : cell.polygon) add_point_load(ed, v, w, loads.body_force, fe);
    }
  }
  if (loads.traction.squaredNorm() > 0.0) {
    const Quad q = mesh.element_vertices(e);
    const Vec2 lo = mesh.domain_min(), hi = mesh.domain_max();
    const double tol = 1e-12 * mesh.h();
    for (int k = 0; k < 4; ++k) {
      const Vec2& a = q[k];
      const Vec2& b = q[(k + 1) % 4];
      const bool on_boundary = (std::abs(a.x() - lo.x()) < tol && std::abs(b.x() - lo.x()) < tol) ||
                               (std::abs(a.x() - hi.x()) < tol && std::abs(b.x() - hi.x()) < tol) ||
                               (std::abs(a.y() - lo.y()) < tol && std::abs(b.y() - lo.y()) < tol) ||
                               (std::abs(a.y() - hi.y()) < tol && std::abs(b.y() - hi.y()) < tol);
      if (!on_boundary) continue;
      for (const auto& qp : gauss_on_segment(a, b, 2)) add_point_load(ed, qp.x, qp.w, loads.traction, fe);
    }
  }
}

}  // namespace

LinearSystem assemble(const Discretization& disc, const MaterialSet& mat, const Loads& loads, int threads) {
  const std::size_t ne = disc.elements.size();
  std::vector<Eigen::MatrixXd> Ks(ne);
  std::vector<Eigen::VectorXd> fs(ne);
  parallel_for(ne, threads, [&](std::size_t e) {
    const ElementData& ed = disc.elements[e];
    const int nd = static_cast<int>(ed.dofs.size());
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(nd);
    for (std::size_t c = 0; c < ed.partition.cells.size(); ++c) {
      const SmoothingCell& cell = ed.partition.cells[c];
      const BMatrix B = strain_rows(ed.gradients[c]);
      const Stiffness& C = mat.stiffness(cell.phase);
      Ke.noalias() += cell.area * (B.transpose() * (C * B));
      if (cell.phase == Phase::Particle) fe += eigenstrain_load(cell, B, mat);
    }
    for (std::size_t s = 0; s < ed.segments.size(); ++s) {
      const InterfaceBlock blk = interface_stiffness_and_residual(ed.segments[s], ed.segment_ops[s], mat.interface);
      Ke += blk.K;
      fe += blk.f;
    }
    if (loads.any()) external_load(disc.mesh, static_cast<int>(e), ed, loads, fe);
    Ks[e] = 0.5 * (Ke + Ke.transpose());
    fs[e] = std::move(fe);
  });

  LinearSystem sys;
  const int n = disc.dofs.num_dofs();
  sys.f = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t count = 0;
  for (const auto& K : Ks) count += static_cast<std::size_t>(K.size());
  trip.reserve(count);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& dofs = disc.elements[e].dofs;
    const auto& K = Ks[e];
    for (int a = 0; a < static_cast<int>(dofs.size()); ++a) {
      sys.f[dofs[a]] += fs[e][a];
      for (int b = 0; b < static_cast<int>(dofs.size()); ++b) trip.emplace_back(dofs[a], dofs[b], K(a, b));
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

Constraints boundary_constraints(const Discretization& disc, const DisplacementFn& g) {
  Constraints bc;
  for (int node : disc.mesh.boundary_nodes()) {
    const Vec2 v = g ? g(disc.mesh.node(node)) : Vec2::Zero();
    if (!v.allFinite()) fail(ErrorKind::InvalidArgument, "boundary displacement is not finite");
    for (int c = 0; c < 2; ++c) {
      bc.dofs.push_back(disc.dofs.standard(node, c));
      bc.values.push_back(v[c]);
    }
  }
  return bc;
}

ReducedSystem apply_dirichlet(const LinearSystem& sys, const Constraints& bc) {
  const int n = static_cast<int>(sys.K.rows());
  if (bc.dofs.size() != bc.values.size()) fail(ErrorKind::InvalidArgument, "apply_dirichlet: dof/value count mismatch");
  ReducedSystem out;
  out.prescribed = Eigen::VectorXd::Zero(n);
  std::vector<char> fixed(n, 0);
  for (std::size_t k = 0; k < bc.dofs.size(); ++k) {
    const int d = bc.dofs[k];
    if (d < 0 || d >= n) fail(ErrorKind::InvalidArgument, "apply_dirichlet: constrained dof does not exist");
    if (!std::isfinite(bc.values[k])) fail(ErrorKind::InvalidArgument, "apply_dirichlet: prescribed value not finite");
    fixed[d] = 1;
    out.prescribed[d] = bc.values[k];
  }
  std::vector<int> slot(n, -1);
  for (int d = 0; d < n; ++d) {
    if (fixed[d]) continue;
    slot[d] = static_cast<int>(out.free_dofs.size());
    out.free_dofs.push_back(d);
  }
  const int nf = static_cast<int>(out.free_dofs.size());
  out.rhs.resize(nf);
  for (int i = 0; i < nf; ++i) out.rhs[i] = sys.f[out.free_dofs[i]];
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.K.nonZeros());
  for (int col = 0; col < sys.K.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (slot[r] < 0) continue;
      if (slot[c] >= 0)
        trip.emplace_back(slot[r], slot[c], it.value());
      else
        out.rhs[slot[r]] -= it.value() * out.prescribed[c];
    }
  }
  out.K.resize(nf, nf);
  out.K.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SolveReport solve(const ReducedSystem& sys, SolverKind kind) {
  const Eigen::Index nf = sys.K.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
  const double fnorm = sys.rhs.norm();
  auto residual = [&](const Eigen::VectorXd& y) {
    const double r = (sys.K * y - sys.rhs).norm();
    return fnorm > 0.0 ? r / fnorm : r;
  };
  if (nf > 0 && fnorm > 0.0) {
    if (kind == SolverKind::Direct) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.K);
      if (ldlt.info() != Eigen::Success) fail(ErrorKind::Singular, "solve: sparse factorization failed");
      const Eigen::VectorXd D = ldlt.vectorD();
      const double dmax = D.cwiseAbs().maxCoeff(), dmin = D.minCoeff();
      if (!(dmin > 1e-14 * dmax)) {
        std::ostringstream msg;
        msg << "solve: stiffness is singular or indefinite (min pivot " << dmin << ", max pivot " << dmax
            << "; check boundary conditions)";
        fail(ErrorKind::Singular, msg.str());
      }
      x = ldlt.solve(sys.rhs);
      for (int it = 0; it < 3 && residual(x) > 1e-13; ++it) x += ldlt.solve(sys.rhs - sys.K * x);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::IncompleteCholesky<double>>
          cg;
      cg.setTolerance(1e-13);
      cg.setMaxIterations(static_cast<Eigen::Index>(20 * nf + 100));
      cg.compute(sys.K);
      if (cg.info() != Eigen::Success) fail(ErrorKind::Singular, "solve: preconditioner construction failed");
      x = cg.solve(sys.rhs);
    }
  }
  SolveReport rep;
  rep.relative_residual = nf > 0 ? residual(x) : 0.0;
  if (!std::isfinite(rep.relative_residual) || rep.relative_residual > 1e-10) {
    std::ostringstream msg;
    msg << "solve: relative residual " << rep.relative_residual << " exceeds 1e-10";
    fail(ErrorKind::Runtime, msg.str());
  }
  rep.u = sys.prescribed;
  for (Eigen::Index i = 0; i < nf; ++i) rep.u[sys.free_dofs[i]] = x[i];
  return rep;
}

void write_matrix_market(const Eigen::SparseMatrix<double>& K, const std::string& path) {
  if (!Eigen::saveMarket(K, path)) fail(ErrorKind::Io, "cannot write matrix file " + path);
}

namespace {

Eigen::VectorXd element_values(const ElementData& ed, const Eigen::VectorXd& u) {
  Eigen::VectorXd ue(ed.dofs.size());
  for (std::size_t k = 0; k < ed.dofs.size(); ++k) ue[k] = u[ed.dofs[k]];
  return ue;
}

Eigen::Matrix2d as_matrix(const Eigen::Vector4d& g) {
  Eigen::Matrix2d H;
  H << g[0], g[2], g[3], g[1];
  return H;
}

}  // namespace

Vec2 displacement_at(const Discretization& disc, const Eigen::VectorXd& u, const Vec2& p) {
  const int e = disc.mesh.locate(p);
  if (e < 0) fail(ErrorKind::InvalidArgument, "displacement_at: point outside the domain");
  const ElementData& ed = disc.elements[e];
  const Eigen::VectorXd row = shape_row(ed, p);
  Vec2 out = Vec2::Zero();
  for (int k = 0; k < row.size(); ++k) out += row[k] * Vec2(u[ed.dofs[2 * k]], u[ed.dofs[2 * k + 1]]);
  return out;
}

Eigen::Matrix2d cell_gradient(const Discretization& disc, const Eigen::VectorXd& u, int element, int cell) {
  const ElementData& ed = disc.elements[element];
  return as_matrix(ed.gradients[cell] * element_values(ed, u));
}

Voigt3 cell_strain(const Discretization& disc, const Eigen::VectorXd& u, int element, int cell) {
  return strain_of(cell_gradient(disc, u, element, cell));
}

Eigen::Matrix2d side_gradient(const Discretization& disc, const Eigen::VectorXd& u, int element,
                              const std::vector<int>& cells) {
  const ElementData& ed = disc.elements[element];
  const Eigen::VectorXd ue = element_values(ed, u);
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  double area = 0.0;
  for (int c : cells) {
    const double a = ed.partition.cells[c].area;
    g += a * (ed.gradients[c] * ue);
    area += a;
  }
  if (!(area > 0.0)) fail(ErrorKind::InvalidArgument, "side_gradient: empty cell set");
  return as_matrix(g / area);
}

CellGradients all_cell_gradients(const Discretization& disc, const Eigen::VectorXd& u, int threads) {
  CellGradients out(disc.elements.size());
  parallel_for(disc.elements.size(), threads, [&](std::size_t e) {
    const ElementData& ed = disc.elements[e];
    const Eigen::VectorXd ue = element_values(ed, u);
    out[e].reserve(ed.gradients.size());
    for (const auto& G : ed.gradients) out[e].push_back(as_matrix(G * ue));
  });
  return out;
}

Eigen::Matrix2d recovered_gradient(const Discretization& disc, const CellGradients& grads, const Vec2& p, Phase phase,
                                   double radius) {
  const Mesh& mesh = disc.mesh;
  const int reach = static_cast<int>(std::ceil(radius / std::min(mesh.dx(), mesh.dy()))) + 1;
  const int ci = static_cast<int>(std::floor((p.x() - mesh.domain_min().x()) / mesh.dx()));
  const int cj = static_cast<int>(std::floor((p.y() - mesh.domain_min().y()) / mesh.dy()));
  Eigen::Matrix3d AtA = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 3, 4> AtB = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  double area = 0.0;
  for (int j = std::max(0, cj - reach); j <= std::min(mesh.ny() - 1, cj + reach); ++j) {
    for (int i = std::max(0, ci - reach); i <= std::min(mesh.nx() - 1, ci + reach); ++i) {
      const int e = mesh.element_index(i, j);
      const ElementData& ed = disc.elements[e];
      for (int c = 0; c < static_cast<int>(ed.partition.cells.size()); ++c) {
        const SmoothingCell& cell = ed.partition.cells[c];
        if (cell.phase != phase) continue;
        const Vec2 x = polygon_centroid(cell.polygon);
        if ((x - p).norm() > radius) continue;
        const Eigen::Matrix2d& H = grads[e][c];
        const Eigen::Vector4d g(H(0, 0), H(0, 1), H(1, 0), H(1, 1));
        const Eigen::Vector3d row(1.0, (x.x() - p.x()) / radius, (x.y() - p.y()) / radius);
        AtA += cell.area * row * row.transpose();
        AtB += cell.area * row * g.transpose();
        mean += cell.area * g;
        area += cell.area;
      }
    }
  }
  if (!(area > 0.0)) fail(ErrorKind::Geometry, "recovered_gradient: no cells of the requested phase near the point");
  Eigen::Vector4d g = mean / area;
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(AtA);
  if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 1e-6 * area) g = ldlt.solve(AtB).row(0).transpose();
  Eigen::Matrix2d H;
  H << g[0], g[1], g[2], g[3];
  return H;
}

double segment_strain(const Discretization& disc, const Eigen::VectorXd& u, int element, int segment) {
  const ElementData& ed = disc.elements[element];
  return ed.segment_ops[segment].dot(element_values(ed, u));
}

EnergyBreakdown total_energy(const Discretization& disc, const MaterialSet& mat, const Eigen::VectorXd& u,
                             const Loads& loads) {
  EnergyBreakdown out;
  for (std::size_t e = 0; e < disc.elements.size(); ++e) {
    const ElementData& ed = disc.elements[e];
    const Eigen::VectorXd ue = element_values(ed, u);
    for (std::size_t c = 0; c < ed.partition.cells.size(); ++c) {
      const SmoothingCell& cell = ed.partition.cells[c];
      const Voigt3 eps = strain_rows(ed.gradients[c]) * ue;
      out.bulk += cell.area * bulk_energy_density(mat.stiffness(cell.phase), eps, mat.eigenstrain_of(cell.phase));
    }
    for (std::size_t s = 0; s < ed.segments.size(); ++s) {
      const double eS = ed.segment_ops[s].dot(ue);
      out.interface += ed.segments[s].length * interface_energy_density(mat.interface, eS);
    }
    if (loads.any()) {
      Eigen::VectorXd fe = Eigen::VectorXd::Zero(ue.size());
      external_load(disc.mesh, static_cast<int>(e), ed, loads, fe);
      out.external -= fe.dot(ue);
    }
  }
  out.total = out.bulk + out.interface + out.external;
  return out;
}

double discrete_particle_area(const Discretization& disc) {
  double a = 0.0;
  for (const auto& ed : disc.elements)
    for (const auto& cell : ed.partition.cells)
      if (cell.phase == Phase::Particle) a += cell.area;
  return a;
}

double discrete_interface_length(const Discretization& disc) {
  double l = 0.0;
  for (int e : disc.cut_elements)
    for (const auto& s : disc.elements[e].segments) l += s.length;
  return l;
}

ProblemSolution solve_problem(const ProblemSpec& spec) {
  spec.materials.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Discretization disc = discretize(spec.mesh, spec.field, spec.smoothing, spec.threads);
  const LinearSystem sys = assemble(disc, spec.materials, spec.loads, spec.threads);
  const auto t1 = std::chrono::steady_clock::now();
  const ReducedSystem red = apply_dirichlet(sys, boundary_constraints(disc, spec.boundary));
  SolveReport rep = solve(red, spec.solver);
  ProblemSolution out{std::move(disc), std::move(rep.u), {}, rep.relative_residual,
                      std::chrono::duration<double>(t1 - t0).count()};
  out.energy = total_energy(out.disc, spec.materials, out.u, spec.loads);
  return out;
}

}  // namespace smx
