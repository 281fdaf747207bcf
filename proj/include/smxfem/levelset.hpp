#pragma once

#include "smxfem/geometry.hpp"
#include "smxfem/mesh.hpp"

#include <span>
#include <vector>

namespace smx {

/// Regular node lattice shared by the level set and the finite element mesh.
struct Lattice {
  Vec2 origin = Vec2::Zero();
  double dx = 1.0;
  double dy = 1.0;
  int nx = 1;  // cells per axis
  int ny = 1;

  static Lattice of(const Mesh& mesh);
  int nodes_x() const { return nx + 1; }
  int nodes_y() const { return ny + 1; }
  std::size_t num_nodes() const { return static_cast<std::size_t>(nodes_x()) * nodes_y(); }
  int index(int i, int j) const { return j * nodes_x() + i; }
  Vec2 point(int i, int j) const { return origin + Vec2(i * dx, j * dy); }
  double h() const { return std::max(dx, dy); }
  double h_min() const { return std::min(dx, dy); }
};

/// Nodal level set: phi < 0 inside particles, phi > 0 in the matrix.
struct LevelSetField {
  Lattice lattice;
  std::vector<double> phi;

  double at(int i, int j) const { return phi[lattice.index(i, j)]; }
};

/// Normal speed per node. Nodes outside the narrow band carry zero.
struct VelocityField {
  Lattice lattice;
  std::vector<double> v;
  int band_width = 8;  // cells
};

struct Circle {
  Vec2 center;
  double radius = 1.0;
};

/// phi = min_k (|x - c_k| - R_k).
LevelSetField init_signed_distance_circles(const Mesh& mesh, std::span<const Circle> circles);

/// sum_I N_I(p) phi_I with the element's Wachspress basis. Throws if p lies
/// outside the element.
double interpolate_phi(const LevelSetField& field, const Mesh& mesh, int element, const Vec2& p);

struct NormalCurvature {
  Vec2 normal;  // points from the particle into the matrix
  double curvature = 0.0;  // positive for a convex particle
};

/// Central-difference gradient and curvature at every node; curvature is
/// clamped to |kappa| <= 1 / h_min.
struct NodalGeometry {
  std::vector<Vec2> gradient;
  std::vector<double> curvature;
};
NodalGeometry nodal_geometry(const LevelSetField& field);

NormalCurvature normal_and_curvature(const LevelSetField& field, const NodalGeometry& geom, const Vec2& p);
NormalCurvature normal_and_curvature(const LevelSetField& field, const Vec2& p);

/// One TVD-RK3 step of phi_t + v |grad phi| = 0 with fifth-order WENO
/// one-sided derivatives and a Godunov Hamiltonian. Throws if dt exceeds
/// cfl * h_min / max|v|.
LevelSetField advect(const LevelSetField& field, const VelocityField& velocity, double dt, double cfl = 0.5);

/// Oriented piece of the zero contour inside one lattice cell; the particle
/// lies to the left of p0 -> p1.
struct ContourSegment {
  Vec2 p0, p1;
  int cell = 0;
};

struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
};

/// Marching-squares zero contour with linear interpolation on cell edges;
/// saddles are resolved by the cell-centre average.
std::vector<ContourSegment> zero_contour(const LevelSetField& field);
std::vector<Polyline> zero_contour_polylines(const LevelSetField& field);
std::vector<Polyline> chain_segments(std::span<const ContourSegment> segments);

/// Area of {phi < 0} from the same piecewise-linear reconstruction.
double particle_area(const LevelSetField& field);

/// Replaces phi by the signed distance to its own zero contour, clamped to
/// +-band_width cells. Throws Error(Geometry) when no zero crossing exists.
LevelSetField reinitialize(const LevelSetField& field, int band_width = 8);

/// Interface speed known on a straight piece of the interface, linear between
/// its endpoints.
struct InterfaceSample {
  Vec2 a, b;
  double va = 0.0;
  double vb = 0.0;
};

/// Extends interface speeds off the interface so that grad v . grad phi = 0
/// in the band. Nodes of cut cells take the speed at their closest interface
/// point; the remaining band nodes are visited in increasing |phi| (min-heap)
/// and solved with second-order upwind differences where available.
VelocityField extend_velocity(const LevelSetField& field, std::span<const InterfaceSample> samples,
                              int band_width = 8);

/// max | |grad phi| - 1 | over nodes with |phi| <= max_distance (central differences).
double eikonal_residual(const LevelSetField& field, double max_distance);

/// max |grad v . grad phi| over nodes with |phi| <= max_distance whose
/// stencil stays inside the band (central differences).
double extension_residual(const LevelSetField& field, const VelocityField& velocity, double max_distance);

/// phi + delta with delta chosen (secant iteration) so the particle area
/// equals target_area.
LevelSetField conserve_area(const LevelSetField& field, double target_area);

}  // namespace smx
