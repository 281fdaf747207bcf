#pragma once

#include "smxfem/geometry.hpp"
#include "smxfem/shapefn.hpp"

#include <vector>

namespace smx {

struct QuadPoint {
  Vec2 x;
  double w = 0.0;  // includes the segment length
};

/// Gauss points on one straight edge of a smoothing cell.
struct EdgeQuadrature {
  Vec2 a, b;
  Vec2 normal;  // outward unit normal
  std::vector<QuadPoint> points;
};

/// Gauss-Legendre rule mapped onto segment a-b (1, 2 or 3 points).
std::vector<QuadPoint> gauss_on_segment(const Vec2& a, const Vec2& b, int npts);

/// Polygonal subdomain carrying one constant smoothed strain.
struct SmoothingCell {
  Polygon polygon;  // CCW, 3 or 4 vertices
  double area = 0.0;
  Phase phase = Phase::Matrix;
  /// True iff the parent element is cut (has nodal phi of both signs).
  bool enriched = false;
  /// Index of the m x n subcell this cell was generated from.
  int subcell = 0;
  std::vector<EdgeQuadrature> edges;
};

/// Straight approximation of the interface inside one subcell, with the
/// cells that border it on either side.
struct CellChord {
  Vec2 p0, p1;
  int subcell = 0;
  std::vector<int> particle_cells;
  std::vector<int> matrix_cells;
};

struct ElementPartition {
  bool cut = false;
  std::vector<SmoothingCell> cells;
  std::vector<CellChord> chords;
};

/// Splits an element into m x n subcells (images of the bilinear map of a
/// regular grid on the unit square). In a cut element every subcell crossed
/// by the interface is split along the interface chord and each side is
/// fanned into triangles from its centroid. Sides thinner than
/// `sliver_fraction` of the element area are not split off.
ElementPartition partition_element(const WachspressBasis& basis, const Nodal4& nodal_phi, int m, int n,
                                   double sliver_fraction = 1e-10);

/// 1-point Gauss per edge for standard elements, 3-point for enriched ones.
void assign_edge_quadrature(SmoothingCell& cell);

/// Element dof layout: [d0x d0y ... d3x d3y | a0x a0y ... a3x a3y]; the
/// enriched block is present only for cut elements.
using GradientOperator = Eigen::Matrix<double, 4, Eigen::Dynamic>;
using BMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Cell average of the displacement gradient, rows [u1,1 u2,2 u1,2 u2,1],
/// computed from the cell boundary only: (1/A) * sum_edges sum_g w_g u(x_g) n.
GradientOperator smoothed_gradient(const SmoothingCell& cell, const WachspressBasis& basis, const Nodal4& nodal_phi);

/// Voigt strain rows [e11, e22, g12] of a gradient operator.
BMatrix strain_rows(const GradientOperator& G);

inline BMatrix smoothed_B(const SmoothingCell& cell, const WachspressBasis& basis, const Nodal4& nodal_phi) {
  return strain_rows(smoothed_gradient(cell, basis, nodal_phi));
}

}  // namespace smx
