#pragma once

#include "smxfem/mesh.hpp"

#include <array>

namespace smx {

using Nodal4 = std::array<double, 4>;

/// Edge line l(x, y) = c - a x - b y, scaled so that l is the distance to the
/// edge and positive inside the element.
struct EdgeLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(const Vec2& p) const { return c - a * p.x() - b * p.y(); }
};

/// Wachspress rational basis on a strictly convex quadrilateral, evaluated
/// directly in global coordinates. Node I carries the wedge
/// w_I = k_I * l_{I+1} * l_{I+2} (the two edges not incident to I) and
/// N_I = w_I / sum_J w_J.
///
/// Only values are provided. Strains are obtained by boundary integration
/// of these values, so no derivative of N is ever formed.
class WachspressBasis {
 public:
  /// Throws Error(Geometry) for non-convex or degenerate quads.
  explicit WachspressBasis(const Quad& quad);

  Nodal4 eval(const Vec2& p) const;

  const Quad& vertices() const { return vertices_; }
  const std::array<EdgeLine, 4>& edges() const { return lines_; }
  const Nodal4& wedge_coefficients() const { return kappa_; }
  double area() const { return area_; }

  /// Same basis with every wedge coefficient multiplied by `factor` (> 0);
  /// the shape functions are invariant under this rescaling.
  WachspressBasis rescaled(double factor) const;

 private:
  Quad vertices_;
  std::array<EdgeLine, 4> lines_;
  Nodal4 kappa_;
  double area_ = 0.0;
};

inline WachspressBasis build_basis(const Quad& quad) { return WachspressBasis(quad); }

inline Nodal4 eval_shape(const WachspressBasis& basis, const Vec2& p) { return basis.eval(p); }

/// Interpolated value sum_I N_I v_I.
inline double interpolate(const Nodal4& N, const Nodal4& values) {
  return N[0] * values[0] + N[1] * values[1] + N[2] * values[2] + N[3] * values[3];
}

/// Ridge enrichment F = sum N_I |phi_I| - |sum N_I phi_I|.
double eval_enrichment(const Nodal4& N, const Nodal4& nodal_phi);

inline double eval_enrichment(const WachspressBasis& basis, const Vec2& p, const Nodal4& nodal_phi) {
  return eval_enrichment(basis.eval(p), nodal_phi);
}

/// True when the nodal values contain both signs (zero counts as positive).
inline bool is_cut(const Nodal4& nodal_phi) {
  bool neg = false, pos = false;
  for (double v : nodal_phi) (v < 0.0 ? neg : pos) = true;
  return neg && pos;
}

}  // namespace smx
