#include "smxfem/shapefn.hpp"

#include <cmath>

namespace smx {

namespace {

EdgeLine line_through(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  const double len = d.norm();
  // Inward normal of a CCW edge is its left perpendicular.
  const Vec2 inward(-d.y() / len, d.x() / len);
  return {-inward.x(), -inward.y(), -inward.dot(from)};
}

}  // namespace

WachspressBasis::WachspressBasis(const Quad& quad) : vertices_(quad) {
  area_ = signed_area(vertices_);
  double scale = 0.0;
  for (int i = 0; i < 4; ++i) scale = std::max(scale, (quad[(i + 1) % 4] - quad[i]).norm());
  if (!(scale > 0.0) || !(area_ > 1e-14 * scale * scale))
    fail(ErrorKind::Geometry, "wachspress: degenerate or clockwise quadrilateral");
  for (int i = 0; i < 4; ++i) {
    const Vec2 e0 = quad[(i + 1) % 4] - quad[i];
    const Vec2 e1 = quad[(i + 2) % 4] - quad[(i + 1) % 4];
    if (!(cross2(e0, e1) > 1e-12 * scale * scale))
      fail(ErrorKind::Geometry, "wachspress: quadrilateral is not strictly convex");
  }
  for (int i = 0; i < 4; ++i) lines_[i] = line_through(quad[i], quad[(i + 1) % 4]);

  // On edge I only w_I and w_{I+1} survive; N_I is linear there iff
  // k_I l_{I+1}(v_I) = k_{I+1} l_{I+3}(v_{I+1}).
  kappa_[0] = 1.0;
  for (int i = 0; i < 3; ++i)
    kappa_[i + 1] = kappa_[i] * lines_[(i + 1) % 4](quad[i]) / lines_[(i + 3) % 4](quad[i + 1]);
}

Nodal4 WachspressBasis::eval(const Vec2& p) const {
  const double l0 = lines_[0](p), l1 = lines_[1](p), l2 = lines_[2](p), l3 = lines_[3](p);
  Nodal4 w{kappa_[0] * l1 * l2, kappa_[1] * l2 * l3, kappa_[2] * l3 * l0, kappa_[3] * l0 * l1};
  const double sum = w[0] + w[1] + w[2] + w[3];
  if (!(sum > 0.0)) fail(ErrorKind::Geometry, "wachspress: non-positive wedge sum (point outside element?)");
  for (double& v : w) v /= sum;
  return w;
}

WachspressBasis WachspressBasis::rescaled(double factor) const {
  if (!(factor > 0.0)) fail(ErrorKind::InvalidArgument, "wachspress: rescale factor must be positive");
  WachspressBasis out = *this;
  for (double& k : out.kappa_) k *= factor;
  return out;
}

double eval_enrichment(const Nodal4& N, const Nodal4& nodal_phi) {
  double abs_sum = 0.0, sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    abs_sum += N[i] * std::abs(nodal_phi[i]);
    sum += N[i] * nodal_phi[i];
  }
  return abs_sum - std::abs(sum);
}

}  // namespace smx
