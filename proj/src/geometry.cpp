#include "smxfem/geometry.hpp"

#include "smxfem/mesh.hpp"

#include <algorithm>
#include <tuple>

namespace smx {

Vec2 edge_crossing(const Vec2& a, double va, const Vec2& b, double vb) {
  const bool swap = std::tie(b.x(), b.y()) < std::tie(a.x(), a.y());
  const Vec2& p = swap ? b : a;
  const Vec2& q = swap ? a : b;
  const double vp = swap ? vb : va;
  const double vq = swap ? va : vb;
  double t = vp / (vp - vq);
  // Crossings within round-off of a vertex collapse onto it.
  constexpr double snap = 1e-9;
  if (t < snap) return p;
  if (t > 1.0 - snap) return q;
  return p + t * (q - p);
}

SignSplit split_by_sign(std::span<const Vec2> poly, std::span<const double> values, double center_value) {
  const std::size_t n = poly.size();
  SignSplit out;
  std::vector<int> crossing_after(n, -1);  // index into `crossings` for edge k -> k+1
  std::vector<Vec2> crossings;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = (k + 1) % n;
    if ((values[k] < 0.0) != (values[k1] < 0.0)) {
      crossing_after[k] = static_cast<int>(crossings.size());
      crossings.push_back(edge_crossing(poly[k], values[k], poly[k1], values[k1]));
    }
  }
  if (crossings.empty()) {
    Polygon whole(poly.begin(), poly.end());
    (values[0] < 0.0 ? out.negative : out.positive).push_back(std::move(whole));
    return out;
  }

  auto walk = [&](bool negative_side) {
    Polygon piece;
    for (std::size_t k = 0; k < n; ++k) {
      if ((values[k] < 0.0) == negative_side) piece.push_back(poly[k]);
      if (crossing_after[k] >= 0) piece.push_back(crossings[crossing_after[k]]);
    }
    return piece;
  };

  if (crossings.size() == 2) {
    out.negative.push_back(walk(true));
    out.positive.push_back(walk(false));
    out.chords.push_back({crossings[0], crossings[1]});
    out.chord_pieces.push_back({0, 0});
    return out;
  }

  // Saddle: the side containing the centre is one piece, every vertex of the
  // other side is cut off as a triangle.
  const bool connected_negative = center_value < 0.0;
  (connected_negative ? out.negative : out.positive).push_back(walk(connected_negative));
  auto& corners = connected_negative ? out.positive : out.negative;
  for (std::size_t k = 0; k < n; ++k) {
    if ((values[k] < 0.0) == connected_negative) continue;
    const std::size_t prev = (k + n - 1) % n;
    const Vec2 c_in = crossings[crossing_after[prev]];
    const Vec2 c_out = crossings[crossing_after[k]];
    const int corner = static_cast<int>(corners.size());
    corners.push_back({c_in, poly[k], c_out});
    out.chords.push_back({c_in, c_out});
    out.chord_pieces.push_back(connected_negative ? std::array<int, 2>{0, corner} : std::array<int, 2>{corner, 0});
  }
  return out;
}

Vec2 polygon_centroid(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  const Vec2 origin = poly[0];
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = poly[k] - origin;
    const Vec2 q = poly[(k + 1) % n] - origin;
    const double w = cross2(p, q);
    a2 += w;
    c += w * (p + q);
  }
  if (a2 == 0.0) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : poly) mean += p;
    return mean / static_cast<double>(n);
  }
  return origin + c / (3.0 * a2);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  return (a + t * d - p).norm();
}

}  // namespace smx
