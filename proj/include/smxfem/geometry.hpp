#pragma once

#include "smxfem/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace smx {

using Polygon = std::vector<Vec2>;

/// Pieces of a convex polygon on each side of the zero set of a scalar that
/// is linearly interpolated along the polygon edges.
struct SignSplit {
  std::vector<Polygon> negative;
  std::vector<Polygon> positive;
  /// Straight chords joining edge crossings, one per separated corner region.
  std::vector<std::array<Vec2, 2>> chords;
  /// For each chord, the indices of the negative and positive pieces it separates.
  std::vector<std::array<int, 2>> chord_pieces;
  bool crossed() const { return !chords.empty(); }
};

/// Point where the segment a-b crosses zero. Computed from a canonical
/// endpoint order so neighbouring cells sharing the edge get identical bits.
Vec2 edge_crossing(const Vec2& a, double va, const Vec2& b, double vb);

/// Splits `poly` (convex, CCW) given vertex values. Zero counts as positive.
/// `center_value` resolves the four-crossing (saddle) case: the side holding
/// the center stays connected.
SignSplit split_by_sign(std::span<const Vec2> poly, std::span<const double> values, double center_value);

/// Area centroid of a simple polygon.
Vec2 polygon_centroid(std::span<const Vec2> poly);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out = nullptr);

}  // namespace smx
