#pragma once

#include "smxfem/common.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace smx {

using Quad = std::array<Vec2, 4>;

/// Structured quadrilateral grid. Nodes and elements are 0-based and
/// row-major; element vertices are counter-clockwise starting at the
/// lower-left corner. Immutable after construction.
class Mesh {
 public:
  Mesh(Vec2 domain_min, Vec2 domain_max, int nx, int ny);

  const Vec2& domain_min() const { return min_; }
  const Vec2& domain_max() const { return max_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return (max_.x() - min_.x()) / nx_; }
  double dy() const { return (max_.y() - min_.y()) / ny_; }
  double h() const { return std::max(dx(), dy()); }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 4>>& elements() const { return elements_; }
  const Vec2& node(int i) const { return nodes_[i]; }
  const std::array<int, 4>& element(int e) const { return elements_[e]; }
  Quad element_vertices(int e) const;

  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
  int element_index(int i, int j) const { return j * nx_ + i; }
  bool is_boundary_node(int n) const;
  std::vector<int> boundary_nodes() const;

  /// Element containing p (closed hull), or -1 when p lies outside.
  int locate(const Vec2& p) const;

  /// Moves interior nodes by a random offset of at most `fraction` times the
  /// cell size per axis. Elements stay strictly convex for fraction < 0.25.
  Mesh perturbed(double fraction, std::uint64_t seed) const;

 private:
  Vec2 min_, max_;
  int nx_, ny_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 4>> elements_;
};

Mesh build_structured_mesh(const Vec2& domain_min, const Vec2& domain_max, int nx, int ny);

/// Shoelace signed area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> polygon);

bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p, double tol = 1e-12);

}  // namespace smx
