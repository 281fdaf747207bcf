#include "smxfem/mesh.hpp"

#include <cmath>
#include <random>
#include <string>

namespace smx {

Mesh::Mesh(Vec2 domain_min, Vec2 domain_max, int nx, int ny)
    : min_(domain_min), max_(domain_max), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) fail(ErrorKind::InvalidArgument, "mesh: element counts must be >= 1");
  if (!(domain_max.x() > domain_min.x()) || !(domain_max.y() > domain_min.y()))
    fail(ErrorKind::InvalidArgument, "mesh: domain_max must exceed domain_min in both coordinates");

  nodes_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact endpoints so boundary coordinates match the domain bit-for-bit.
      const double x = i == nx ? max_.x() : min_.x() + i * dx();
      const double y = j == ny ? max_.y() : min_.y() + j * dy();
      nodes_.emplace_back(x, y);
    }
  }
  elements_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      elements_.push_back({node_index(i, j), node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)});
}

Quad Mesh::element_vertices(int e) const {
  const auto& c = elements_[e];
  return {nodes_[c[0]], nodes_[c[1]], nodes_[c[2]], nodes_[c[3]]};
}

bool Mesh::is_boundary_node(int n) const {
  const int i = n % (nx_ + 1);
  const int j = n / (nx_ + 1);
  return i == 0 || j == 0 || i == nx_ || j == ny_;
}

std::vector<int> Mesh::boundary_nodes() const {
  std::vector<int> out;
  for (int n = 0; n < static_cast<int>(nodes_.size()); ++n)
    if (is_boundary_node(n)) out.push_back(n);
  return out;
}

int Mesh::locate(const Vec2& p) const {
  const int gi = static_cast<int>(std::floor((p.x() - min_.x()) / dx()));
  const int gj = static_cast<int>(std::floor((p.y() - min_.y()) / dy()));
  // The regular-grid guess is exact for undistorted meshes; neighbours cover
  // perturbed ones and points on shared edges.
  for (int r = 0; r <= 1; ++r) {
    for (int dj = -r; dj <= r; ++dj) {
      for (int di = -r; di <= r; ++di) {
        const int i = std::clamp(gi + di, 0, nx_ - 1);
        const int j = std::clamp(gj + dj, 0, ny_ - 1);
        const int e = element_index(i, j);
        const Quad q = element_vertices(e);
        if (point_in_convex_polygon(q, p, 1e-12 * h())) return e;
      }
    }
  }
  return -1;
}

Mesh Mesh::perturbed(double fraction, std::uint64_t seed) const {
  Mesh out = *this;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-fraction, fraction);
  for (int n = 0; n < static_cast<int>(out.nodes_.size()); ++n) {
    if (is_boundary_node(n)) continue;
    out.nodes_[n] += Vec2(u(rng) * dx(), u(rng) * dy());
  }
  return out;
}

Mesh build_structured_mesh(const Vec2& domain_min, const Vec2& domain_max, int nx, int ny) {
  return Mesh(domain_min, domain_max, nx, ny);
}

double signed_area(std::span<const Vec2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) twice += cross2(polygon[k], polygon[(k + 1) % n]);
  return 0.5 * twice;
}

bool point_in_convex_polygon(std::span<const Vec2> polygon, const Vec2& p, double tol) {
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = polygon[k];
    const Vec2& b = polygon[(k + 1) % n];
    const Vec2 edge = b - a;
    const double len = edge.norm();
    if (len == 0.0) continue;
    if (cross2(edge, p - a) / len < -tol) return false;
  }
  return true;
}

}  // namespace smx
