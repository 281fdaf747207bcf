#include "smxfem/levelset.hpp"

#include "smxfem/shapefn.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace smx {

Lattice Lattice::of(const Mesh& mesh) {
  return {mesh.domain_min(), mesh.dx(), mesh.dy(), mesh.nx(), mesh.ny()};
}

LevelSetField init_signed_distance_circles(const Mesh& mesh, std::span<const Circle> circles) {
  if (circles.empty()) fail(ErrorKind::InvalidArgument, "level set: at least one circle is required");
  for (const auto& c : circles)
    if (!(c.radius > 0.0)) fail(ErrorKind::InvalidArgument, "level set: circle radius must be positive");
  LevelSetField f{Lattice::of(mesh), std::vector<double>(mesh.num_nodes())};
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : circles) best = std::min(best, (mesh.node(n) - c.center).norm() - c.radius);
    f.phi[n] = best;
  }
  return f;
}

double interpolate_phi(const LevelSetField& field, const Mesh& mesh, int element, const Vec2& p) {
  const Quad q = mesh.element_vertices(element);
  if (!point_in_convex_polygon(q, p, 1e-12 * mesh.h()))
    fail(ErrorKind::InvalidArgument, "interpolate_phi: point lies outside the element");
  const auto& conn = mesh.element(element);
  const Nodal4 vals{field.phi[conn[0]], field.phi[conn[1]], field.phi[conn[2]], field.phi[conn[3]]};
  return interpolate(WachspressBasis(q).eval(p), vals);
}

NodalGeometry nodal_geometry(const LevelSetField& field) {
  const Lattice& L = field.lattice;
  const int nxn = L.nodes_x(), nyn = L.nodes_y();
  NodalGeometry g{std::vector<Vec2>(L.num_nodes(), Vec2::Zero()), std::vector<double>(L.num_nodes(), 0.0)};
  const double kmax = 1.0 / L.h_min();
  for (int j = 0; j < nyn; ++j) {
    for (int i = 0; i < nxn; ++i) {
      // Boundary nodes reuse the stencil centred on their interior neighbour.
      const int ci = std::clamp(i, 1, std::max(1, nxn - 2));
      const int cj = std::clamp(j, 1, std::max(1, nyn - 2));
      auto p = [&](int di, int dj) { return field.at(ci + di, cj + dj); };
      const double px = (p(1, 0) - p(-1, 0)) / (2.0 * L.dx);
      const double py = (p(0, 1) - p(0, -1)) / (2.0 * L.dy);
      const double pxx = (p(1, 0) - 2.0 * p(0, 0) + p(-1, 0)) / (L.dx * L.dx);
      const double pyy = (p(0, 1) - 2.0 * p(0, 0) + p(0, -1)) / (L.dy * L.dy);
      const double pxy = (p(1, 1) - p(1, -1) - p(-1, 1) + p(-1, -1)) / (4.0 * L.dx * L.dy);
      const double g2 = px * px + py * py;
      const int n = L.index(i, j);
      g.gradient[n] = Vec2(px, py);
      double kappa = 0.0;
      if (g2 > 0.0) kappa = (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / std::pow(g2, 1.5);
      g.curvature[n] = std::clamp(kappa, -kmax, kmax);
    }
  }
  return g;
}

NormalCurvature normal_and_curvature(const LevelSetField& field, const NodalGeometry& geom, const Vec2& p) {
  const Lattice& L = field.lattice;
  const double sx = (p.x() - L.origin.x()) / L.dx;
  const double sy = (p.y() - L.origin.y()) / L.dy;
  const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, L.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, L.ny - 1);
  const double s = sx - i, t = sy - j;
  const std::array<int, 4> ids{L.index(i, j), L.index(i + 1, j), L.index(i + 1, j + 1), L.index(i, j + 1)};
  const std::array<double, 4> w{(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
  Vec2 grad = Vec2::Zero();
  double kappa = 0.0;
  for (int k = 0; k < 4; ++k) {
    grad += w[k] * geom.gradient[ids[k]];
    kappa += w[k] * geom.curvature[ids[k]];
  }
  const double gn = grad.norm();
  if (!(gn > 1e-8)) fail(ErrorKind::Geometry, "normal_and_curvature: degenerate level-set gradient");
  return {grad / gn, kappa};
}

NormalCurvature normal_and_curvature(const LevelSetField& field, const Vec2& p) {
  return normal_and_curvature(field, nodal_geometry(field), p);
}

namespace {

struct CellSplit {
  SignSplit split;
  std::array<Vec2, 4> corners;
};

CellSplit split_cell(const LevelSetField& f, int i, int j) {
  const Lattice& L = f.lattice;
  CellSplit c;
  c.corners = {L.point(i, j), L.point(i + 1, j), L.point(i + 1, j + 1), L.point(i, j + 1)};
  const std::array<double, 4> v{f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)};
  const double center = 0.25 * (v[0] + v[1] + v[2] + v[3]);
  c.split = split_by_sign(c.corners, v, center);
  return c;
}

bool cell_has_both_signs(const LevelSetField& f, int i, int j) {
  const std::array<double, 4> v{f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)};
  bool neg = false, pos = false;
  for (double x : v) (x < 0.0 ? neg : pos) = true;
  return neg && pos;
}

}  // namespace

std::vector<ContourSegment> zero_contour(const LevelSetField& field) {
  const Lattice& L = field.lattice;
  std::vector<ContourSegment> out;
  for (int j = 0; j < L.ny; ++j) {
    for (int i = 0; i < L.nx; ++i) {
      if (!cell_has_both_signs(field, i, j)) continue;
      const CellSplit c = split_cell(field, i, j);
      for (std::size_t k = 0; k < c.split.chords.size(); ++k) {
        Vec2 a = c.split.chords[k][0], b = c.split.chords[k][1];
        if (a == b) continue;
        const Vec2 inside = polygon_centroid(c.split.negative[c.split.chord_pieces[k][0]]);
        if (cross2(b - a, inside - a) < 0.0) std::swap(a, b);
        out.push_back({a, b, L.nx * j + i});
      }
    }
  }
  return out;
}

std::vector<Polyline> chain_segments(std::span<const ContourSegment> segments) {
  using Key = std::pair<double, double>;
  std::multimap<Key, std::size_t> by_start;
  for (std::size_t s = 0; s < segments.size(); ++s) by_start.emplace(Key{segments[s].p0.x(), segments[s].p0.y()}, s);
  std::vector<char> used(segments.size(), 0);

  auto take_from = [&](const Vec2& p) -> long {
    auto [lo, hi] = by_start.equal_range(Key{p.x(), p.y()});
    for (auto it = lo; it != hi; ++it)
      if (!used[it->second]) return static_cast<long>(it->second);
    return -1;
  };

  std::multimap<Key, std::size_t> by_end;
  for (std::size_t s = 0; s < segments.size(); ++s) by_end.emplace(Key{segments[s].p1.x(), segments[s].p1.y()}, s);

  std::vector<Polyline> out;
  std::vector<char> seen(segments.size(), 0);
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    // Walk backwards first so open chains start at their true beginning.
    std::size_t start = s0;
    std::vector<std::size_t> visited{start};
    seen[start] = 1;
    for (;;) {
      long prev = -1;
      auto [lo, hi] = by_end.equal_range(Key{segments[start].p0.x(), segments[start].p0.y()});
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second] && !seen[it->second]) prev = static_cast<long>(it->second);
      if (prev < 0) break;
      start = static_cast<std::size_t>(prev);
      seen[start] = 1;
      visited.push_back(start);
    }
    for (auto v : visited) seen[v] = 0;
    Polyline line;
    line.points.push_back(segments[start].p0);
    long cur = static_cast<long>(start);
    while (cur >= 0) {
      used[cur] = 1;
      line.points.push_back(segments[cur].p1);
      cur = take_from(segments[cur].p1);
    }
    if (line.points.size() > 2 && line.points.front() == line.points.back()) {
      line.points.pop_back();
      line.closed = true;
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Polyline> zero_contour_polylines(const LevelSetField& field) {
  const auto segs = zero_contour(field);
  return chain_segments(segs);
}

double particle_area(const LevelSetField& field) {
  const Lattice& L = field.lattice;
  double area = 0.0;
  for (int j = 0; j < L.ny; ++j) {
    for (int i = 0; i < L.nx; ++i) {
      const bool all_neg = field.at(i, j) < 0 && field.at(i + 1, j) < 0 && field.at(i + 1, j + 1) < 0 &&
                           field.at(i, j + 1) < 0;
      if (all_neg) {
        area += L.dx * L.dy;
        continue;
      }
      if (!cell_has_both_signs(field, i, j)) continue;
      const CellSplit c = split_cell(field, i, j);
      for (const auto& p : c.split.negative) area += signed_area(p);
    }
  }
  return area;
}

LevelSetField reinitialize(const LevelSetField& field, int band_width) {
  const auto segs = zero_contour(field);
  if (segs.empty()) fail(ErrorKind::Geometry, "reinitialize: no zero crossing (particle vanished)");
  const Lattice& L = field.lattice;
  const double band = band_width * L.h();

  // Bucket segments by lattice cell so each node only scans nearby cells.
  std::vector<std::vector<int>> bucket(static_cast<std::size_t>(L.nx) * L.ny);
  for (std::size_t s = 0; s < segs.size(); ++s) bucket[segs[s].cell].push_back(static_cast<int>(s));
  const int reach_x = static_cast<int>(std::ceil(band / L.dx)) + 1;
  const int reach_y = static_cast<int>(std::ceil(band / L.dy)) + 1;

  LevelSetField out = field;
  for (int j = 0; j < L.nodes_y(); ++j) {
    for (int i = 0; i < L.nodes_x(); ++i) {
      const int n = L.index(i, j);
      const double sgn = field.phi[n] < 0.0 ? -1.0 : 1.0;
      const Vec2 x = L.point(i, j);
      double best = band;
      for (int cj = std::max(0, j - reach_y); cj < std::min(L.ny, j + reach_y); ++cj)
        for (int ci = std::max(0, i - reach_x); ci < std::min(L.nx, i + reach_x); ++ci)
          for (int s : bucket[L.nx * cj + ci]) best = std::min(best, point_segment_distance(x, segs[s].p0, segs[s].p1));
      out.phi[n] = sgn * best;
    }
  }
  return out;
}

double eikonal_residual(const LevelSetField& field, double max_distance) {
  const Lattice& L = field.lattice;
  double worst = 0.0;
  for (int j = 1; j < L.ny; ++j) {
    for (int i = 1; i < L.nx; ++i) {
      if (std::abs(field.at(i, j)) > max_distance) continue;
      const double px = (field.at(i + 1, j) - field.at(i - 1, j)) / (2 * L.dx);
      const double py = (field.at(i, j + 1) - field.at(i, j - 1)) / (2 * L.dy);
      worst = std::max(worst, std::abs(std::hypot(px, py) - 1.0));
    }
  }
  return worst;
}

double extension_residual(const LevelSetField& field, const VelocityField& velocity, double max_distance) {
  const Lattice& L = field.lattice;
  const double band = velocity.band_width * L.h();
  double worst = 0.0;
  for (int j = 1; j < L.ny; ++j) {
    for (int i = 1; i < L.nx; ++i) {
      if (std::abs(field.at(i, j)) > max_distance) continue;
      bool inside = true;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        if (std::abs(field.at(i + di, j + dj)) >= band) inside = false;
      if (!inside) continue;
      auto v = [&](int a, int b) { return velocity.v[L.index(a, b)]; };
      const double px = (field.at(i + 1, j) - field.at(i - 1, j)) / (2 * L.dx);
      const double py = (field.at(i, j + 1) - field.at(i, j - 1)) / (2 * L.dy);
      const double vx = (v(i + 1, j) - v(i - 1, j)) / (2 * L.dx);
      const double vy = (v(i, j + 1) - v(i, j - 1)) / (2 * L.dy);
      worst = std::max(worst, std::abs(px * vx + py * vy));
    }
  }
  return worst;
}

LevelSetField conserve_area(const LevelSetField& field, double target_area) {
  if (!(target_area > 0.0)) fail(ErrorKind::InvalidArgument, "conserve_area: target area must be positive");
  auto shifted = [&](double delta) {
    LevelSetField f = field;
    for (double& v : f.phi) v += delta;
    return f;
  };
  auto residual = [&](double delta) { return particle_area(shifted(delta)) - target_area; };

  double d0 = 0.0, r0 = residual(d0);
  if (std::abs(r0) <= 1e-12 * target_area) return field;
  // dA/d(delta) = -perimeter; start from that estimate.
  double perimeter = 0.0;
  for (const auto& s : zero_contour(field)) perimeter += (s.p1 - s.p0).norm();
  if (!(perimeter > 0.0)) fail(ErrorKind::Geometry, "conserve_area: empty interface");
  double d1 = r0 / perimeter, r1 = residual(d1);
  for (int it = 0; it < 30 && std::abs(r1) > 1e-12 * target_area; ++it) {
    if (r1 == r0) break;
    const double d2 = d1 - r1 * (d1 - d0) / (r1 - r0);
    d0 = d1;
    r0 = r1;
    d1 = d2;
    r1 = residual(d1);
  }
  return shifted(d1);
}

}  // namespace smx
