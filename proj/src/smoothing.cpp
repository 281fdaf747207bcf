#include "smxfem/smoothing.hpp"

#include <cmath>

namespace smx {

std::vector<QuadPoint> gauss_on_segment(const Vec2& a, const Vec2& b, int npts) {
  const double len = (b - a).norm();
  auto at = [&](double s) -> Vec2 { return a + s * (b - a); };
  switch (npts) {
    case 1:
      return {{at(0.5), len}};
    case 2: {
      const double g = 0.5 / std::sqrt(3.0);
      return {{at(0.5 - g), 0.5 * len}, {at(0.5 + g), 0.5 * len}};
    }
    case 3: {
      const double g = 0.5 * std::sqrt(0.6);
      return {{at(0.5 - g), len * 5.0 / 18.0}, {at(0.5), len * 8.0 / 18.0}, {at(0.5 + g), len * 5.0 / 18.0}};
    }
    default:
      fail(ErrorKind::InvalidArgument, "gauss_on_segment: supported point counts are 1, 2 and 3");
  }
}

namespace {

Vec2 bilinear_point(const Quad& q, double s, double t) {
  return (1.0 - s) * (1.0 - t) * q[0] + s * (1.0 - t) * q[1] + s * t * q[2] + (1.0 - s) * t * q[3];
}

/// Drops consecutive duplicate vertices.
Polygon cleaned(const Polygon& poly) {
  Polygon out;
  for (const auto& p : poly)
    if (out.empty() || p != out.back()) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

SmoothingCell make_cell(Polygon poly, Phase phase, bool enriched, int subcell) {
  SmoothingCell c;
  c.polygon = std::move(poly);
  c.area = signed_area(c.polygon);
  c.phase = phase;
  c.enriched = enriched;
  c.subcell = subcell;
  assign_edge_quadrature(c);
  return c;
}

/// Fans a convex piece into triangles from its centroid; returns the new cell indices.
std::vector<int> fan_into(std::vector<SmoothingCell>& cells, const Polygon& piece, Phase phase, int subcell) {
  std::vector<int> ids;
  const Polygon poly = cleaned(piece);
  if (poly.size() < 3) return ids;
  const Vec2 c = polygon_centroid(poly);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    Polygon tri{c, poly[k], poly[(k + 1) % poly.size()]};
    if (!(signed_area(tri) > 0.0)) continue;
    ids.push_back(static_cast<int>(cells.size()));
    cells.push_back(make_cell(std::move(tri), phase, true, subcell));
  }
  return ids;
}

}  // namespace

ElementPartition partition_element(const WachspressBasis& basis, const Nodal4& nodal_phi, int m, int n,
                                   double sliver_fraction) {
  if (m < 1 || n < 1) fail(ErrorKind::InvalidArgument, "partition_element: m and n must be >= 1");
  const Quad& q = basis.vertices();
  ElementPartition out;
  out.cut = is_cut(nodal_phi);

  std::vector<Vec2> grid((m + 1) * (n + 1));
  std::vector<double> value(grid.size(), 0.0);
  auto gid = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= m; ++i) {
      const double s = static_cast<double>(i) / m, t = static_cast<double>(j) / n;
      grid[gid(i, j)] = bilinear_point(q, s, t);
      if (!out.cut) continue;
      // phi is linear along element edges, so boundary points use the exact
      // edge interpolant; this keeps neighbouring elements consistent.
      double v;
      if (j == 0)
        v = (1.0 - s) * nodal_phi[0] + s * nodal_phi[1];
      else if (j == n)
        v = (1.0 - s) * nodal_phi[3] + s * nodal_phi[2];
      else if (i == 0)
        v = (1.0 - t) * nodal_phi[0] + t * nodal_phi[3];
      else if (i == m)
        v = (1.0 - t) * nodal_phi[1] + t * nodal_phi[2];
      else
        v = interpolate(basis.eval(grid[gid(i, j)]), nodal_phi);
      value[gid(i, j)] = v;
    }
  }

  const Phase uncut_phase = phase_of(nodal_phi[0]);
  const double min_area = sliver_fraction * basis.area();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const int sub = j * m + i;
      const std::array<int, 4> ids{gid(i, j), gid(i + 1, j), gid(i + 1, j + 1), gid(i, j + 1)};
      Polygon poly{grid[ids[0]], grid[ids[1]], grid[ids[2]], grid[ids[3]]};
      if (!out.cut) {
        out.cells.push_back(make_cell(std::move(poly), uncut_phase, false, sub));
        continue;
      }
      const std::array<double, 4> vals{value[ids[0]], value[ids[1]], value[ids[2]], value[ids[3]]};
      const Vec2 center = bilinear_point(q, (i + 0.5) / m, (j + 0.5) / n);
      const double center_value = interpolate(basis.eval(center), nodal_phi);
      const SignSplit split = split_by_sign(poly, vals, center_value);

      double neg_area = 0.0, pos_area = 0.0;
      for (const auto& p : split.negative) neg_area += signed_area(p);
      for (const auto& p : split.positive) pos_area += signed_area(p);
      if (!split.crossed() || std::min(neg_area, pos_area) < min_area) {
        const Phase ph = neg_area > pos_area ? Phase::Particle : Phase::Matrix;
        out.cells.push_back(make_cell(std::move(poly), ph, true, sub));
        continue;
      }

      std::vector<std::vector<int>> neg_ids, pos_ids;
      for (const auto& p : split.negative) neg_ids.push_back(fan_into(out.cells, p, Phase::Particle, sub));
      for (const auto& p : split.positive) pos_ids.push_back(fan_into(out.cells, p, Phase::Matrix, sub));
      for (std::size_t c = 0; c < split.chords.size(); ++c) {
        const auto& ch = split.chords[c];
        if (ch[0] == ch[1]) continue;
        CellChord chord{ch[0], ch[1], sub, neg_ids[split.chord_pieces[c][0]], pos_ids[split.chord_pieces[c][1]]};
        if (chord.particle_cells.empty() || chord.matrix_cells.empty()) continue;
        out.chords.push_back(std::move(chord));
      }
    }
  }
  return out;
}

void assign_edge_quadrature(SmoothingCell& cell) {
  const int npts = cell.enriched ? 3 : 1;
  const std::size_t nv = cell.polygon.size();
  cell.edges.clear();
  cell.edges.reserve(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    const Vec2& a = cell.polygon[k];
    const Vec2& b = cell.polygon[(k + 1) % nv];
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len == 0.0) continue;
    cell.edges.push_back({a, b, Vec2(d.y() / len, -d.x() / len), gauss_on_segment(a, b, npts)});
  }
}

GradientOperator smoothed_gradient(const SmoothingCell& cell, const WachspressBasis& basis, const Nodal4& nodal_phi) {
  if (!(cell.area > 0.0)) fail(ErrorKind::Geometry, "smoothed_gradient: zero-area smoothing cell");
  const bool enriched = cell.enriched && is_cut(nodal_phi);
  const int ndof = enriched ? 16 : 8;
  GradientOperator G = GradientOperator::Zero(4, ndof);
  for (const auto& edge : cell.edges) {
    const double nx = edge.normal.x(), ny = edge.normal.y();
    for (const auto& qp : edge.points) {
      const Nodal4 N = basis.eval(qp.x);
      const double F = enriched ? eval_enrichment(N, nodal_phi) : 0.0;
      for (int I = 0; I < 4; ++I) {
        const double wN = qp.w * N[I];
        G(0, 2 * I) += wN * nx;
        G(1, 2 * I + 1) += wN * ny;
        G(2, 2 * I) += wN * ny;
        G(3, 2 * I + 1) += wN * nx;
        if (!enriched) continue;
        const double wF = wN * F;
        G(0, 8 + 2 * I) += wF * nx;
        G(1, 8 + 2 * I + 1) += wF * ny;
        G(2, 8 + 2 * I) += wF * ny;
        G(3, 8 + 2 * I + 1) += wF * nx;
      }
    }
  }
  G /= cell.area;
  return G;
}

BMatrix strain_rows(const GradientOperator& G) {
  BMatrix B(3, G.cols());
  B.row(0) = G.row(0);
  B.row(1) = G.row(1);
  B.row(2) = G.row(2) + G.row(3);
  return B;
}

}  // namespace smx
