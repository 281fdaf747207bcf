#include "smxfem/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smx {

namespace {

// Speed at the closest interface point. Points equidistant from several
// segments (typically a shared vertex, where neighbouring segments carry
// different endpoint speeds) take the mean, so the result does not depend on
// segment order.
double closest_speed(std::span<const InterfaceSample> samples, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int count = 0;
  for (const auto& s : samples) {
    double t = 0.0;
    const double d = point_segment_distance(p, s.a, s.b, &t);
    const double tol = 1e-12 * (1.0 + std::min(d, best));
    if (d > best + tol) continue;
    const double v = (1.0 - t) * s.va + t * s.vb;
    if (d < best - tol) {
      best = d;
      sum = v;
      count = 1;
    } else {
      best = std::min(best, d);
      sum += v;
      ++count;
    }
  }
  return sum / count;
}

}  // namespace

VelocityField extend_velocity(const LevelSetField& field, std::span<const InterfaceSample> samples, int band_width) {
  if (samples.empty()) fail(ErrorKind::Geometry, "extend_velocity: empty interface");
  if (band_width < 1) fail(ErrorKind::InvalidArgument, "extend_velocity: band width must be >= 1");
  const Lattice& L = field.lattice;
  const int NX = L.nodes_x(), NY = L.nodes_y();
  const double band = band_width * L.h();

  VelocityField out{L, std::vector<double>(L.num_nodes(), 0.0), band_width};
  std::vector<char> known(L.num_nodes(), 0);

  // Nodes of cells crossed by the zero contour take the closest-point speed.
  for (int j = 0; j < L.ny; ++j) {
    for (int i = 0; i < L.nx; ++i) {
      const double c[4] = {field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1), field.at(i, j + 1)};
      const bool neg = std::any_of(c, c + 4, [](double v) { return v < 0.0; });
      const bool pos = std::any_of(c, c + 4, [](double v) { return v >= 0.0; });
      if (!(neg && pos)) continue;
      for (auto [a, b] : {std::pair{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}) {
        const int n = L.index(a, b);
        if (known[n]) continue;
        out.v[n] = closest_speed(samples, L.point(a, b));
        known[n] = 1;
      }
    }
  }

  std::vector<int> order;
  for (int n = 0; n < static_cast<int>(L.num_nodes()); ++n)
    if (!known[n] && std::abs(field.phi[n]) < band) order.push_back(n);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = std::abs(field.phi[a]), pb = std::abs(field.phi[b]);
    return pa != pb ? pa < pb : a < b;
  });

  auto dist = [&](int i, int j) { return std::abs(field.at(i, j)); };
  for (int n : order) {
    const int i = n % NX, j = n / NX;
    const double psi = std::abs(field.phi[n]);
    double num = 0.0, den = 0.0;
    double fallback_sum = 0.0;
    int fallback_count = 0;
    for (int axis = 0; axis < 2; ++axis) {
      const double h = axis == 0 ? L.dx : L.dy;
      int best_step = 0;
      double best_psi = psi;
      for (int s : {-1, 1}) {
        const int a = i + (axis == 0 ? s : 0), b = j + (axis == 1 ? s : 0);
        if (a < 0 || a >= NX || b < 0 || b >= NY || !known[L.index(a, b)]) continue;
        fallback_sum += out.v[L.index(a, b)];
        ++fallback_count;
        if (dist(a, b) < best_psi) {
          best_psi = dist(a, b);
          best_step = s;
        }
      }
      if (best_step == 0) continue;
      const int a1 = i + (axis == 0 ? best_step : 0), b1 = j + (axis == 1 ? best_step : 0);
      const int a2 = i + (axis == 0 ? 2 * best_step : 0), b2 = j + (axis == 1 ? 2 * best_step : 0);
      const double v1 = out.v[L.index(a1, b1)];
      const bool second = a2 >= 0 && a2 < NX && b2 >= 0 && b2 < NY && known[L.index(a2, b2)] && dist(a2, b2) <= best_psi;
      if (second) {
        const double v2 = out.v[L.index(a2, b2)];
        const double g = (3.0 * psi - 4.0 * best_psi + dist(a2, b2)) / (2.0 * h);
        if (g > 0.0) {
          num += g * (4.0 * v1 - v2) / (2.0 * h);
          den += g * 3.0 / (2.0 * h);
          continue;
        }
      }
      const double g = (psi - best_psi) / h;
      num += g * v1 / h;
      den += g / h;
    }
    if (den > 0.0)
      out.v[n] = num / den;
    else if (fallback_count > 0)
      out.v[n] = fallback_sum / fallback_count;
    else
      out.v[n] = closest_speed(samples, L.point(i, j));
    known[n] = 1;
  }
  return out;
}

}  // namespace smx
