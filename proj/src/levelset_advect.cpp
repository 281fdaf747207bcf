#include "smxfem/levelset.hpp"

#include <cmath>
#include <sstream>

namespace smx {

namespace {

constexpr int kGhost = 3;

/// Field padded with three ghost layers filled by linear extrapolation.
class Padded {
 public:
  explicit Padded(const LevelSetField& f) : nx_(f.lattice.nodes_x()), ny_(f.lattice.nodes_y()) {
    const int w = nx_ + 2 * kGhost;
    data_.assign(static_cast<std::size_t>(w) * (ny_ + 2 * kGhost), 0.0);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) at(i, j) = f.at(i, j);
    for (int j = 0; j < ny_; ++j) {
      for (int g = 1; g <= kGhost; ++g) {
        at(-g, j) = at(0, j) + g * (at(0, j) - at(1, j));
        at(nx_ - 1 + g, j) = at(nx_ - 1, j) + g * (at(nx_ - 1, j) - at(nx_ - 2, j));
      }
    }
    for (int i = -kGhost; i < nx_ + kGhost; ++i) {
      for (int g = 1; g <= kGhost; ++g) {
        at(i, -g) = at(i, 0) + g * (at(i, 0) - at(i, 1));
        at(i, ny_ - 1 + g) = at(i, ny_ - 1) + g * (at(i, ny_ - 1) - at(i, ny_ - 2));
      }
    }
  }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(j + kGhost) * (nx_ + 2 * kGhost) + i + kGhost]; }
  double at(int i, int j) const {
    return data_[static_cast<std::size_t>(j + kGhost) * (nx_ + 2 * kGhost) + i + kGhost];
  }

 private:
  int nx_, ny_;
  std::vector<double> data_;
};

/// Fifth-order WENO combination of five consecutive one-sided differences.
double weno5(double v1, double v2, double v3, double v4, double v5) {
  const double p1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0;
  const double p2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0;
  const double p3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0;
  const double s1 = 13.0 / 12.0 * std::pow(v1 - 2 * v2 + v3, 2) + 0.25 * std::pow(v1 - 4 * v2 + 3 * v3, 2);
  const double s2 = 13.0 / 12.0 * std::pow(v2 - 2 * v3 + v4, 2) + 0.25 * std::pow(v2 - v4, 2);
  const double s3 = 13.0 / 12.0 * std::pow(v3 - 2 * v4 + v5, 2) + 0.25 * std::pow(3 * v3 - 4 * v4 + v5, 2);
  const double eps = 1e-6 * std::max({v1 * v1, v2 * v2, v3 * v3, v4 * v4, v5 * v5}) + 1e-99;
  const double a1 = 0.1 / std::pow(s1 + eps, 2);
  const double a2 = 0.6 / std::pow(s2 + eps, 2);
  const double a3 = 0.3 / std::pow(s3 + eps, 2);
  return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3);
}

/// Godunov upwind squared derivative for speed sign `positive`.
double godunov_sq(double minus, double plus, bool positive) {
  if (positive) return std::max(std::pow(std::max(minus, 0.0), 2), std::pow(std::min(plus, 0.0), 2));
  return std::max(std::pow(std::min(minus, 0.0), 2), std::pow(std::max(plus, 0.0), 2));
}

/// -v |grad phi| at every node.
std::vector<double> rate(const LevelSetField& f, const VelocityField& vel) {
  const Lattice& L = f.lattice;
  const Padded p(f);
  std::vector<double> out(L.num_nodes(), 0.0);
  for (int j = 0; j < L.nodes_y(); ++j) {
    for (int i = 0; i < L.nodes_x(); ++i) {
      const int n = L.index(i, j);
      const double v = vel.v[n];
      if (v == 0.0) continue;
      auto dx = [&](int k) { return (p.at(i + k + 1, j) - p.at(i + k, j)) / L.dx; };
      auto dy = [&](int k) { return (p.at(i, j + k + 1) - p.at(i, j + k)) / L.dy; };
      const double xm = weno5(dx(-3), dx(-2), dx(-1), dx(0), dx(1));
      const double xp = weno5(dx(2), dx(1), dx(0), dx(-1), dx(-2));
      const double ym = weno5(dy(-3), dy(-2), dy(-1), dy(0), dy(1));
      const double yp = weno5(dy(2), dy(1), dy(0), dy(-1), dy(-2));
      const bool pos = v > 0.0;
      out[n] = -v * std::sqrt(godunov_sq(xm, xp, pos) + godunov_sq(ym, yp, pos));
    }
  }
  return out;
}

}  // namespace

LevelSetField advect(const LevelSetField& field, const VelocityField& velocity, double dt, double cfl) {
  const Lattice& L = field.lattice;
  if (velocity.v.size() != L.num_nodes()) fail(ErrorKind::InvalidArgument, "advect: velocity lattice mismatch");
  double vmax = 0.0;
  for (double v : velocity.v) vmax = std::max(vmax, std::abs(v));
  if (!(dt >= 0.0)) fail(ErrorKind::InvalidArgument, "advect: dt must be non-negative");
  if (vmax > 0.0 && dt > cfl * L.h_min() / vmax * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "advect: CFL violation (dt=" << dt << ", limit=" << cfl * L.h_min() / vmax << ")";
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  if (vmax == 0.0 || dt == 0.0) return field;

  // Shu-Osher TVD RK3.
  LevelSetField s1 = field, s2 = field, out = field;
  const auto r0 = rate(field, velocity);
  for (std::size_t n = 0; n < s1.phi.size(); ++n) s1.phi[n] = field.phi[n] + dt * r0[n];
  const auto r1 = rate(s1, velocity);
  for (std::size_t n = 0; n < s2.phi.size(); ++n)
    s2.phi[n] = 0.75 * field.phi[n] + 0.25 * (s1.phi[n] + dt * r1[n]);
  const auto r2 = rate(s2, velocity);
  for (std::size_t n = 0; n < out.phi.size(); ++n)
    out.phi[n] = field.phi[n] / 3.0 + 2.0 / 3.0 * (s2.phi[n] + dt * r2[n]);
  return out;
}

}  // namespace smx
