#include "doctest.h"

#include "smxfem/smoothing.hpp"

#include <algorithm>
#include <random>

using namespace smx;

namespace {

const Quad kQuad{Vec2(0.1, -0.05), Vec2(1.2, 0.1), Vec2(1.05, 0.95), Vec2(-0.1, 1.1)};

std::vector<Nodal4> phi_cases() {
  return {{1.0, 2.0, 0.5, 0.3},       {-0.4, 0.6, 0.8, 0.2},    {-0.4, -0.2, 0.8, 0.5},
          {-0.5, 0.3, -0.6, 0.4},     {0.3, -0.2, 0.4, -0.1},   {-1e-6, 0.5, 0.5, 0.5},
          {-0.3, 0.3, 0.3, 1e-9},     {-1.0, -1.0, -1.0, -0.5}};
}

Eigen::VectorXd linear_field(const Quad& q, const Eigen::Matrix2d& A, const Vec2& c, int ndof) {
  Eigen::VectorXd ue = Eigen::VectorXd::Zero(ndof);
  for (int I = 0; I < 4; ++I) ue.segment<2>(2 * I) = A * q[I] + c;
  return ue;
}

}  // namespace

TEST_SUITE("smoothing") {
  TEST_CASE("Gauss rules integrate polynomials on a segment") {
    const Vec2 a(0.2, 0.1), b(1.4, 0.9);
    const double len = (b - a).norm();
    for (int n : {1, 2, 3}) {
      double s0 = 0.0, s1 = 0.0;
      for (const auto& qp : gauss_on_segment(a, b, n)) {
        const double t = (qp.x - a).norm() / len;
        s0 += qp.w;
        s1 += qp.w * (n >= 2 ? t * t * t : t);
      }
      CHECK(s0 == doctest::Approx(len).epsilon(1e-14));
      CHECK(s1 == doctest::Approx(len * (n >= 2 ? 0.25 : 0.5)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gauss_on_segment(a, b, 4), Error);
  }

  TEST_CASE("cell areas partition the element exactly") {
    const WachspressBasis basis(kQuad);
    for (const Nodal4& phi : phi_cases()) {
      for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{4, 4}, std::pair{3, 2}}) {
        const ElementPartition p = partition_element(basis, phi, m, n);
        double area = 0.0, polyarea = 0.0;
        for (const auto& c : p.cells) {
          CHECK(c.area > 0.0);
          area += c.area;
          polyarea += signed_area(c.polygon);
        }
        CHECK(std::abs(area - basis.area()) <= 1e-12 * basis.area());
        CHECK(std::abs(polyarea - basis.area()) <= 1e-12 * basis.area());
        CHECK(p.cut == is_cut(phi));
      }
    }
  }

  TEST_CASE("cells carry one phase, consistent with interpolated phi") {
    const WachspressBasis basis(kQuad);
    const Nodal4 phi{-0.5, 0.3, -0.6, 0.4};
    const ElementPartition p = partition_element(basis, phi, 4, 4);
    CHECK_FALSE(p.chords.empty());
    for (const auto& c : p.cells) {
      const double v = interpolate(basis.eval(polygon_centroid(c.polygon)), phi);
      if (std::abs(v) > 1e-3) CHECK((v < 0.0) == (c.phase == Phase::Particle));
      CHECK(c.enriched);
    }
    for (const auto& ch : p.chords) {
      CHECK_FALSE(ch.particle_cells.empty());
      CHECK_FALSE(ch.matrix_cells.empty());
    }
  }

  TEST_CASE("smoothed gradient is exact for rigid-body and linear fields") {
    const WachspressBasis basis(kQuad);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (const Nodal4& phi : phi_cases()) {
      // Cuts within 1e-9 of a vertex leave sliver cells whose boundary
      // integrals cancel badly; assembly snaps those values away first.
      if (std::any_of(phi.begin(), phi.end(), [](double v) { return v != 0.0 && std::abs(v) < 1e-8; })) continue;
      const bool cut = is_cut(phi);
      const auto [m, n] = cut ? std::pair{4, 4} : std::pair{2, 2};
      const ElementPartition p = partition_element(basis, phi, m, n);
      for (int trial = 0; trial < 4; ++trial) {
        Eigen::Matrix2d A;
        if (trial == 0) A << 0.0, 0.0, 0.0, 0.0;            // translation
        else if (trial == 1) A << 0.0, -0.3, 0.3, 0.0;      // infinitesimal rotation
        else A << d(rng), d(rng), d(rng), d(rng);
        const Vec2 c(d(rng), d(rng));
        const Eigen::VectorXd ue = linear_field(kQuad, A, c, cut ? 16 : 8);
        for (const auto& cell : p.cells) {
          const Eigen::Vector4d g = smoothed_gradient(cell, basis, phi) * ue;
          CHECK(std::abs(g[0] - A(0, 0)) < 1e-12);
          CHECK(std::abs(g[1] - A(1, 1)) < 1e-12);
          CHECK(std::abs(g[2] - A(0, 1)) < 1e-12);
          CHECK(std::abs(g[3] - A(1, 0)) < 1e-12);
          const Voigt3 e = smoothed_B(cell, basis, phi) * ue;
          CHECK(std::abs(e[2] - (A(0, 1) + A(1, 0))) < 1e-12);
          if (trial <= 1) CHECK(e.norm() < 1e-12);
        }
      }
    }
  }

  TEST_CASE("enriched columns vanish for uncut elements") {
    const WachspressBasis basis(kQuad);
    const ElementPartition p = partition_element(basis, Nodal4{1, 2, 3, 4}, 2, 2);
    for (const auto& cell : p.cells) CHECK(smoothed_gradient(cell, basis, Nodal4{1, 2, 3, 4}).cols() == 8);
  }

  TEST_CASE("partition rejects empty grids") {
    CHECK_THROWS_AS(partition_element(WachspressBasis(kQuad), Nodal4{1, 1, 1, 1}, 0, 2), Error);
  }
}
