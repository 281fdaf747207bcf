#include "doctest.h"

#include "smxfem/physics.hpp"
#include "smxfem/verify.hpp"

#include <cmath>
#include <numbers>

using namespace smx;

TEST_SUITE("physics") {
  TEST_CASE("cubic stiffness reduces to isotropic") {
    const double lambda = 58.17, mu = 26.13;
    CHECK(BulkMaterial::cubic(lambda + 2 * mu, lambda, mu).C == BulkMaterial::isotropic(lambda, mu).C);
    const BulkMaterial ni = BulkMaterial::cubic(246.5, 147.3, 124.7);
    CHECK(ni.scaled(1.4).C.isApprox(1.4 * ni.C));
    CHECK_NOTHROW(ni.validate("ni"));
    CHECK_THROWS_AS(BulkMaterial::cubic(100, 150, 50).validate("bad"), Error);  // C12 > C11
    CHECK_THROWS_AS(ni.scaled(0.0), Error);
  }

  TEST_CASE("material set validation") {
    MaterialSet m;
    m.matrix = m.particle = BulkMaterial::isotropic(1, 1);
    CHECK_NOTHROW(m.validate());
    m.interface.stiffness = -1.0;
    CHECK_THROWS_AS(m.validate(), Error);
  }

  TEST_CASE("eigenstrain load of a cell") {
    const double lambda = 58.17, mu = 26.13;
    MaterialSet m;
    m.matrix = m.particle = BulkMaterial::isotropic(lambda, mu);
    m.eigenstrain = dilatational(0.01);
    const WachspressBasis basis(Quad{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)});
    ElementPartition p = partition_element(basis, Nodal4{-1, -1, -1, -1}, 1, 1);
    const SmoothingCell& cell = p.cells.front();
    const BMatrix B = smoothed_B(cell, basis, Nodal4{-1, -1, -1, -1});
    const Voigt3 stress(2 * (lambda + mu) * 0.01, 2 * (lambda + mu) * 0.01, 0.0);
    CHECK((eigenstrain_load(cell, B, m) - cell.area * B.transpose() * stress).norm() < 1e-12);
    SmoothingCell outside = cell;
    outside.phase = Phase::Matrix;
    CHECK(eigenstrain_load(outside, B, m).norm() == 0.0);
    m.eigenstrain = Voigt3::Zero();
    CHECK(eigenstrain_load(cell, B, m).norm() == 0.0);
  }

  TEST_CASE("interface strain operator is exact for linear fields") {
    const Quad q{Vec2(0, 0), Vec2(1, 0), Vec2(1.1, 0.9), Vec2(-0.1, 1.0)};
    const WachspressBasis basis(q);
    const Nodal4 phi{-0.4, 0.3, 0.5, -0.2};
    const InterfaceSegment seg = make_segment(Vec2(0.55, 0.0), Vec2(0.2, 0.95), Vec2(0.0, 0.1), 0);
    CHECK(seg.normal.dot(Vec2(0.0, 0.1) - seg.midpoint) < 0.0);
    CHECK(cross2(seg.tangent, seg.normal) == doctest::Approx(-1.0));
    const RowOperator op = interface_strain_operator(seg, basis, phi);
    REQUIRE(op.size() == 16);
    Eigen::Matrix2d A;
    A << 0.3, -0.2, 0.5, 0.1;
    Eigen::VectorXd ue = Eigen::VectorXd::Zero(16);
    for (int I = 0; I < 4; ++I) ue.segment<2>(2 * I) = A * q[I];
    const Voigt3 eps = strain_of(A);
    CHECK(op.dot(ue) == doctest::Approx(tangential_strain(seg.tangent, eps)).epsilon(1e-12));

    const InterfaceBlock blk = interface_stiffness_and_residual(seg, op, InterfaceMaterial{0.0, -1.0, 10.0});
    CHECK((blk.K - blk.K.transpose()).norm() < 1e-14);
    CHECK((blk.f - (1.0 * seg.length) * op.transpose()).norm() < 1e-12);
    const InterfaceBlock none = interface_stiffness_and_residual(seg, op, InterfaceMaterial{0.5, 0.0, 0.0});
    CHECK(none.K.norm() == 0.0);
    CHECK(none.f.norm() == 0.0);
  }

  TEST_CASE("energy densities") {
    const Stiffness C = BulkMaterial::isotropic(2.0, 1.0).C;
    const Voigt3 e(0.1, -0.2, 0.05);
    CHECK(bulk_energy_density(C, e, e) == 0.0);
    CHECK(bulk_energy_density(C, e, Voigt3::Zero()) == doctest::Approx(0.5 * e.dot(C * e)));
    CHECK(interface_energy_density(InterfaceMaterial{0.2, -1.0, 10.0}, 0.01) ==
          doctest::Approx(0.2 - 0.01 + 0.5 * 10 * 1e-4));
  }

  TEST_CASE("Eshelby jump of a strain-free misfitting particle") {
    MaterialSet m;
    m.matrix = m.particle = BulkMaterial::isotropic(3.0, 2.0);
    m.eigenstrain = dilatational(0.01);
    const Eigen::Matrix2d Z = Eigen::Matrix2d::Zero();
    // Unrelaxed particle: w = 1/2 e*.C e*, sigma = -C e*, H = 0.
    const double w = 0.5 * m.eigenstrain.dot(m.particle.C * m.eigenstrain);
    CHECK(eshelby_jump(Z, Z, m, Vec2(1, 0)) == doctest::Approx(-w));
    CHECK(configurational_speed(0.3, 0.5, 2.0, 0.1) == doctest::Approx(0.3 - 1.0 + 0.1));
  }

  TEST_CASE("Eshelby jump is uniform around a circular inclusion") {
    // Oracle fields substituted into n.[[Sigma]].n at many angles.
    const CircularInclusionOracle o = oracle_solve(InclusionParams{});
    const MaterialSet m = o.materials();
    const double R = o.p.radius;
    double first = 0.0;
    for (int k = 0; k < 24; ++k) {
      const double th = 2 * std::numbers::pi * k / 24;
      const Vec2 n(std::cos(th), std::sin(th));
      const double j = eshelby_jump(o.gradient((R - 1e-9) * n), o.gradient((R + 1e-9) * n), m, n);
      if (k == 0) first = j;
      CHECK(j == doctest::Approx(first).epsilon(1e-9));
    }
    CHECK(first != 0.0);
  }
}
