#include "doctest.h"

#include "smxfem/config.hpp"

#include <filesystem>
#include <string>

using namespace smx;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty document gives the defaults") {
    const RunConfig c = parse_config("{}");
    CHECK_FALSE(c.mode.has_value());
    CHECK(c.mesh.nx == 50);
    CHECK(c.particles.size() == 1u);
    CHECK(c.materials.matrix.C == BulkMaterial::isotropic(58.17, 26.13).C);
    CHECK(c.solver == SolverKind::Direct);
    CHECK_NOTHROW(c.validate());
    CHECK(c.hash == fnv1a("{}"));
  }

  TEST_CASE("full document") {
    const RunConfig c = parse_config(R"(
mode: evolve
mesh: {min: [-3, -3], max: [3, 3], nx: 40, ny: 40}
particles:
  - {center: [0, 0], radius: 1}
materials:
  matrix: {C11: 246.5, C12: 147.3, C44: 124.7}
  alpha: 1.4
  eigenstrain: 0.003
  interface: {gamma0: 0.02, tau: 0, stiffness: 0}
smoothing: {standard: [1, 1], enriched: [2, 2]}
solver: cg
evolution: {max_steps: 7, side_gradient: cells, characteristic_length: 10}
output: {directory: res, contour_period: 2}
threads: 2
)");
    REQUIRE(c.mode.has_value());
    CHECK(*c.mode == RunMode::Evolve);
    CHECK(c.mesh.nx == 40);
    CHECK(c.mesh.min == Vec2(-3, -3));
    CHECK(c.particles.front().radius == 1.0);
    CHECK_FALSE(c.materials.isotropic);
    CHECK(c.materials.matrix.C(2, 2) == 124.7);
    CHECK(c.materials.alpha == 1.4);
    CHECK(c.solver == SolverKind::ConjugateGradient);
    CHECK(c.evolution.options.max_steps == 7);
    CHECK(c.evolution.options.side_gradient == SideGradient::Cells);
    CHECK(c.evolution.characteristic_length == 10.0);
    CHECK(c.output.directory == "res");
    CHECK(c.threads == 2);
    CHECK_NOTHROW(c.validate());
    CHECK(c.material_set().particle.C.isApprox(1.4 * c.material_set().matrix.C));
  }

  TEST_CASE("unknown keys are reported with their position") {
    const std::string msg = config_error("mesh:\n  nx: 10\n  nz: 4\n");
    CHECK(msg.find("t.yaml:3:") != std::string::npos);
    CHECK(msg.find("nz") != std::string::npos);
    CHECK(msg.find("nx") != std::string::npos);  // allowed keys listed
  }

  TEST_CASE("type and value errors") {
    CHECK(config_error("mesh: {nx: ten}").find("t.yaml:1:") != std::string::npos);
    CHECK_FALSE(config_error("solver: lu").empty());
    CHECK_FALSE(config_error("mode: fly").empty());
    CHECK_FALSE(config_error("particles: [{center: [0], radius: 1}]").empty());
    CHECK_FALSE(config_error("mesh: [").empty());
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(parse_config("mode: evolve\nparticles: []\n").validate(), Error);
    CHECK_THROWS_AS(parse_config("mode: verify\nmaterials: {matrix: {C11: 246.5, C12: 147.3, C44: 124.7}}").validate(),
                    Error);
    CHECK_THROWS_AS(parse_config("mode: verify\nmaterials: {alpha: 2}").validate(), Error);
    CHECK_THROWS_AS(parse_config("mode: converge\nstudy: {sizes: [10, 20]}").validate(), Error);
    CHECK_THROWS_AS(parse_config("mode: timing\nstudy: {sizes: [10, 20, 40]}").validate(), Error);
    CHECK_THROWS_AS(parse_config("mesh: {nx: 0}").validate(), Error);
    CHECK_NOTHROW(parse_config("mode: verify").validate());
  }

  TEST_CASE("mode names round trip") {
    for (RunMode m : {RunMode::Solve, RunMode::Verify, RunMode::Converge, RunMode::Timing, RunMode::Evolve})
      CHECK(parse_mode(mode_name(m)) == m);
    CHECK_THROWS_AS(parse_mode("nope"), Error);
  }

  TEST_CASE("hash") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(hex_hash(0xabcull) == "0000000000000abc");
  }

  TEST_CASE("shipped configs load and validate") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SMX_CONFIG_DIR)) {
      if (entry.path().extension() != ".yaml") continue;
      CAPTURE(entry.path().string());
      const RunConfig c = load_config(entry.path().string());
      CHECK(c.mode.has_value());
      CHECK_NOTHROW(c.validate());
      ++count;
    }
    CHECK(count >= 5);
  }
}
