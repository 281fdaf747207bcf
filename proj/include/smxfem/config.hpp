#pragma once

#include "smxfem/evolution.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smx {

enum class RunMode { Solve, Verify, Converge, Timing, Evolve };

RunMode parse_mode(const std::string& name);
const char* mode_name(RunMode mode);

struct MeshConfig {
  Vec2 min = Vec2(-7.5, -7.5);
  Vec2 max = Vec2(7.5, 7.5);
  int nx = 50;
  int ny = 50;
};

struct MaterialConfig {
  BulkMaterial matrix = BulkMaterial::isotropic(58.17, 26.13);
  bool isotropic = true;
  double lambda = 58.17, mu = 26.13;  // meaningful when isotropic
  double alpha = 1.0;
  double eigenstrain = 0.01;
  InterfaceMaterial interface{0.0, -1.0, 10.0};
};

struct StudyConfig {
  std::vector<int> sizes{20, 40, 80, 160};
  int repeats = 3;
};

struct ProfileConfig {
  int samples = 50;
  double angle = 0.0;
  double r_max = 0.0;  // 0: up to the nearest domain edge
};

struct EvolutionConfig {
  EvolutionOptions options;
  /// Overrides the value computed from gamma0 and the initial radius.
  std::optional<double> characteristic_length;
};

struct OutputConfig {
  std::string directory = "out";
  int snapshot_period = 0;  // evolve: VTK every k steps, 0 = first and last only
  int contour_period = 10;  // evolve: contour CSV every k steps
  bool matrix_market = false;
};

/// Everything a run needs. Lengths in nm, stresses in GPa, interface
/// constants in N/m (= J/m^2).
struct RunConfig {
  std::optional<RunMode> mode;
  MeshConfig mesh;
  std::vector<Circle> particles{Circle{Vec2::Zero(), 5.0}};
  MaterialConfig materials;
  SmoothingOptions smoothing;
  SolverKind solver = SolverKind::Direct;
  Vec2 body_force = Vec2::Zero();
  StudyConfig study;
  ProfileConfig profile;
  EvolutionConfig evolution;
  OutputConfig output;
  int threads = 1;
  /// FNV-1a of the source text, written into every CSV header.
  std::uint64_t hash = 0;

  MaterialSet material_set() const;
  /// Throws Error(Config) on inconsistent values.
  void validate() const;
};

/// Parses YAML text. Errors carry the line and column of the offending node
/// and name unknown keys.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a(const std::string& text);
std::string hex_hash(std::uint64_t h);

}  // namespace smx
