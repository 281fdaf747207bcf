#pragma once

#include "smxfem/config.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace smx {

struct RunResult {
  RunMode mode = RunMode::Solve;
  std::map<std::string, double> scalars;
  std::vector<std::string> files;  // written artifacts, relative to the output directory
  std::string summary;             // "key = value" lines, also written to summary.txt
};

/// Runs one mode and writes its artifacts under out_dir (created if
/// missing). Progress lines go to `log` when given; the same lines are
/// written to run.log.
RunResult run(RunMode mode, const RunConfig& config, const std::string& out_dir, std::ostream* log = nullptr);

/// Dimensionless shape problem equivalent to an evolve config: lengths in
/// units of the effective radius R0, stresses in units of the particle C44.
struct ShapeSetup {
  EvolutionProblem problem;
  LevelSetField initial;
  double r0 = 0.0;
  double characteristic_length = 0.0;
};
ShapeSetup shape_setup(const RunConfig& config);

}  // namespace smx
