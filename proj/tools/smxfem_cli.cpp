// Command-line front end; talks to the library through the C API only.
#include "smxfem/smxfem.h"

#include "CLI11.hpp"

#include <cstdio>
#include <string>

namespace {

int report(smx_status s, const char* what) {
  std::fprintf(stderr, "smxfem: %s failed (%s): %s\n", what, smx_status_name(s), smx_last_error());
  return static_cast<int>(s) + 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed XFEM solver for misfitting inclusions with interface stress and shape evolution"};
  app.set_version_flag("--version", smx_version());
  std::string mode, config_path, out_dir;
  int threads = 0;
  app.add_option("mode", mode, "solve | verify | converge | timing | evolve")
      ->required()
      ->check(CLI::IsMember({"solve", "verify", "converge", "timing", "evolve"}));
  app.add_option("--config,-c", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out,-o", out_dir, "output directory (default: output.directory from the config)");
  app.add_option("--threads,-t", threads, "worker threads (default: config value)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  smx_config* config = nullptr;
  if (smx_status s = smx_config_load(config_path.c_str(), &config); s != SMX_OK) return report(s, "reading config");
  if (threads > 0) smx_config_set_threads(config, threads);

  smx_result* result = nullptr;
  const smx_status s = smx_run(config, mode.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), 1, &result);
  smx_config_free(config);
  if (s != SMX_OK) return report(s, mode.c_str());
  const char* summary = nullptr;
  smx_result_summary(result, &summary);
  std::fputs(summary, stdout);
  smx_result_free(result);
  return 0;
}
