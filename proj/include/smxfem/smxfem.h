#ifndef SMXFEM_H
#define SMXFEM_H

/* C interface of the smxfem library. Every call returns a status code; on
 * failure smx_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Handles are opaque and owned by the
 * caller, who releases them with the matching *_free function. */

#include <stddef.h>

#if defined(_WIN32)
#define SMX_API __declspec(dllexport)
#else
#define SMX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smx_status {
  SMX_OK = 0,
  SMX_ERR_INVALID_ARGUMENT = 1,
  SMX_ERR_GEOMETRY = 2,
  SMX_ERR_SINGULAR = 3,
  SMX_ERR_CONFIG = 4,
  SMX_ERR_IO = 5,
  SMX_ERR_RUNTIME = 6,
  SMX_ERR_INTERNAL = 7
} smx_status;

typedef struct smx_config smx_config;
typedef struct smx_result smx_result;
typedef struct smx_solution smx_solution;

SMX_API const char* smx_version(void);
SMX_API const char* smx_last_error(void);
SMX_API const char* smx_status_name(smx_status status);

/* Configuration (YAML). */
SMX_API smx_status smx_config_load(const char* path, smx_config** out);
SMX_API smx_status smx_config_parse(const char* text, smx_config** out);
SMX_API smx_status smx_config_set_threads(smx_config* config, int threads);
/* Mode named in the config file, or NULL through *mode when absent. */
SMX_API smx_status smx_config_mode(const smx_config* config, const char** mode);
SMX_API void smx_config_free(smx_config* config);

/* Runs one of "solve", "verify", "converge", "timing", "evolve"; mode may be
 * NULL to use the config's mode. Artifacts go to out_dir (NULL: the config's
 * output directory). When echo is nonzero, progress lines go to stdout. */
SMX_API smx_status smx_run(const smx_config* config, const char* mode, const char* out_dir, int echo,
                           smx_result** out);
SMX_API smx_status smx_result_scalar(const smx_result* result, const char* key, double* value);
SMX_API smx_status smx_result_summary(const smx_result* result, const char** text);
/* Artifact names, relative to the output directory. */
SMX_API size_t smx_result_file_count(const smx_result* result);
SMX_API const char* smx_result_file(const smx_result* result, size_t index);
SMX_API void smx_result_free(smx_result* result);

/* Single elasticity solve of the config's problem (mesh, particles,
 * materials, clamped boundary) kept in memory for queries. */
SMX_API smx_status smx_solve(const smx_config* config, smx_solution** out);
SMX_API smx_status smx_solution_displacement(const smx_solution* solution, double x, double y, double* ux,
                                             double* uy);
/* Energies: bulk, interface, external work term and total. */
SMX_API smx_status smx_solution_energy(const smx_solution* solution, double* bulk, double* interface_energy,
                                       double* external_work, double* total);
SMX_API smx_status smx_solution_dofs(const smx_solution* solution, size_t* dofs);
SMX_API void smx_solution_free(smx_solution* solution);

/* Circular inclusion oracle: radial displacement at radius r. */
SMX_API smx_status smx_oracle_radial_displacement(double radius, double lambda, double mu, double eigenstrain,
                                                  double tau, double stiffness, double r, double* u_r);

#ifdef __cplusplus
}
#endif

#endif
