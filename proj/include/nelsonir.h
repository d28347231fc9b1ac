#ifndef NELSONIR_H
#define NELSONIR_H

/* C interface to the infrared-regular Nelson model laboratory.
 *
 * All functions return a status code; on failure the thread-local message
 * from nelsonir_last_error() describes the problem. Configurations are
 * opaque handles created and destroyed through this interface. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NELSONIR_OK = 0,
  NELSONIR_ERR_INVALID = 1, /* bad arguments or config validation failure */
  NELSONIR_ERR_RUNTIME = 2, /* solver / sampler failure */
  NELSONIR_ERR_IO = 3       /* file system failure */
} nelsonir_status;

typedef struct nelsonir_config nelsonir_config;

const char* nelsonir_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* nelsonir_last_error(void);

/* Configuration with all defaults. */
nelsonir_status nelsonir_config_create(nelsonir_config** out);

/* Parse an INI config from a file or from memory; unknown keys are errors. */
nelsonir_status nelsonir_config_load(const char* path, nelsonir_config** out);
nelsonir_status nelsonir_config_parse(const char* text, nelsonir_config** out);

/* Override one value, key written as "section.key" (e.g. "model.e"). */
nelsonir_status nelsonir_config_set(nelsonir_config* cfg, const char* key,
                                    const char* value);

/* Canonical INI text. Writes up to buflen bytes including the terminating
 * NUL; *needed receives the full length including the NUL. Call with
 * buf == NULL to query the size. */
nelsonir_status nelsonir_config_serialize(const nelsonir_config* cfg, char* buf,
                                          size_t buflen, size_t* needed);

nelsonir_status nelsonir_config_hash(const nelsonir_config* cfg, uint64_t* out);

void nelsonir_config_free(nelsonir_config* cfg);

/* Execute one experiment. Subcommands: kernels, minimizer, particle, field,
 * gibbs, overlap, fock, scan. threads > 0 caps chain parallelism; 0 means
 * the configured chain count. Writes CSV tables plus manifest.txt into
 * out_dir. */
nelsonir_status nelsonir_run(const nelsonir_config* cfg, const char* subcommand,
                             const char* out_dir, int threads);

/* Direct kernel evaluators (Gaussian form factor of charge e, width lambda).
 * ir is one of "zero", "unit", "bump". */
nelsonir_status nelsonir_pair_potential(double e, double lambda, double r,
                                        double tau, double* out);
nelsonir_status nelsonir_classical_minimizer(double e, double lambda, double r,
                                             double* out);
nelsonir_status nelsonir_van_hove(double e, double lambda, const char* ir,
                                  double kappa, double k_min, double k_max,
                                  int n_shells, int n_dirs, double qx, double qy,
                                  double qz, double* e0, double* n_mean);

#ifdef __cplusplus
}
#endif

#endif
