/* Copyright dwlab contributors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the dwlab experiment runner. All functions return 0 on
 * success; nonzero codes match the CLI exit codes (2 validation failure,
 * 3 numerical-stage failure). On failure dwlab_last_error() holds a
 * message until the next call on the same thread.
 */

#ifndef DWLAB_H
#define DWLAB_H

#ifdef __cplusplus
extern "C"
{
#endif

typedef struct dwlab_config dwlab_config;

#define DWLAB_OK 0
#define DWLAB_ERR_VALIDATION 2
#define DWLAB_ERR_NUMERICAL 3

/* Load and validate a JSON config; *out is NULL on failure. */
int dwlab_config_load(const char *path, dwlab_config **out);
void dwlab_config_free(dwlab_config *cfg);

/* CLI-style overrides applied after loading. */
void dwlab_config_set_seed(dwlab_config *cfg, unsigned long seed);
void dwlab_config_set_out_dir(dwlab_config *cfg, const char *dir);
void dwlab_config_set_threads(dwlab_config *cfg, int threads);

/* Override the experiment selected in the config file (CLI subcommand). */
int dwlab_config_set_experiment(dwlab_config *cfg, const char *name);

/* Run the experiment; artifacts land in the configured output directory. */
int dwlab_run(const dwlab_config *cfg);

const char *dwlab_last_error(void);
const char *dwlab_version(void);

/* Default config as pretty JSON; returns the full length (excluding the
 * terminator) and copies up to cap-1 bytes into buf when buf != NULL. */
int dwlab_default_config(char *buf, int cap);

#ifdef __cplusplus
}
#endif

#endif /* DWLAB_H */
