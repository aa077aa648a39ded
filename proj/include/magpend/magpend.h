/* C interface to the magnetically actuated inverted-pendulum toolkit.
 *
 * All entry points return a magpend_status; MAGPEND_OK is 0. On any error the
 * message is retrievable with magpend_last_error() (thread-local storage).
 * Handles are opaque and must be released with their matching free function.
 */
#ifndef MAGPEND_MAGPEND_H
#define MAGPEND_MAGPEND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MAGPEND_API __declspec(dllexport)
#else
#define MAGPEND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum magpend_status {
    MAGPEND_OK = 0,
    MAGPEND_ERR_INVALID_ARGUMENT = 1,
    MAGPEND_ERR_IO = 2,
    MAGPEND_ERR_NUMERICAL = 3,
    MAGPEND_ERR_DIVERGED = 4,
    MAGPEND_ERR_INTERNAL = 5
} magpend_status;

typedef struct magpend_config magpend_config;

MAGPEND_API const char* magpend_version(void);

/* Message of the most recent error on this thread; never NULL. */
MAGPEND_API const char* magpend_last_error(void);

/* Built-in defaults (desk-scale plant, synthetic actuation matrix). */
MAGPEND_API magpend_status magpend_config_default(magpend_config** out);

/* Parse a "[section] key = value" config file; unspecified keys fall back to
 * the defaults. */
MAGPEND_API magpend_status magpend_config_load(const char* path, magpend_config** out);

/* Override a single value, e.g. magpend_config_set(c, "sim", "xi", "0.0175"). */
MAGPEND_API magpend_status magpend_config_set(magpend_config* cfg, const char* section,
                                              const char* key, const char* value);

MAGPEND_API void magpend_config_free(magpend_config* cfg);

/* Stabilization run; writes trace.csv into out_dir. */
MAGPEND_API magpend_status magpend_run_balance(const magpend_config* cfg, uint64_t seed,
                                               const char* out_dir);

/* Frequency-domain identification of the detached actuator; writes frf.csv,
 * sysid_fit.csv and per-realization records into out_dir. */
MAGPEND_API magpend_status magpend_run_sysid(const magpend_config* cfg, uint64_t seed,
                                             const char* out_dir);

/* Iterative learning session; writes per-iteration traces, corrections and
 * ilc_summary.csv into out_dir. */
MAGPEND_API magpend_status magpend_run_ilc(const magpend_config* cfg, uint64_t seed,
                                           const char* out_dir);

/* Steady-state disturbance maps for unit misalignment/input offsets. Writes a
 * human-readable report into buf (truncated to buf_len, always terminated)
 * and steady_state.csv into out_dir when out_dir is non-NULL and non-empty. */
MAGPEND_API magpend_status magpend_steady_state_report(const magpend_config* cfg,
                                                       const char* out_dir, char* buf,
                                                       size_t buf_len);

#ifdef __cplusplus
}
#endif

#endif /* MAGPEND_MAGPEND_H */
