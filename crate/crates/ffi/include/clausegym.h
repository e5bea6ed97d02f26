#ifndef CLAUSEGYM_H
#define CLAUSEGYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_ARGUMENT = 1,
  CG_STATUS_INVALID_UTF8 = 2,
  CG_STATUS_IO = 3,
  CG_STATUS_INVALID_CONFIG = 4,
  CG_STATUS_UNKNOWN_PROBLEM = 5,
  CG_STATUS_PARSE_ERROR = 6,
  CG_STATUS_BAD_STATE = 7,
  CG_STATUS_INVALID_ACTION = 8,
  CG_STATUS_ENV_ERROR = 9,
  CG_STATUS_PANIC = 10,
} CgStatus;

/**
 * Opaque environment handle.
 */
typedef struct CgEnv CgEnv;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an environment over every `*.p` file in `dir`. `include_root` may
 * be null, in which case includes resolve against `dir`.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum CgStatus cg_env_from_dir(const char *dir,
                              const char *include_root,
                              size_t step_limit,
                              size_t max_clauses,
                              uint64_t seed,
                              struct CgEnv **out);

/**
 * Creates an environment holding a single problem given as TPTP text.
 * Includes are not available.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum CgStatus cg_env_from_text(const char *problem_id,
                               const char *text,
                               size_t step_limit,
                               size_t max_clauses,
                               uint64_t seed,
                               struct CgEnv **out);

/**
 * Starts an episode. `problem` may be null for a seeded random choice. On
 * success `*observation_json` receives the observation.
 *
 * # Safety
 * `env` must come from a constructor here; `observation_json` must be writable.
 */
enum CgStatus cg_env_reset(struct CgEnv *env, const char *problem, char **observation_json);

/**
 * Processes clause `action`. On success `*result_json` receives an object
 * with `observation`, `reward`, `terminated`, `truncated` and `info`.
 *
 * # Safety
 * `env` must come from a constructor here; `result_json` must be writable.
 */
enum CgStatus cg_env_step(struct CgEnv *env, size_t action, char **result_json);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *cg_last_error(void);

/**
 * # Safety
 * `env` must be null or a handle not yet freed.
 */
void cg_env_free(struct CgEnv *env);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void cg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLAUSEGYM_H */
