#ifndef JANUS_H
#define JANUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JanusDrift {
  JANUS_DRIFT_ALONG_PORT = 0,
  JANUS_DRIFT_AGAINST_PORT = 1,
} JanusDrift;

typedef enum JanusStatus {
  JANUS_STATUS_OK = 0,
  JANUS_STATUS_NULL_POINTER = 1,
  JANUS_STATUS_UTF8 = 2,
  JANUS_STATUS_PARSE = 3,
  JANUS_STATUS_INVALID_CONFIG = 4,
  JANUS_STATUS_LAYERS = 5,
  JANUS_STATUS_DOMAIN = 6,
  JANUS_STATUS_JSON = 7,
  JANUS_STATUS_MISSING = 8,
  JANUS_STATUS_PANIC = 99,
} JanusStatus;

/**
 * A configuration: a circle of named vertices.
 */
typedef struct JanusConfig JanusConfig;

/**
 * A dynamics together with its rule conventions.
 */
typedef struct JanusDynamics JanusDynamics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *janus_last_error(void);

/**
 * Seeded random configuration. `one_of_each` requires at least one
 * layer-1 particle on each port.
 */
enum JanusStatus janus_config_random(size_t size,
                                     size_t layers,
                                     double density,
                                     uint64_t seed,
                                     bool one_of_each,
                                     struct JanusConfig **out);

enum JanusStatus janus_config_from_json(const char *json, struct JanusConfig **out);

/**
 * Writes a newly allocated JSON string; release it with `janus_string_free`.
 */
enum JanusStatus janus_config_to_json(const struct JanusConfig *cfg, char **out);

enum JanusStatus janus_config_clone(const struct JanusConfig *cfg, struct JanusConfig **out);

enum JanusStatus janus_config_len(const struct JanusConfig *cfg, size_t *out);

enum JanusStatus janus_config_layers(const struct JanusConfig *cfg, size_t *out);

/**
 * Port bit masks of vertex `index`; bit `j-1` is layer `j`.
 */
enum JanusStatus janus_config_bits(const struct JanusConfig *cfg,
                                   size_t index,
                                   uint8_t *a,
                                   uint8_t *b);

/**
 * Whether two configurations are the same named graph up to rotation.
 */
enum JanusStatus janus_config_equal(const struct JanusConfig *x,
                                    const struct JanusConfig *y,
                                    bool *out);

void janus_config_free(struct JanusConfig *cfg);

/**
 * Parses a dynamics such as `"sqrt_tau,I"` with default rules.
 */
enum JanusStatus janus_dynamics_parse(const char *spec, struct JanusDynamics **out);

enum JanusStatus janus_dynamics_inverse(const struct JanusDynamics *d, struct JanusDynamics **out);

enum JanusStatus janus_dynamics_set_drift(struct JanusDynamics *d, enum JanusDrift drift);

void janus_dynamics_free(struct JanusDynamics *d);

/**
 * Applies `d` `steps` times to `cfg` and returns a new configuration.
 */
enum JanusStatus janus_apply(const struct JanusDynamics *d,
                             const struct JanusConfig *cfg,
                             size_t steps,
                             struct JanusConfig **out);

/**
 * Measures an observable key such as `"S_global"` or `"S_local_avg_r5"`.
 * Returns `Missing` when the value is undefined (e.g. `d_f` without patterns).
 */
enum JanusStatus janus_measure(const struct JanusConfig *cfg, const char *key, double *out);

void janus_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JANUS_H */
