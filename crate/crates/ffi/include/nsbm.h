#ifndef NSBM_H
#define NSBM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NsbmSampler {
  NSBM_SAMPLER_GIBBS = 0,
  NSBM_SAMPLER_COLLAPSED = 1,
  NSBM_SAMPLER_BLOCKED = 2,
  NSBM_SAMPLER_INCOMPATIBLE_BLOCKED = 3,
} NsbmSampler;

/**
 * Result codes.
 */
typedef enum NsbmStatus {
  NSBM_STATUS_OK = 0,
  NSBM_STATUS_NULL_POINTER = 1,
  NSBM_STATUS_INVALID_ARGUMENT = 2,
  NSBM_STATUS_IO = 3,
  NSBM_STATUS_PARSE = 4,
  NSBM_STATUS_BUFFER_TOO_SMALL = 5,
  NSBM_STATUS_INTERNAL = 6,
} NsbmStatus;

/**
 * Opaque network collection.
 */
typedef struct NsbmCollection NsbmCollection;

/**
 * Opaque posterior draws.
 */
typedef struct NsbmSamples NsbmSamples;

/**
 * Sampler settings. Zero `classes` means min(J, 20); zero `communities` means 20.
 */
typedef struct NsbmFitOptions {
  enum NsbmSampler sampler;
  size_t iterations;
  size_t burnin;
  size_t thin;
  uint64_t seed;
  size_t classes;
  size_t communities;
  double alpha;
  double beta;
  double w0;
  double pi0;
  bool random_init;
} NsbmFitOptions;

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *nsbm_last_error(void);

/**
 * Static NUL-terminated version string.
 */
const char *nsbm_version(void);

/**
 * Defaults: collapsed Gibbs, 1000 iterations, burn-in 500, thinning 5,
 * flat priors, warm start.
 */
struct NsbmFitOptions nsbm_fit_options_default(void);

/**
 * Loads an NDJSON network file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NsbmStatus nsbm_collection_load(const char *path, struct NsbmCollection **out);

/**
 * Generates a collection from a JSON generator config.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NsbmStatus nsbm_collection_simulate(const char *config_json,
                                         uint64_t seed,
                                         struct NsbmCollection **out);

/**
 * Number of networks.
 *
 * # Safety
 * `c` must be a live collection handle and `out` a writable pointer.
 */
enum NsbmStatus nsbm_collection_len(const struct NsbmCollection *c, size_t *out);

/**
 * Node count of network `j`.
 *
 * # Safety
 * `c` must be a live collection handle and `out` a writable pointer.
 */
enum NsbmStatus nsbm_collection_nodes(const struct NsbmCollection *c, size_t j, size_t *out);

/**
 * # Safety
 * `c` must be null or a handle from this library that has not been freed.
 */
void nsbm_collection_free(struct NsbmCollection *c);

/**
 * Runs one chain on `c`.
 *
 * # Safety
 * `c` must be a live collection handle, `opts` readable and `out` writable.
 */
enum NsbmStatus nsbm_fit(const struct NsbmCollection *c,
                         const struct NsbmFitOptions *opts,
                         struct NsbmSamples **out);

/**
 * Number of retained draws.
 *
 * # Safety
 * `s` must be a live samples handle and `out` a writable pointer.
 */
enum NsbmStatus nsbm_samples_len(const struct NsbmSamples *s, size_t *out);

/**
 * Copies the class labels of draw `d` into `buf` (capacity `len`).
 *
 * # Safety
 * `s` must be a live samples handle and `buf` writable for `len` elements.
 */
enum NsbmStatus nsbm_samples_draw_z(const struct NsbmSamples *s, size_t d, size_t *buf, size_t len);

/**
 * Copies the minimum-VI class partition into `buf` (capacity `len`).
 *
 * # Safety
 * `s` must be a live samples handle and `buf` writable for `len` elements.
 */
enum NsbmStatus nsbm_samples_summarize_z(const struct NsbmSamples *s, size_t *buf, size_t len);

/**
 * Copies the minimum-VI community partition of network `j` into `buf`.
 *
 * # Safety
 * `s` must be a live samples handle and `buf` writable for `len` elements.
 */
enum NsbmStatus nsbm_samples_summarize_xi(const struct NsbmSamples *s,
                                          size_t j,
                                          size_t *buf,
                                          size_t len);

/**
 * # Safety
 * `s` must be null or a handle from this library that has not been freed.
 */
void nsbm_samples_free(struct NsbmSamples *s);

/**
 * Normalized mutual information of two partitions of length `len`.
 *
 * # Safety
 * `a` and `b` must be readable for `len` elements and `out` writable.
 */
enum NsbmStatus nsbm_nmi(const size_t *a, const size_t *b, size_t len, double *out);

#endif  /* NSBM_H */
