#ifndef QUBITIZER_H
#define QUBITIZER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit codes.
 */
#define QBZ_OK 0

#define QBZ_ERR_VERIFICATION 1

#define QBZ_ERR_SPEC 2

#define QBZ_ERR_ARGUMENT 3

/**
 * Queries a spec can be lowered into.
 */
typedef enum QbzQuery {
  QbzQuery_Hs = 0,
  QbzQuery_Be = 1,
  QbzQuery_Measure = 2,
  QbzQuery_Walk = 3,
} QbzQuery;

/**
 * Opaque parsed spec handle.
 */
typedef struct QbzSpec QbzSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static string; do not free.
 */
const char *qbz_version(void);

/**
 * Message of the most recent failure on this thread; valid until the
 * next failing call. Do not free.
 */
const char *qbz_last_error(void);

/**
 * Parses a JSON matrix spec. Returns NULL on error (see
 * [`qbz_last_error`]). Free with [`qbz_spec_free`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated UTF-8 string.
 */
struct QbzSpec *qbz_spec_parse(const char *json);

/**
 * Releases a spec handle. NULL is a no-op.
 *
 * # Safety
 * `spec` must have come from [`qbz_spec_parse`] and not be freed twice.
 */
void qbz_spec_free(struct QbzSpec *spec);

/**
 * Dimension of the matrix a spec describes; 0 for NULL.
 *
 * # Safety
 * `spec` must be a live handle from [`qbz_spec_parse`] or NULL.
 */
uint64_t qbz_spec_dimension(const struct QbzSpec *spec);

/**
 * Builds a query circuit. On success writes the circuit text (macro
 * free, `.qbc` format) to `circuit_out` and the JSON report to
 * `report_out`; both are optional and freed with [`qbz_string_free`].
 *
 * # Safety
 * `spec` must be a live handle; output pointers must be valid or NULL.
 */
int32_t qbz_build(const struct QbzSpec *spec,
                  enum QbzQuery query,
                  double t,
                  uint32_t steps,
                  uint32_t order,
                  char **circuit_out,
                  char **report_out);

/**
 * Verifies a query against the dense reference. Returns `QBZ_OK` when
 * the deviation is within tolerance, `QBZ_ERR_VERIFICATION` when not,
 * `QBZ_ERR_SPEC` when the spec cannot be built. A negative tolerance
 * selects the default, zero demands exactness (the forced-failure
 * path); the JSON report lands in `report_out` when non-NULL.
 *
 * # Safety
 * `spec` must be a live handle; `report_out` must be valid or NULL.
 */
int32_t qbz_verify(const struct QbzSpec *spec,
                   enum QbzQuery query,
                   double t,
                   uint32_t steps,
                   uint32_t order,
                   double tolerance,
                   uint64_t seed,
                   char **report_out);

/**
 * Number of summands the builder produces for a spec; `as_unitaries`
 * selects the unitary decomposition.
 *
 * # Safety
 * `spec` must be a live handle; `count_out` must be a valid pointer.
 */
int32_t qbz_summand_count(const struct QbzSpec *spec, bool as_unitaries, uint64_t *count_out);

/**
 * Sampling and Trotter bounds report (JSON) for a Hermitian spec;
 * `shots > 0` adds a seeded Monte-Carlo section.
 *
 * # Safety
 * `spec` must be a live handle; `report_out` must be a valid pointer.
 */
int32_t qbz_bounds(const struct QbzSpec *spec, uint64_t shots, uint64_t seed, char **report_out);

/**
 * Frees a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `text` must have been returned by this library and not freed twice.
 */
void qbz_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUBITIZER_H */
