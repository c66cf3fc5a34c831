#ifndef SPECTRAL_COMPLEXITY_H
#define SPECTRAL_COMPLEXITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Degree reported when the hierarchy hit its depth limit.
 */
#define SPC_NOT_TERMINATED -1

/**
 * Result code of every fallible call.
 */
typedef enum SpcStatus {
  SPC_STATUS_OK = 0,
  SPC_STATUS_NULL_POINTER = 1,
  SPC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input could not be parsed.
   */
  SPC_STATUS_PARSE = 3,
  /**
   * Sequence is not strictly increasing, too short or out of domain.
   */
  SPC_STATUS_SEQUENCE = 4,
  /**
   * Numerical failure: non-convergence, tracking loss, quadrature.
   */
  SPC_STATUS_NUMERIC = 5,
  SPC_STATUS_IO = 6,
  /**
   * Caller buffer is too small; the required length was written.
   */
  SPC_STATUS_BUFFER_TOO_SMALL = 7,
  SPC_STATUS_PANIC = 99,
} SpcStatus;

/**
 * Counting model used for unfolding.
 */
typedef enum SpcModelKind {
  SPC_MODEL_KIND_RIEMANN_VON_MANGOLDT = 0,
  /**
   * `L0·k/π + offset`.
   */
  SPC_MODEL_KIND_WEYL_LINEAR = 1,
  SPC_MODEL_KIND_LOCAL_SPACING = 2,
} SpcModelKind;

typedef enum SpcStrategyKind {
  SPC_STRATEGY_KIND_MIDPOINT = 0,
  SPC_STRATEGY_KIND_OPTIMAL_MIDRANGE = 1,
  SPC_STRATEGY_KIND_OPTIMAL_FIRST_ELEMENT = 2,
  SPC_STRATEGY_KIND_OPTIMAL_MEAN = 3,
} SpcStrategyKind;

/**
 * Metric graph with Kirchhoff vertices.
 */
typedef struct SpcGraph SpcGraph;

/**
 * Separating-level hierarchy of an unfolded sequence.
 */
typedef struct SpcHierarchy SpcHierarchy;

/**
 * Validated, strictly increasing eigenvalue sequence.
 */
typedef struct SpcSequence SpcSequence;

typedef struct SpcModel {
  enum SpcModelKind kind;
  double total_length;
  double offset;
} SpcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next `spc_*` call on the same thread.
 */
const char *spc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *spc_version(void);

/**
 * Builds a sequence from `len` strictly increasing finite values.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum SpcStatus spc_sequence_new(const double *values, size_t len, struct SpcSequence **out);

/**
 * Parses a table with one value per line (`#` comments allowed).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SpcStatus spc_sequence_parse(const char *text, struct SpcSequence **out);

/**
 * # Safety
 * `seq` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_sequence_len(const struct SpcSequence *seq, size_t *out);

/**
 * Copies the values into `buf` (capacity `cap`). `written` receives the
 * sequence length even when the buffer is too small.
 *
 * # Safety
 * `seq` must be a live handle; `buf` must hold `cap` doubles.
 */
enum SpcStatus spc_sequence_values(const struct SpcSequence *seq,
                                   double *buf,
                                   size_t cap,
                                   size_t *written);

/**
 * # Safety
 * `seq` must be null or a handle not yet freed.
 */
void spc_sequence_free(struct SpcSequence *seq);

/**
 * Unfolds `seq` with `model` and builds the hierarchy up to `max_depth`
 * separating levels.
 *
 * # Safety
 * `seq` and `model` must be valid pointers; `out` must be writable.
 * `strategy` and `model->kind` must hold declared enumerators.
 */
enum SpcStatus spc_hierarchy_build(const struct SpcSequence *seq,
                                   const struct SpcModel *model,
                                   enum SpcStrategyKind strategy,
                                   size_t max_depth,
                                   struct SpcHierarchy **out);

/**
 * Irregularity degree, or [`SPC_NOT_TERMINATED`].
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_hierarchy_degree(const struct SpcHierarchy *h, int64_t *out);

/**
 * Offset `γ` of the regular level; NaN when the hierarchy did not terminate.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_hierarchy_gamma(const struct SpcHierarchy *h, double *out);

/**
 * Number of levels including the unfolded sequence itself.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_hierarchy_level_count(const struct SpcHierarchy *h, size_t *out);

/**
 * Copies level `j` into `buf`; see [`spc_sequence_values`].
 *
 * # Safety
 * `h` must be a live handle; `buf` must hold `cap` doubles.
 */
enum SpcStatus spc_hierarchy_level_values(const struct SpcHierarchy *h,
                                          size_t j,
                                          double *buf,
                                          size_t cap,
                                          size_t *written);

/**
 * Spread `max δ − min δ` of level `j`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_hierarchy_level_spread(const struct SpcHierarchy *h, size_t j, double *out);

/**
 * JSON summary of the hierarchy. Release with [`spc_string_free`].
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_hierarchy_report_json(const struct SpcHierarchy *h, char **out);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void spc_hierarchy_free(struct SpcHierarchy *h);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void spc_string_free(char *s);

/**
 * Parses a graph spec (`{"vertices": n, "bonds": [{"from", "to",
 * "length"}]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SpcStatus spc_graph_from_json(const char *json, struct SpcGraph **out);

/**
 * Graph with `bond_count` bonds `from[i] – to[i]` of length `lengths[i]`.
 *
 * # Safety
 * The three arrays must each hold `bond_count` elements; `out` must be
 * writable.
 */
enum SpcStatus spc_graph_new(size_t vertex_count,
                             const size_t *from,
                             const size_t *to,
                             const double *lengths,
                             size_t bond_count,
                             struct SpcGraph **out);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_graph_total_length(const struct SpcGraph *g, double *out);

/**
 * Number of eigenvalues in `(0, k]`, counted with multiplicity.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_graph_counting(const struct SpcGraph *g, double k, uint64_t *out);

/**
 * Distinct eigenvalues in `(0, k_max]`. Degenerate values appear once.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum SpcStatus spc_graph_spectrum(const struct SpcGraph *g, double k_max, struct SpcSequence **out);

/**
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void spc_graph_free(struct SpcGraph *g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_COMPLEXITY_H */
