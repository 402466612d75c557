#ifndef ONTOCA_H
#define ONTOCA_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum OntocaStatus {
  ONTOCA_STATUS_OK = 0,
  ONTOCA_STATUS_NULL_POINTER = 1,
  ONTOCA_STATUS_INVALID_ARGUMENT = 2,
  ONTOCA_STATUS_SYMMETRY_VIOLATION = 3,
  ONTOCA_STATUS_DIMENSION_MISMATCH = 4,
  ONTOCA_STATUS_OUT_OF_RANGE = 5,
  ONTOCA_STATUS_OVERFLOW = 6,
  ONTOCA_STATUS_UNKNOWN_PRESET = 7,
  ONTOCA_STATUS_INVALID_TOPOLOGY = 8,
  ONTOCA_STATUS_PANIC = 9,
  ONTOCA_STATUS_INTERNAL = 10,
} OntocaStatus;

/**
 * Integer Hamiltonian `H = S + iA`.
 */
typedef struct OntocaModel OntocaModel;

/**
 * Phased permutation on bit-packed spin configurations.
 */
typedef struct OntocaPermutation OntocaPermutation;

/**
 * Stored trajectory `psi_0 .. psi_{steps+1}`.
 */
typedef struct OntocaTrajectory OntocaTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *ontoca_last_error(void);

/**
 * Builds `H = S + iA` from row-major `dim x dim` arrays; `a` may be null
 * for a real symmetric model.
 *
 * # Safety
 * `s` (and `a` if non-null) must point to `dim * dim` readable values.
 */
enum OntocaStatus ontoca_model_new(size_t dim,
                                   const int64_t *s,
                                   const int64_t *a,
                                   struct OntocaModel **out);

/**
 * Named preset: `H2`, `H3` or `H4`.
 *
 * # Safety
 * `name` must be a NUL-terminated string.
 */
enum OntocaStatus ontoca_model_preset(const char *name, struct OntocaModel **out);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum OntocaStatus ontoca_model_dim(const struct OntocaModel *model, size_t *out);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void ontoca_model_free(struct OntocaModel *model);

/**
 * Iterates `psi_{n+1} = psi_{n-1} - iH psi_n` for `steps` steps from
 * `(psi_0, psi_1)`, each given as `2 * dim` interleaved values.
 *
 * # Safety
 * `model` must be a live handle; `psi0` and `psi1` must each point to
 * `2 * dim` readable values.
 */
enum OntocaStatus ontoca_evolve(const struct OntocaModel *model,
                                const int64_t *psi0,
                                const int64_t *psi1,
                                size_t steps,
                                struct OntocaTrajectory **out);

/**
 * Number of stored states, `steps + 2`.
 *
 * # Safety
 * `traj` must be a live handle.
 */
enum OntocaStatus ontoca_trajectory_len(const struct OntocaTrajectory *traj, size_t *out);

/**
 * Component `alpha` of `psi_n`. Fails with `Overflow` when either part
 * does not fit in 64 bits; use [`ontoca_trajectory_component_string`].
 *
 * # Safety
 * `traj` must be a live handle.
 */
enum OntocaStatus ontoca_trajectory_component(const struct OntocaTrajectory *traj,
                                              size_t n,
                                              size_t alpha,
                                              int64_t *re,
                                              int64_t *im);

/**
 * Component `alpha` of `psi_n` as text such as `1-i` or `-3i`. Release
 * the string with [`ontoca_string_free`].
 *
 * # Safety
 * `traj` must be a live handle.
 */
enum OntocaStatus ontoca_trajectory_component_string(const struct OntocaTrajectory *traj,
                                                     size_t n,
                                                     size_t alpha,
                                                     char **out);

/**
 * Whether the two-time correlation is the same for every stored pair.
 *
 * # Safety
 * `traj` must be a live handle.
 */
enum OntocaStatus ontoca_trajectory_correlation_conserved(const struct OntocaTrajectory *traj,
                                                          bool *out);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void ontoca_trajectory_free(struct OntocaTrajectory *traj);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ontoca_string_free(char *s);

/**
 * Model B transfer matrix for the graph with `n_edges` edges given as
 * `2 * n_edges` vertex indices `(i, j)`, `i < j`.
 *
 * # Safety
 * `edges` must point to `2 * n_edges` readable values.
 */
enum OntocaStatus ontoca_model_b_new(size_t n_vertices,
                                     const size_t *edges,
                                     size_t n_edges,
                                     struct OntocaPermutation **out);

/**
 * Number of basis states, `2^(N + E)`.
 *
 * # Safety
 * `perm` must be a live handle.
 */
enum OntocaStatus ontoca_permutation_dim(const struct OntocaPermutation *perm, size_t *out);

/**
 * Image of basis state `x`: target index and phase exponent `k` (the
 * amplitude is `i^k`).
 *
 * # Safety
 * `perm` must be a live handle.
 */
enum OntocaStatus ontoca_permutation_apply(const struct OntocaPermutation *perm,
                                           size_t x,
                                           size_t *target,
                                           uint8_t *phase);

/**
 * # Safety
 * `perm` must be null or a handle not yet freed.
 */
void ontoca_permutation_free(struct OntocaPermutation *perm);

/**
 * Smallest position spread allowed by the deformed uncertainty bound at
 * discreteness scale `l`.
 *
 * # Safety
 * `out` must be writable.
 */
enum OntocaStatus ontoca_gup_bound_min_dx(double scale, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTOCA_H */
