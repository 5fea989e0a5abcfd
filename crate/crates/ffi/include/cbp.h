#ifndef CBP_H
#define CBP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum CbpStatus {
  CBP_STATUS_OK = 0,
  /**
   * Out-of-range or inconsistent argument.
   */
  CBP_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A required pointer was null.
   */
  CBP_STATUS_NULL_POINTER = 2,
  /**
   * A buffer length does not match the object.
   */
  CBP_STATUS_LENGTH_MISMATCH = 3,
  /**
   * The exact oracle refused a graph above its size budget.
   */
  CBP_STATUS_ORACLE_BUDGET = 4,
  /**
   * Non-finite message or diverging training.
   */
  CBP_STATUS_NUMERIC = 5,
  /**
   * File could not be read or parsed.
   */
  CBP_STATUS_IO = 6,
  /**
   * Internal panic; the library state is unchanged.
   */
  CBP_STATUS_INTERNAL = 7,
} CbpStatus;

typedef enum CbpMode {
  CBP_MODE_BP = 0,
  CBP_MODE_CBP = 1,
  CBP_MODE_MEAN_FIELD = 2,
} CbpMode;

/**
 * Opaque per-edge couplings, in the graph's canonical edge order.
 */
typedef struct CbpCouplings CbpCouplings;

/**
 * Opaque social graph.
 */
typedef struct CbpGraph CbpGraph;

/**
 * Opaque CBP control parameters.
 */
typedef struct CbpParams CbpParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty if none.
 * Valid until the next failing call on the same thread.
 */
const char *cbp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cbp_version(void);

/**
 * Watts-Strogatz graph: `k` neighbours per side, rewiring probability `beta`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CbpStatus cbp_graph_watts_strogatz(size_t n,
                                        size_t k,
                                        double beta,
                                        uint64_t seed,
                                        struct CbpGraph **out);

/**
 * Uniformly random labelled tree on `n` nodes.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CbpStatus cbp_graph_random_tree(size_t n, uint64_t seed, struct CbpGraph **out);

/**
 * Graph from `edge_count` pairs stored flat in `pairs` (`2 * edge_count` values).
 *
 * # Safety
 * `pairs` must point to `2 * edge_count` readable values; `out` must be valid.
 */
enum CbpStatus cbp_graph_from_edges(size_t n,
                                    const uint32_t *pairs,
                                    size_t edge_count,
                                    struct CbpGraph **out);

/**
 * Loads a whitespace-separated edge list (optional `# n=<count>` header).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid.
 */
enum CbpStatus cbp_graph_load(const char *path, struct CbpGraph **out);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t cbp_graph_node_count(const struct CbpGraph *graph);

/**
 * Number of undirected edges; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t cbp_graph_edge_count(const struct CbpGraph *graph);

/**
 * Copies the canonical edge list (`i < j`, ascending) into `pairs`,
 * which must hold `2 * edge_count` values.
 *
 * # Safety
 * `graph` must be a live handle; `pairs` must point to `len` writable values.
 */
enum CbpStatus cbp_graph_edges(const struct CbpGraph *graph, uint32_t *pairs, size_t len);

/**
 * # Safety
 * `graph` must be null or a handle not yet freed.
 */
void cbp_graph_free(struct CbpGraph *graph);

/**
 * Independent couplings `J ~ U(0, j_max]` per edge.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be valid.
 */
enum CbpStatus cbp_couplings_sample(const struct CbpGraph *graph,
                                    double j_max,
                                    uint64_t seed,
                                    struct CbpCouplings **out);

/**
 * Couplings from `len` positive values in canonical edge order.
 *
 * # Safety
 * `graph` must be a live handle; `values` must point to `len` readable values.
 */
enum CbpStatus cbp_couplings_from_values(const struct CbpGraph *graph,
                                         const double *values,
                                         size_t len,
                                         struct CbpCouplings **out);

/**
 * # Safety
 * `couplings` must be null or a handle not yet freed.
 */
void cbp_couplings_free(struct CbpCouplings *couplings);

/**
 * alpha = kappa = 1 (plain BP).
 *
 * # Safety
 * `graph` must be a live handle; `out` must be valid.
 */
enum CbpStatus cbp_params_bp_defaults(const struct CbpGraph *graph, struct CbpParams **out);

/**
 * Parameters from per-edge `alpha` (canonical edge order) and per-node `kappa`.
 *
 * # Safety
 * Buffers must hold the stated number of values; handles must be live.
 */
enum CbpStatus cbp_params_new(const struct CbpGraph *graph,
                              const double *alpha,
                              size_t alpha_len,
                              const double *kappa,
                              size_t kappa_len,
                              struct CbpParams **out);

/**
 * Copies the parameters out.
 *
 * # Safety
 * Buffers must hold the stated number of values; `params` must be live.
 */
enum CbpStatus cbp_params_get(const struct CbpParams *params,
                              double *alpha,
                              size_t alpha_len,
                              double *kappa,
                              size_t kappa_len);

/**
 * # Safety
 * `params` must be null or a handle not yet freed.
 */
void cbp_params_free(struct CbpParams *params);

/**
 * Runs `iterations` damped sweeps from zero messages and writes the final
 * beliefs (log-odds) to `beliefs`. `params` may be null (alpha = kappa = 1).
 *
 * # Safety
 * Handles must be live (`params` may be null); `field` and `beliefs` must
 * hold `node_count` values.
 */
enum CbpStatus cbp_run(const struct CbpGraph *graph,
                       const struct CbpCouplings *couplings,
                       const struct CbpParams *params,
                       enum CbpMode mode,
                       double tau,
                       size_t iterations,
                       const double *field,
                       double *beliefs,
                       size_t n);

/**
 * Exact `p(x_i = +1)` by enumeration (at most 20 nodes).
 *
 * # Safety
 * Handles must be live; `field` and `p_yes` must hold `node_count` values.
 */
enum CbpStatus cbp_exact_marginals(const struct CbpGraph *graph,
                                   const struct CbpCouplings *couplings,
                                   const double *field,
                                   double *p_yes,
                                   size_t n);

/**
 * Unsupervised CBP training from alpha = kappa = 1 on `trials`
 * uninformative fields of standard deviation `sigma_ext`. Rates decay as
 * `1/sqrt(trial)` unless `constant_rates` is nonzero.
 *
 * # Safety
 * Handles must be live; `out` must be valid.
 */
enum CbpStatus cbp_train_unsupervised(const struct CbpGraph *graph,
                                      const struct CbpCouplings *couplings,
                                      size_t trials,
                                      double eta_alpha,
                                      double eta_kappa,
                                      int32_t constant_rates,
                                      double sigma_ext,
                                      uint64_t seed,
                                      struct CbpParams **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBP_H */
