#ifndef QSYNC_H
#define QSYNC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  QS_STATUS_INVALID_ARGUMENT = 2,
  QS_STATUS_VALIDITY_REGIME = 3,
  QS_STATUS_SOLVER_FAILURE = 4,
  QS_STATUS_BUFFER_TOO_SMALL = 5,
  QS_STATUS_PARSE = 6,
  QS_STATUS_PANIC = 7,
} QsStatus;

typedef enum QsBoundary {
  QS_BOUNDARY_PERIODIC = 0,
  QS_BOUNDARY_OPEN = 1,
} QsBoundary;

// Opaque validated model configuration.
typedef struct QsConfig QsConfig;

// Opaque disorder realization tied to the configuration it was drawn for.
typedef struct QsDisorder QsDisorder;

// Saddle-point solution for one realization.
typedef struct QsSaddle {
  double x0;
  double y0;
  // Correlation radius in lattice units.
  double r0;
  uint32_t iterations;
  // Number of solver warnings (finite-size or out-of-range coupling).
  uint32_t warnings;
} QsSaddle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *qs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qs_version(void);

// Builds a configuration from physical parameters. `dimension` is 1 or 2; in
// 2D `n_sites` must be a perfect square.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QsStatus qs_config_new(size_t n_sites,
                            uint8_t dimension,
                            enum QsBoundary boundary,
                            double mean_splitting,
                            double disorder_width,
                            double coupling,
                            double temperature,
                            struct QsConfig **out);

// Parses a versioned TOML configuration document.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum QsStatus qs_config_from_toml(const char *toml, struct QsConfig **out);

// Copy of `config` with K̃ = κ·δΔ.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum QsStatus qs_config_with_kappa(const struct QsConfig *config,
                                   double kappa,
                                   struct QsConfig **out);

// Dimensionless coupling κ = K̃/δΔ, or NaN for a null handle.
//
// # Safety
// `config` must be null or a live handle.
double qs_config_kappa(const struct QsConfig *config);

// Number of sites, or 0 for a null handle.
//
// # Safety
// `config` must be null or a live handle.
size_t qs_config_n_sites(const struct QsConfig *config);

// # Safety
// `config` must be null or a handle not yet freed.
void qs_config_free(struct QsConfig *config);

// Draws the seeded Gaussian disorder realization for `config`.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum QsStatus qs_disorder_sample(const struct QsConfig *config,
                                 uint64_t seed,
                                 struct QsDisorder **out);

// Wraps caller-supplied splittings Δᵢ (one per site) as a realization.
//
// # Safety
// `config` must be a live handle, `values` must hold `len` doubles and
// `out` must be writable.
enum QsStatus qs_disorder_from_values(const struct QsConfig *config,
                                      const double *values,
                                      size_t len,
                                      uint64_t seed,
                                      struct QsDisorder **out);

// Copies the splittings into `out` (capacity `cap`).
//
// # Safety
// `disorder` must be a live handle; `out` must hold `cap` doubles; `needed`
// may be null.
enum QsStatus qs_disorder_values(const struct QsDisorder *disorder,
                                 double *out,
                                 size_t cap,
                                 size_t *needed);

// # Safety
// `disorder` must be null or a handle not yet freed.
void qs_disorder_free(struct QsDisorder *disorder);

// Solves the saddle-point equations for one realization.
//
// # Safety
// Handles must be live and `out` writable.
enum QsStatus qs_saddle_solve(const struct QsDisorder *disorder,
                              const struct QsConfig *config,
                              struct QsSaddle *out);

// Saddle-filtered frequencies ωᵢ for one realization.
//
// # Safety
// Handles must be live; `out` must hold `cap` doubles; `needed` and `r0`
// may be null.
enum QsStatus qs_saddle_filter(const struct QsDisorder *disorder,
                               const struct QsConfig *config,
                               double *out,
                               size_t cap,
                               size_t *needed,
                               double *r0);

// Filters the realization with a given radius (∞ keeps only the zero mode).
//
// # Safety
// Handles must be live; `out` must hold `cap` doubles; `needed` may be null.
enum QsStatus qs_mode_filter(const struct QsDisorder *disorder,
                             const struct QsConfig *config,
                             double r0,
                             double *out,
                             size_t cap,
                             size_t *needed);

// D(ω) = 1 − Σᵢ α/((ω − ωᵢ)² + γ²) on `n_grid` probe frequencies.
//
// # Safety
// `frequencies` must hold `n_freq` doubles, `grid` and `out` `n_grid` each.
enum QsStatus qs_transmission(const double *frequencies,
                              size_t n_freq,
                              double alpha,
                              double gamma,
                              const double *grid,
                              size_t n_grid,
                              double *out);

// Spinon energies Eₖ (ascending) of the open chain with transverse fields
// Δᵢ and bond coupling K̃.
//
// # Safety
// `splittings` must hold `n` doubles; `out` must hold `cap` doubles;
// `needed` may be null.
enum QsStatus qs_spinon_energies(const double *splittings,
                                 size_t n,
                                 double coupling,
                                 double *out,
                                 size_t cap,
                                 size_t *needed);

// All 2ᴺ many-body levels by dense diagonalization (N ≤ 12), ascending.
//
// # Safety
// `splittings` must hold `n` doubles; `out` must hold `cap` doubles;
// `needed` may be null.
enum QsStatus qs_dense_levels(const double *splittings,
                              size_t n,
                              double coupling,
                              double *out,
                              size_t cap,
                              size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSYNC_H */
