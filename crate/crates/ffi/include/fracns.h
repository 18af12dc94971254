#ifndef FRACNS_H
#define FRACNS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FracnsStatus {
  FRACNS_STATUS_OK = 0,
  FRACNS_STATUS_NULL_POINTER = 1,
  FRACNS_STATUS_INVALID_PARAMETER = 2,
  FRACNS_STATUS_DOMAIN = 3,
  FRACNS_STATUS_NUMERICAL = 4,
  FRACNS_STATUS_NON_CONVERGENCE = 5,
  FRACNS_STATUS_REFUSED = 6,
  FRACNS_STATUS_CONFIG = 7,
  FRACNS_STATUS_IO = 8,
  FRACNS_STATUS_INVALID_UTF8 = 9,
  FRACNS_STATUS_BUFFER_TOO_SMALL = 10,
  FRACNS_STATUS_CHECKS_FAILED = 11,
  FRACNS_STATUS_PANIC = 12,
} FracnsStatus;

typedef enum FracnsBasisKind {
  FRACNS_BASIS_KIND_DIRICHLET_SINE1D = 0,
  FRACNS_BASIS_KIND_DIVFREE_TORUS2D = 1,
} FracnsBasisKind;

typedef enum FracnsSubcommand {
  FRACNS_SUBCOMMAND_VALIDATE = 0,
  FRACNS_SUBCOMMAND_MLFUN = 1,
  FRACNS_SUBCOMMAND_BOUNDS = 2,
  FRACNS_SUBCOMMAND_BDG = 3,
  FRACNS_SUBCOMMAND_SOLVE = 4,
  FRACNS_SUBCOMMAND_CONTROL_SWEEP = 5,
} FracnsSubcommand;

/**
 * Opaque eigenbasis handle.
 */
typedef struct FracnsBasis FracnsBasis;

/**
 * Opaque parsed configuration handle.
 */
typedef struct FracnsConfig FracnsConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *fracns_last_error(void);

/**
 * `E_{a,b}(x)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum FracnsStatus fracns_mittag_leffler(double a, double b, double x, double *out);

/**
 * Mainardi function `K_η(s)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum FracnsStatus fracns_mainardi(double eta, double s, double *out);

/**
 * Creates an eigenbasis with `n` modes.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum FracnsStatus fracns_basis_new(enum FracnsBasisKind kind,
                                   size_t n,
                                   double nu,
                                   double alpha,
                                   struct FracnsBasis **out);

/**
 * # Safety
 * `basis` must be null or a handle from [`fracns_basis_new`] not yet freed.
 */
void fracns_basis_free(struct FracnsBasis *basis);

/**
 * # Safety
 * `basis` must be a live handle; `out` valid for one write.
 */
enum FracnsStatus fracns_basis_len(const struct FracnsBasis *basis, size_t *out);

/**
 * Copies the Laplacian eigenvalues into `out[0..len]`.
 *
 * # Safety
 * `basis` must be a live handle; `out` valid for `len` writes.
 */
enum FracnsStatus fracns_basis_eigenvalues(const struct FracnsBasis *basis,
                                           double *out,
                                           size_t len);

/**
 * `out = M_η(t) input`, both of length `len` equal to the basis size.
 *
 * # Safety
 * `basis` must be a live handle; `input` valid for `len` reads and `out`
 * for `len` writes.
 */
enum FracnsStatus fracns_basis_apply_m_eta(const struct FracnsBasis *basis,
                                           double t,
                                           double eta,
                                           const double *input,
                                           double *out,
                                           size_t len);

/**
 * Evaluates the six exponent conditions `c0..c5`. `values` and `passed`
 * receive six entries each.
 *
 * # Safety
 * `values` and `passed` must be valid for six writes.
 */
enum FracnsStatus fracns_validate(double eta,
                                  double alpha,
                                  double beta,
                                  double p,
                                  double *values,
                                  bool *passed);

/**
 * Parses a TOML experiment configuration.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` valid for one write.
 */
enum FracnsStatus fracns_config_parse(const char *text, struct FracnsConfig **out);

/**
 * # Safety
 * `config` must be null or a handle from [`fracns_config_parse`] not yet freed.
 */
void fracns_config_free(struct FracnsConfig *config);

/**
 * Writes the hex SHA-256 of the canonical configuration (64 characters
 * plus NUL) into `buf`.
 *
 * # Safety
 * `config` must be a live handle; `buf` valid for `len` writes.
 */
enum FracnsStatus fracns_config_hash(const struct FracnsConfig *config, char *buf, size_t len);

/**
 * Runs a subcommand and writes its tables into `out_dir`. Returns
 * `CHECKS_FAILED` when the run completed but a check did not pass.
 *
 * # Safety
 * `config` must be a live handle and `out_dir` a NUL-terminated path.
 */
enum FracnsStatus fracns_run(const struct FracnsConfig *config,
                             enum FracnsSubcommand subcommand,
                             bool override_validation,
                             const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACNS_H */
