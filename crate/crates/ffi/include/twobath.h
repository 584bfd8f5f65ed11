#ifndef TWOBATH_H
#define TWOBATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Bits of [`tb_run_flags`].
#define TB_FLAG_NOT_CONVERGED 1

#define TB_FLAG_TRUNCATION_ABOVE_TARGET 2

#define TB_FLAG_EIGENSOLVER_NOT_CONVERGED 4

#define TB_FLAG_ENERGY_INCREASE 8

typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  TB_STATUS_CONFIG = 3,
  TB_STATUS_DOMAIN = 4,
  TB_STATUS_NUMERICAL = 5,
  TB_STATUS_IO = 6,
  TB_STATUS_OUT_OF_RANGE = 7,
  TB_STATUS_PANIC = 8,
} TbStatus;

// Wilson-chain coefficients.
typedef struct TbChain TbChain;

// Result of one ground-state run.
typedef struct TbRun TbRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *tb_last_error(void);

// Library version as a static nul-terminated string.
const char *tb_version(void);

// Solves the point described by a flat TOML config.
//
// # Safety
// `config` must be a valid nul-terminated string and `out` a valid pointer.
enum TbStatus tb_ground(const char *config, struct TbRun **out);

// # Safety
// `run` must come from [`tb_ground`] and not be used afterwards.
void tb_run_free(struct TbRun *run);

// # Safety
// `run` must be a live handle and `energy` writable.
enum TbStatus tb_run_energy(const struct TbRun *run, double *energy);

// Spin expectations `⟨σx⟩, ⟨σy⟩, ⟨σz⟩`.
//
// # Safety
// `run` must be a live handle and the outputs writable.
enum TbStatus tb_run_spin(const struct TbRun *run, double *sx, double *sy, double *sz);

// Spin von Neumann entropy in nats.
//
// # Safety
// `run` must be a live handle and `svn` writable.
enum TbStatus tb_run_entropy(const struct TbRun *run, double *svn);

// Diagnostic flags as a bit set of `TB_FLAG_*`; 0 for null handles.
//
// # Safety
// `run` must be a live handle or null.
uint32_t tb_run_flags(const struct TbRun *run);

// Builds a Wilson chain for `J(ω) = 2·alpha·ω_c^{1−s}·ω^s`. A nonzero
// `oracle` selects the discretize-and-tridiagonalize route.
//
// # Safety
// `out` must be a valid pointer.
enum TbStatus tb_chain_new(double alpha,
                           double s,
                           double cutoff,
                           double lambda,
                           size_t length,
                           bool oracle,
                           struct TbChain **out);

// # Safety
// `chain` must come from [`tb_chain_new`] and not be used afterwards.
void tb_chain_free(struct TbChain *chain);

// Number of chain sites; 0 for null handles.
//
// # Safety
// `chain` must be a live handle or null.
size_t tb_chain_len(const struct TbChain *chain);

// Site energy `ω_n` and hopping `t_n` (NaN past the last hopping).
//
// # Safety
// `chain` must be a live handle and the outputs writable.
enum TbStatus tb_chain_site(const struct TbChain *chain, size_t n, double *omega, double *hopping);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOBATH_H */
