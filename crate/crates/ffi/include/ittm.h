#ifndef ITTM_H
#define ITTM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ITTM_ABI_VERSION 1

typedef enum IttmOutcome {
  ITTM_OUTCOME_HALTED = 0,
  ITTM_OUTCOME_LOOPS = 1,
  ITTM_OUTCOME_EXCEEDED = 2,
} IttmOutcome;

typedef enum IttmStatus {
  ITTM_STATUS_OK = 0,
  ITTM_STATUS_NULL_ARGUMENT = 1,
  ITTM_STATUS_INVALID_UTF8 = 2,
  ITTM_STATUS_PARSE = 3,
  /**
   * The run could not start: bad budget, bad input, oracle mismatch.
   */
  ITTM_STATUS_INVALID_RUN = 4,
  ITTM_STATUS_BUFFER_TOO_SMALL = 5,
  ITTM_STATUS_UNKNOWN_NAME = 6,
  ITTM_STATUS_PANIC = 7,
} IttmStatus;

/**
 * A parsed, validated program.
 */
typedef struct IttmProgram IttmProgram;

/**
 * A finished run.
 */
typedef struct IttmRun IttmRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t ittm_abi_version(void);

/**
 * Copies the last error message of this thread into `buf`.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes and `len_out` must be writable.
 */
enum IttmStatus ittm_last_error(char *buf, size_t cap, size_t *len_out);

/**
 * Parses program text in the `.itm` format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum IttmStatus ittm_program_parse(const char *text, struct IttmProgram **out);

/**
 * One of the built-in programs: `P_halt`, `P_flip`, `P_flip_lh`, `P_sweep`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum IttmStatus ittm_program_reference(const char *name, struct IttmProgram **out);

/**
 * Canonical text of a program.
 *
 * # Safety
 * `p` must come from this library; `buf` must be valid for `cap` bytes.
 */
enum IttmStatus ittm_program_render(const struct IttmProgram *p,
                                    char *buf,
                                    size_t cap,
                                    size_t *len_out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards. Null is ignored.
 */
void ittm_program_free(struct IttmProgram *p);

/**
 * Runs `p` on `input` (a real such as `1(0)*`, or null for all zeros) with
 * stages below w^depth and `budget` steps per block.
 *
 * # Safety
 * `p` must come from this library, `input` must be null or a
 * NUL-terminated string, and `out` writable.
 */
enum IttmStatus ittm_run(const struct IttmProgram *p,
                         const char *input,
                         uint32_t depth,
                         uint64_t budget,
                         struct IttmRun **out);

/**
 * # Safety
 * `r` must come from this library and `kind` must be writable.
 */
enum IttmStatus ittm_run_outcome(const struct IttmRun *r, enum IttmOutcome *kind);

/**
 * One-line summary such as `HALTED time=1 output=1(0)*`.
 *
 * # Safety
 * `r` must come from this library; `buf` must be valid for `cap` bytes.
 */
enum IttmStatus ittm_run_describe(const struct IttmRun *r, char *buf, size_t cap, size_t *len_out);

/**
 * The block trace as JSON lines.
 *
 * # Safety
 * `r` must come from this library; `buf` must be valid for `cap` bytes.
 */
enum IttmStatus ittm_run_trace(const struct IttmRun *r,
                               bool full_snapshots,
                               char *buf,
                               size_t cap,
                               size_t *len_out);

/**
 * # Safety
 * `r` must come from this library and not be used afterwards. Null is ignored.
 */
void ittm_run_free(struct IttmRun *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ITTM_H */
