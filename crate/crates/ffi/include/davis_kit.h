#ifndef DAVIS_KIT_H
#define DAVIS_KIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DkStatus {
  DK_STATUS_OK = 0,
  DK_STATUS_NULL_POINTER = 1,
  DK_STATUS_INVALID_UTF8 = 2,
  DK_STATUS_INVALID_INPUT = 3,
  DK_STATUS_BUDGET_EXCEEDED = 4,
  DK_STATUS_INFINITE = 5,
  DK_STATUS_BUFFER_TOO_SMALL = 6,
  DK_STATUS_COMPUTATION = 7,
  DK_STATUS_PANIC = 8,
} DkStatus;

typedef struct DkCoxeter DkCoxeter;

typedef struct DkHecke DkHecke;

typedef struct DkReport DkReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *dk_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dk_string_free(char *s);

/**
 * Builds a Coxeter system from a row-major `rank × rank` generalized Cartan matrix.
 *
 * # Safety
 * `entries` must point to `rank * rank` integers and `out` must be writable.
 */
enum DkStatus dk_coxeter_new(const int64_t *entries, size_t rank, struct DkCoxeter **out);

/**
 * # Safety
 * `h` must be NULL or a live handle from [`dk_coxeter_new`].
 */
void dk_coxeter_free(struct DkCoxeter *h);

/**
 * Caps the number of group elements enumerated by later calls.
 *
 * # Safety
 * `h` must be a live handle.
 */
enum DkStatus dk_coxeter_set_element_cap(struct DkCoxeter *h, size_t cap);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DkStatus dk_coxeter_rank(const struct DkCoxeter *h, size_t *out);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DkStatus dk_coxeter_is_finite(const struct DkCoxeter *h, bool *out);

/**
 * Order of a finite Weyl group. Fails with `INFINITE` or `BUDGET_EXCEEDED`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DkStatus dk_coxeter_order(const struct DkCoxeter *h, uint64_t *out);

/**
 * Writes the canonical reduced word of the product of `word` into `buf`.
 * `out_len` receives the word length even when the buffer is too small.
 *
 * # Safety
 * `word` must hold `len` entries, `buf` must hold `cap` entries and
 * `out_len` must be writable.
 */
enum DkStatus dk_coxeter_reduce_word(const struct DkCoxeter *h,
                                     const size_t *word,
                                     size_t len,
                                     size_t *buf,
                                     size_t cap,
                                     size_t *out_len);

/**
 * Generic Iwahori-Hecke algebra of a Coxeter system. The Coxeter handle may
 * be freed afterwards.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum DkStatus dk_hecke_new(const struct DkCoxeter *h, struct DkHecke **out);

/**
 * # Safety
 * `h` must be NULL or a live handle from [`dk_hecke_new`].
 */
void dk_hecke_free(struct DkHecke *h);

/**
 * Renders T_u · T_v. Free the string with [`dk_string_free`].
 *
 * # Safety
 * `u` and `v` must hold `u_len` and `v_len` entries; `out` must be writable.
 */
enum DkStatus dk_hecke_multiply(const struct DkHecke *h,
                                const size_t *u,
                                size_t u_len,
                                const size_t *v,
                                size_t v_len,
                                char **out);

/**
 * Runs a JSON scenario, the same input accepted by `davis-kit run`.
 * A failed verdict still returns `OK`; query it with [`dk_report_passed`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum DkStatus dk_run_scenario_json(const char *json, struct DkReport **out);

/**
 * # Safety
 * `r` must be NULL or a live handle from [`dk_run_scenario_json`].
 */
void dk_report_free(struct DkReport *r);

/**
 * # Safety
 * `r` must be a live handle.
 */
bool dk_report_passed(const struct DkReport *r);

/**
 * CLI exit code for the report: 0 pass, 1 fail.
 *
 * # Safety
 * `r` must be a live handle.
 */
int32_t dk_report_exit_code(const struct DkReport *r);

/**
 * The report as JSON, owned by the handle.
 *
 * # Safety
 * `r` must be a live handle; the pointer dies with it.
 */
const char *dk_report_json(const struct DkReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAVIS_KIT_H */
