#ifndef WALKLAB_H
#define WALKLAB_H

/* Generated by cbindgen from the walklab-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum WalklabStatus {
  // The call succeeded and any out-pointer was filled.
  WALKLAB_STATUS_OK = 0,
  // A pointer was null, a string was not UTF-8, or a value was out of range.
  WALKLAB_STATUS_INVALID_ARGUMENT = 1,
  // The computation itself reported an error (domain, convergence, ...).
  WALKLAB_STATUS_EVALUATION_ERROR = 2,
  // A panic was caught at the boundary; the out-pointers are untouched.
  WALKLAB_STATUS_PANIC = 3,
} WalklabStatus;

// Opaque precision context.  One context may serve many calls; it is
// immutable after creation and safe to share across threads.
typedef struct WalklabContext WalklabContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a context carrying `digits` decimal digits of working precision
// (5 ≤ digits ≤ 10000).  On success `*out` owns the context.
enum WalklabStatus walklab_context_new(uint32_t digits, struct WalklabContext **out);

// Release a context created by [`walklab_context_new`].  Null is a no-op.
void walklab_context_free(struct WalklabContext *ctx);

// JSON array of the registered checks matching `filter` (a glob over ids;
// pass "*" for all).  Each element carries id, status, cost, default_digits
// and description.  `*out_json` must be freed with [`walklab_string_free`].
enum WalklabStatus walklab_list_checks(const char *filter, char **out_json);

// Run every check matching `filter` at the context's precision with the
// given seed, single-threaded, and return the full JSON report (the same
// schema the CLI writes).  Individual check failures are recorded in the
// report, not raised; the call fails only on invalid input.
enum WalklabStatus walklab_run_checks(const struct WalklabContext *ctx,
                                      const char *filter,
                                      uint64_t seed,
                                      char **out_json);

// Evaluate a walk density pointwise.  `walk` is one of "p2", "p3", "p4",
// "phat"; `x` must lie strictly inside the support.  The value is returned
// as a decimal string at the context's precision (densities are computed in
// multiple precision; a double would throw most of that away).
enum WalklabStatus walklab_density(const struct WalklabContext *ctx,
                                   const char *walk,
                                   double x,
                                   char **out_value);

// Release a string returned by this library.  Null is a no-op.
void walklab_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WALKLAB_H */
