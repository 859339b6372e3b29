#ifndef INTEGRAL_VERIFY_H
#define INTEGRAL_VERIFY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum IvStatus {
  IV_STATUS_OK = 0,
  IV_STATUS_NULL_ARGUMENT = 1,
  IV_STATUS_INVALID_UTF8 = 2,
  IV_STATUS_CONFIG = 3,
  IV_STATUS_SYNTAX = 4,
  IV_STATUS_DOMAIN = 5,
  IV_STATUS_LOOKUP = 6,
  IV_STATUS_CATALOG = 7,
  IV_STATUS_NON_CONVERGENCE = 8,
  IV_STATUS_IO = 9,
  IV_STATUS_PANIC = 10,
} IvStatus;

// A list of identities.
typedef struct IvCatalog IvCatalog;

// Precision and quadrature settings.
typedef struct IvContext IvContext;

// Outcome of one identity.
typedef struct IvVerification {
  uint32_t id;
  bool pass;
  bool converged;
  uint64_t nodes;
  // Relative residual rounded to a double.
  double rel_residual;
  uint64_t elapsed_ms;
} IvVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *iv_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void iv_string_free(char *s);

// Library version as a static string.
const char *iv_version(void);

// Creates a context for `digits` significant digits (at least 10).
//
// # Safety
// `out` must be a valid pointer.
enum IvStatus iv_context_new(uint32_t digits, struct IvContext **out);

// Sets the maximum number of quadrature refinement levels (at least 1).
//
// # Safety
// `ctx` must be a live context handle.
enum IvStatus iv_context_set_max_levels(struct IvContext *ctx, uint32_t levels);

// # Safety
// `ctx` must be null or a handle from [`iv_context_new`] not yet freed.
void iv_context_free(struct IvContext *ctx);

// Named constant (`pi`, `sqrt_pi`, `gamma`, `catalan`) as a decimal string.
//
// # Safety
// Pointers must be valid; `name` NUL-terminated.
enum IvStatus iv_constant(const struct IvContext *ctx, const char *name, char **out);

// Evaluates `expr` at `x`, where `x` is itself a constant expression.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum IvStatus iv_eval(const struct IvContext *ctx, const char *expr, const char *x, char **out);

// `M(y) = ∫₀^∞ e^(-x²) sech(xy) dx` for a constant expression `y ≥ 0`.
//
// # Safety
// Pointers must be valid; `y` NUL-terminated.
enum IvStatus iv_m_transform(const struct IvContext *ctx, const char *y, char **out);

// Residual `|y M(y) - √π M(π/y)|` for `y > 0` and whether it is within bound.
//
// # Safety
// Pointers must be valid; `y` NUL-terminated. `pass` may be null.
enum IvStatus iv_modular_residual(const struct IvContext *ctx,
                                  const char *y,
                                  char **residual,
                                  bool *pass);

// The built-in catalog of twelve identities.
//
// # Safety
// `out` must be a valid pointer.
enum IvStatus iv_catalog_builtin(struct IvCatalog **out);

// Parses catalog text.
//
// # Safety
// Pointers must be valid; `source` NUL-terminated.
enum IvStatus iv_catalog_parse(const char *source, struct IvCatalog **out);

// Loads a catalog file.
//
// # Safety
// Pointers must be valid; `path` NUL-terminated.
enum IvStatus iv_catalog_load(const char *path, struct IvCatalog **out);

// Number of identities; 0 for a null handle.
//
// # Safety
// `cat` must be null or a live catalog handle.
size_t iv_catalog_len(const struct IvCatalog *cat);

// Identity id at `index`.
//
// # Safety
// Pointers must be valid.
enum IvStatus iv_catalog_id_at(const struct IvCatalog *cat, size_t index, uint32_t *id);

// Serializes the catalog in the text format accepted by [`iv_catalog_parse`].
//
// # Safety
// Pointers must be valid.
enum IvStatus iv_catalog_export(const struct IvCatalog *cat, char **out);

// # Safety
// `cat` must be null or a catalog handle not yet freed.
void iv_catalog_free(struct IvCatalog *cat);

// Verifies one identity of the catalog.
//
// # Safety
// Pointers must be valid.
enum IvStatus iv_verify_identity(const struct IvContext *ctx,
                                 const struct IvCatalog *cat,
                                 uint32_t id,
                                 struct IvVerification *out);

// Full verification run rendered as a JSON report. `ids` may be null when
// `n_ids` is 0, which selects every identity. The reciprocity and
// derivative checks use the default grid.
//
// # Safety
// Pointers must be valid; `ids` must hold `n_ids` elements. `pass` may be null.
enum IvStatus iv_verify_report_json(const struct IvContext *ctx,
                                    const struct IvCatalog *cat,
                                    const uint32_t *ids,
                                    size_t n_ids,
                                    char **json,
                                    bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTEGRAL_VERIFY_H */
