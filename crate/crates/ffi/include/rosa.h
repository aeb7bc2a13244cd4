#ifndef ROSA_H
#define ROSA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define ROSA_OK 0

#define ROSA_ERR_INTERNAL 1

#define ROSA_ERR_VALIDATION 2

#define ROSA_ERR_BUDGET 3

#define ROSA_ERR_NOT_FOUND 4

/**
 * Opaque patch handle.
 */
typedef struct RosaPatch RosaPatch;

/**
 * Opaque substitution-rule handle.
 */
typedef struct RosaRule RosaRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, valid until the next failing call.
 * Returns a pointer owned by the library; do not free it.
 */
const char *rosa_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `rosa_*` function that
 * documents `rosa_string_free` as its deallocator, or null.
 */
void rosa_string_free(char *s);

/**
 * Moduli |λ_j| of the expansion of `edgeword` (UTF-8, compact form) for
 * symmetry order `n`. Writes up to `out_len` values into `out` and stores
 * the required count in `written`.
 *
 * # Safety
 * `edgeword` must be a valid NUL-terminated string; `out` must point to at
 * least `out_len` doubles; `written` must be a valid pointer.
 */
int32_t rosa_eigenvalue_moduli(uint32_t n,
                               const char *edgeword,
                               double *out,
                               uintptr_t out_len,
                               uintptr_t *written);

/**
 * The Sub Rosa edgeword Σ(n) as a newly allocated string (free with
 * `rosa_string_free`).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t rosa_subrosa_edgeword(uint32_t n, char **out);

/**
 * Smallest Planar Rosa candidate exponent j ≤ max_j; the candidate edgeword
 * is returned as a string (free with `rosa_string_free`).
 *
 * # Safety
 * `out_j` and `out_word` must be valid pointers.
 */
int32_t rosa_planar_candidate(uint32_t n, uintptr_t max_j, uintptr_t *out_j, char **out_word);

/**
 * Build a substitution rule from a palindromic edgeword. On success `out`
 * owns a handle that must be released with `rosa_rule_free`.
 *
 * # Safety
 * `edgeword` must be a valid NUL-terminated string; `out` a valid pointer.
 */
int32_t rosa_rule_build(uint32_t n,
                        const char *edgeword,
                        uint64_t node_budget,
                        struct RosaRule **out);

/**
 * Release a rule handle.
 *
 * # Safety
 * `rule` must come from `rosa_rule_build` and not be used afterwards.
 */
void rosa_rule_free(struct RosaRule *rule);

/**
 * The star patch S_n (2n thin rhombi around the origin); release with
 * `rosa_patch_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t rosa_star_patch(uint32_t n, struct RosaPatch **out);

/**
 * Apply the substitution once; `out` is a new handle.
 *
 * # Safety
 * `rule` and `patch` must be live handles from this library; `out` a valid
 * pointer.
 */
int32_t rosa_rule_apply(const struct RosaRule *rule,
                        const struct RosaPatch *patch,
                        uint64_t tile_budget,
                        struct RosaPatch **out);

/**
 * Number of tiles in a patch (0 for null).
 *
 * # Safety
 * `patch` must be a live handle or null.
 */
uintptr_t rosa_patch_tile_count(const struct RosaPatch *patch);

/**
 * Validate a patch: ROSA_OK when edge-to-edge, non-overlapping, connected
 * and simply connected; ROSA_ERR_VALIDATION (with message) otherwise.
 *
 * # Safety
 * `patch` must be a live handle.
 */
int32_t rosa_patch_validate(const struct RosaPatch *patch);

/**
 * Serialize a patch to JSON (free with `rosa_string_free`).
 *
 * # Safety
 * `patch` must be a live handle; `out` a valid pointer.
 */
int32_t rosa_patch_to_json(const struct RosaPatch *patch, char **out);

/**
 * Parse a patch from JSON; release with `rosa_patch_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` a valid pointer.
 */
int32_t rosa_patch_from_json(const char *json, struct RosaPatch **out);

/**
 * Release a patch handle.
 *
 * # Safety
 * `patch` must come from this library and not be used afterwards.
 */
void rosa_patch_free(struct RosaPatch *patch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROSA_H */
