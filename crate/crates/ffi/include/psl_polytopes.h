#ifndef PSL_POLYTOPES_H
#define PSL_POLYTOPES_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PslStatus {
  PSL_STATUS_OK = 0,
  PSL_STATUS_NULL_POINTER = 1,
  PSL_STATUS_INVALID_ARGUMENT = 2,
  PSL_STATUS_PARSE_ERROR = 3,
  /**
   * Coset enumeration hit its limit before closing.
   */
  PSL_STATUS_OVER_LIMIT = 4,
  PSL_STATUS_OUT_OF_RANGE = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  PSL_STATUS_INTERNAL = 6,
} PslStatus;

typedef struct PslClassList PslClassList;

typedef struct PslGroup PslGroup;

typedef struct PslPresentation PslPresentation;

/**
 * One equivalence class of string C-groups. Arrays are filled up to the
 * rank-dependent lengths and zero elsewhere.
 */
typedef struct PslClassInfo {
  uint32_t q;
  uint32_t rank;
  /**
   * `rank - 1` entries.
   */
  uint32_t schlafli[4];
  /**
   * `rank - 2` entries.
   */
  uint32_t petrie[3];
  /**
   * `rank` entries.
   */
  uint64_t f_vector[5];
  bool self_dual;
  /**
   * Conjugacy classes merged into this class.
   */
  uint64_t classes;
} PslClassInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *psl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *psl_version(void);

/**
 * Builds PSL(2,q), or PGL(2,q) when `projective` is set.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PslStatus psl_group_new(uint32_t q, bool projective, struct PslGroup **out);

/**
 * # Safety
 * `group` must come from [`psl_group_new`] and not be freed twice.
 */
void psl_group_free(struct PslGroup *group);

/**
 * Group order, or 0 for a null handle.
 *
 * # Safety
 * `group` must be null or a live handle.
 */
uint64_t psl_group_order(const struct PslGroup *group);

/**
 * Product `a` then `b` of two element ids.
 *
 * # Safety
 * `group` must be a live handle and `out` valid for writes.
 */
enum PslStatus psl_group_mul(const struct PslGroup *group, uint32_t a, uint32_t b, uint32_t *out);

/**
 * # Safety
 * `group` must be a live handle and `out` valid for writes.
 */
enum PslStatus psl_group_element_order(const struct PslGroup *group, uint32_t a, uint32_t *out);

/**
 * Searches PSL(2,q) for string C-groups of rank 3, 4 or 5, one entry per
 * class up to automorphisms and duality.
 *
 * # Safety
 * `group` must be a live handle and `out` valid for writes.
 */
enum PslStatus psl_search(const struct PslGroup *group, uint32_t rank, struct PslClassList **out);

/**
 * # Safety
 * `list` must be null or a live handle.
 */
size_t psl_class_list_len(const struct PslClassList *list);

/**
 * # Safety
 * `list` must be a live handle and `out` valid for writes.
 */
enum PslStatus psl_class_list_get(const struct PslClassList *list,
                                  size_t index,
                                  struct PslClassInfo *out);

/**
 * # Safety
 * `list` must come from [`psl_search`] and not be freed twice.
 */
void psl_class_list_free(struct PslClassList *list);

/**
 * Parses the text format, e.g. `gens 2; r0^2, r1^2, (r0 r1)^3`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum PslStatus psl_presentation_parse(const char *text, struct PslPresentation **out);

/**
 * Presentation of the universal polytope with facets `{m1,n1}_k1` and
 * vertex-figures `{m2,n2}_k2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PslStatus psl_presentation_amalgam(uint32_t m1,
                                        uint32_t n1,
                                        uint32_t k1,
                                        uint32_t m2,
                                        uint32_t n2,
                                        uint32_t k2,
                                        struct PslPresentation **out);

/**
 * # Safety
 * `pres` must come from this library and not be freed twice.
 */
void psl_presentation_free(struct PslPresentation *pres);

/**
 * Order of the presented group by coset enumeration over the trivial
 * subgroup. Returns `OverLimit` when more than `max_cosets` cosets are live.
 *
 * # Safety
 * `pres` must be a live handle and `out_order` valid for writes.
 */
enum PslStatus psl_group_order_of_presentation(const struct PslPresentation *pres,
                                               size_t max_cosets,
                                               uint64_t *out_order);

/**
 * Subgroup census of PSL(2,q) as CSV. `all_match` reports whether every
 * row agrees with its formula. Free the string with [`psl_string_free`].
 *
 * # Safety
 * `out_csv` and `all_match` must be valid for writes.
 */
enum PslStatus psl_census_csv(uint32_t q, char **out_csv, bool *all_match);

/**
 * Classes from [`psl_search`] as JSON lines.
 *
 * # Safety
 * `list` must be a live handle and `out_json` valid for writes.
 */
enum PslStatus psl_class_list_json(const struct PslClassList *list, char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void psl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSL_POLYTOPES_H */
