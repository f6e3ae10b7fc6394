#ifndef SSG_H
#define SSG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum SsgStatus {
  SSG_STATUS_OK = 0,
  SSG_STATUS_NULL_POINTER = 1,
  SSG_STATUS_INVALID_UTF8 = 2,
  SSG_STATUS_PARSE_ERROR = 3,
  SSG_STATUS_INVALID_INPUT = 4,
  SSG_STATUS_BOUND_EXCEEDED = 5,
  SSG_STATUS_CONTRACT_VIOLATION = 6,
  SSG_STATUS_MISMATCHED_GROUPS = 7,
  SSG_STATUS_BUFFER_TOO_SMALL = 8,
  SSG_STATUS_INTERNAL = 9,
} SsgStatus;

/**
 * Opaque handle to an element of the group's Röver–Nekrashevych group.
 */
typedef struct SsgElement SsgElement;

/**
 * Opaque handle to an automaton group.
 */
typedef struct SsgGroup SsgGroup;

/**
 * Copies the message of the last failed call on this thread.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes; `needed` must be null or valid.
 */
enum SsgStatus ssg_last_error(char *buf, size_t len, size_t *needed);

/**
 * Looks up a compiled-in group by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be valid for writing.
 */
enum SsgStatus ssg_group_builtin(const char *name, struct SsgGroup **out);

/**
 * Parses a group from the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writing.
 */
enum SsgStatus ssg_group_parse(const char *text, struct SsgGroup **out);

/**
 * # Safety
 * `group` must be null or a handle from this library not yet freed.
 */
void ssg_group_free(struct SsgGroup *group);

/**
 * # Safety
 * `group` must be a live handle; `out` must be valid for writing.
 */
enum SsgStatus ssg_group_degree(const struct SsgGroup *group, size_t *out);

/**
 * Decides whether a word such as `b.c.d` is the identity.
 *
 * # Safety
 * `group` must be a live handle, `word` a NUL-terminated string, `out` valid.
 */
enum SsgStatus ssg_word_is_trivial(const struct SsgGroup *group, const char *word, bool *out);

/**
 * Number of elements of the nucleus.
 *
 * # Safety
 * `group` must be a live handle; `out` must be valid for writing.
 */
enum SsgStatus ssg_nucleus_size(const struct SsgGroup *group,
                                size_t max_size,
                                size_t max_depth,
                                size_t *out);

/**
 * The tree automorphism given by `word`, acting on the whole space.
 *
 * # Safety
 * `group` must be a live handle, `word` a NUL-terminated string, `out` valid.
 */
enum SsgStatus ssg_element_from_word(const struct SsgGroup *group,
                                     const char *word,
                                     struct SsgElement **out);

/**
 * Parses an element table (`rn <name> over <group>` followed by `row` lines).
 *
 * # Safety
 * `group` must be a live handle, `text` a NUL-terminated string, `out` valid.
 */
enum SsgStatus ssg_element_parse(const struct SsgGroup *group,
                                 const char *text,
                                 struct SsgElement **out);

/**
 * # Safety
 * `element` must be null or a handle from this library not yet freed.
 */
void ssg_element_free(struct SsgElement *element);

/**
 * `out = a ∘ b` (apply `b` first).
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be valid for writing.
 */
enum SsgStatus ssg_element_compose(const struct SsgElement *a,
                                   const struct SsgElement *b,
                                   struct SsgElement **out);

/**
 * # Safety
 * `a` must be a live handle; `out` must be valid for writing.
 */
enum SsgStatus ssg_element_invert(const struct SsgElement *a, struct SsgElement **out);

/**
 * # Safety
 * `a` and `b` must be live handles; `out` must be valid for writing.
 */
enum SsgStatus ssg_element_equal(const struct SsgElement *a, const struct SsgElement *b, bool *out);

/**
 * Image of a rational point such as `0(01)`, written in the same syntax.
 *
 * # Safety
 * `element` must be a live handle, `point` a NUL-terminated string, and
 * `buf`/`needed` as for [`ssg_last_error`].
 */
enum SsgStatus ssg_element_evaluate(const struct SsgElement *element,
                                    const char *point,
                                    char *buf,
                                    size_t len,
                                    size_t *needed);

/**
 * The element in the text format accepted by [`ssg_element_parse`].
 *
 * # Safety
 * `element` must be a live handle, `name` a NUL-terminated string, and
 * `buf`/`needed` as for [`ssg_last_error`].
 */
enum SsgStatus ssg_element_to_text(const struct SsgElement *element,
                                   const char *name,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

/**
 * Germ signature at a fixed point, rendered as
 * `germ(point=..., n=..., delta=..., depth=...)`.
 *
 * # Safety
 * `element` must be a live handle, `point` a NUL-terminated string, and
 * `buf`/`needed` as for [`ssg_last_error`].
 */
enum SsgStatus ssg_germ_signature(const struct SsgElement *element,
                                  const char *point,
                                  size_t cap,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

#endif  /* SSG_H */
