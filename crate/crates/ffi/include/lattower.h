#ifndef LATTOWER_H
#define LATTOWER_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LattowerStatus {
  LATTOWER_STATUS_OK = 0,
  LATTOWER_STATUS_NULL_POINTER = 1,
  LATTOWER_STATUS_INVALID_UTF8 = 2,
  LATTOWER_STATUS_PARSE_ERROR = 3,
  LATTOWER_STATUS_TOO_LARGE = 4,
  LATTOWER_STATUS_OUT_OF_RANGE = 5,
  LATTOWER_STATUS_INTERNAL = 6,
  LATTOWER_STATUS_PANIC = 7,
} LattowerStatus;

typedef enum LattowerFamily {
  LATTOWER_FAMILY_SUB_PRODUCT = 0,
  LATTOWER_FAMILY_SIGN_PARITY = 1,
  LATTOWER_FAMILY_MIXED = 2,
} LattowerFamily;

/**
 * An enumerated normal subgroup lattice.
 */
typedef struct LattowerLattice LattowerLattice;

typedef struct LattowerCensus {
  uintptr_t sub_products;
  uintptr_t sign_parity;
  uintptr_t mixed;
  uintptr_t total;
} LattowerCensus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lattower_version(void);

/**
 * Message for the most recent failure on this thread, or an empty string.
 * Valid until the next library call on the same thread.
 */
const char *lattower_last_error(void);

/**
 * Enumerates the lattice of `spec`, refusing specs with more than
 * `max_slots` factors.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LattowerStatus lattower_lattice_new(const char *spec,
                                         uintptr_t max_slots,
                                         struct LattowerLattice **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `handle` must come from [`lattower_lattice_new`] and not be used again.
 */
void lattower_lattice_free(struct LattowerLattice *handle);

/**
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_len(const struct LattowerLattice *handle, uintptr_t *out);

/**
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_census(const struct LattowerLattice *handle,
                                            struct LattowerCensus *out);

/**
 * Order of element `index`; `OUT_OF_RANGE` if it does not fit in 64 bits.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_order(const struct LattowerLattice *handle,
                                           uintptr_t index,
                                           uint64_t *out);

/**
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_family(const struct LattowerLattice *handle,
                                            uintptr_t index,
                                            enum LattowerFamily *out);

/**
 * Whether element `i` is contained in element `j`.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_leq(const struct LattowerLattice *handle,
                                         uintptr_t i,
                                         uintptr_t j,
                                         bool *out);

/**
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_meet(const struct LattowerLattice *handle,
                                          uintptr_t i,
                                          uintptr_t j,
                                          uintptr_t *out);

/**
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_join(const struct LattowerLattice *handle,
                                          uintptr_t i,
                                          uintptr_t j,
                                          uintptr_t *out);

/**
 * JSON export of the lattice including its covering pairs. Release the
 * string with [`lattower_string_free`].
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum LattowerStatus lattower_lattice_to_json(const struct LattowerLattice *handle, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void lattower_string_free(char *s);

/**
 * Number of lattice automorphisms of `N(spec)`, found by exhaustive search
 * on lattices of at most `max_lattice` elements.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LattowerStatus lattower_latauto_order(const char *spec, uintptr_t max_lattice, uint64_t *out);

/**
 * Runs the tower from `spec`. Writes the number of steps and, when
 * `out_line` is not null, the formatted run (release with
 * [`lattower_string_free`]).
 *
 * # Safety
 * `spec` must be a NUL-terminated string, `out_steps` a valid pointer and
 * `out_line` either null or valid.
 */
enum LattowerStatus lattower_tower_run(const char *spec, uint32_t *out_steps, char **out_line);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATTOWER_H */
