#ifndef XCUBE_H
#define XCUBE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XcStatus {
  XC_STATUS_OK = 0,
  XC_STATUS_NULL_POINTER = 1,
  XC_STATUS_INVALID_ARGUMENT = 2,
  XC_STATUS_INVALID_SPEC = 3,
  XC_STATUS_INCONSISTENT_RECORD = 4,
  XC_STATUS_WRONG_STAGE = 5,
  XC_STATUS_INTERNAL = 6,
  XC_STATUS_PANIC = 7,
} XcStatus;

// Values accepted by `strategy` parameters.
typedef enum XcStrategy {
  XC_STRATEGY_MOVEMENT = 0,
  XC_STRATEGY_CZ12 = 1,
} XcStrategy;

// Values accepted by `mode` parameters.
typedef enum XcMode {
  XC_MODE_PHYSICAL = 0,
  XC_MODE_PAULI_FRAME = 1,
} XcMode;

// Values accepted by `boundary` parameters.
typedef enum XcBoundary {
  XC_BOUNDARY_PERIODIC = 0,
  XC_BOUNDARY_ONE_STOREY = 1,
} XcBoundary;

// Opaque lattice handle.
typedef struct XcLattice XcLattice;

// Opaque simulation handle.
typedef struct XcSimulation XcSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *xc_last_error(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void xc_string_free(char *s);

// # Safety
// `out` must be a valid pointer to writable storage.
enum XcStatus xc_lattice_new(size_t lx,
                             size_t ly,
                             size_t lz,
                             uint32_t boundary,
                             struct XcLattice **out);

// # Safety
// `l` must be NULL or a handle from [`xc_lattice_new`] not yet freed.
void xc_lattice_free(struct XcLattice *l);

// # Safety
// `l` must be a live handle; the output pointers must be writable.
enum XcStatus xc_lattice_counts(const struct XcLattice *l, size_t *code, size_t *ancilla);

// Lattice document as JSON.
//
// # Safety
// `l` must be a live handle; `out` must be writable.
enum XcStatus xc_lattice_json(const struct XcLattice *l, char **out);

// Prepare the cluster state. The simulation keeps its own reference to the
// lattice, so the lattice handle may be freed afterwards.
//
// # Safety
// `l` must be a live handle; `out` must be writable.
enum XcStatus xc_simulation_new(const struct XcLattice *l,
                                uint32_t strategy_,
                                uint32_t mode_,
                                uint64_t seed,
                                uint64_t stream,
                                struct XcSimulation **out);

// # Safety
// `s` must be NULL or a handle from [`xc_simulation_new`] not yet freed.
void xc_simulation_free(struct XcSimulation *s);

// Inject an error written as `<X|Y|Z>:<cN|aN>:<pre|post>`.
//
// # Safety
// `s` must be a live handle; `event` a NUL-terminated string.
enum XcStatus xc_simulation_inject(struct XcSimulation *s, const char *event);

// Measure every ancilla. Outcomes (+1/−1, ascending ancilla index) are
// written to `outcomes`, which must hold `len >= ancilla count` entries;
// pass NULL to skip.
//
// # Safety
// `s` must be a live handle; `outcomes` NULL or valid for `len` writes.
enum XcStatus xc_simulation_measure(struct XcSimulation *s, int8_t *outcomes, size_t len);

// Solve for and apply the byproduct correction.
//
// # Safety
// `s` must be a live handle.
enum XcStatus xc_simulation_correct(struct XcSimulation *s);

// Whether every cube and defined star currently has eigenvalue +1.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum XcStatus xc_simulation_all_plus(const struct XcSimulation *s, bool *out);

// Syndrome report as JSON.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum XcStatus xc_simulation_syndromes_json(const struct XcSimulation *s, char **out);

// Full pipeline run (stream 0) with optional comma-separated error events;
// writes the run report JSON.
//
// # Safety
// `l` must be a live handle; `events` NULL or NUL-terminated; `out` writable.
enum XcStatus xc_run_report_json(const struct XcLattice *l,
                                 uint32_t strategy_,
                                 uint32_t mode_,
                                 uint64_t seed,
                                 const char *events,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XCUBE_H */
