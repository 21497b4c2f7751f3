#ifndef PEMFC_H
#define PEMFC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum PemfcStatus {
  /**
   * Success.
   */
  PEMFC_STATUS_OK = 0,
  /**
   * File or I/O failure.
   */
  PEMFC_STATUS_IO = 1,
  /**
   * Invalid configuration or argument.
   */
  PEMFC_STATUS_VALIDATION = 2,
  /**
   * Infeasible operating point or inadmissible state.
   */
  PEMFC_STATUS_INFEASIBLE = 3,
  /**
   * Solver failure.
   */
  PEMFC_STATUS_NUMERICAL = 4,
  /**
   * A required pointer was null.
   */
  PEMFC_STATUS_NULL_POINTER = 5,
  /**
   * Internal panic caught at the boundary.
   */
  PEMFC_STATUS_PANIC = 6,
} PemfcStatus;

/**
 * Opaque simulator handle.
 */
typedef struct PemfcSimulator PemfcSimulator;

/**
 * Voltage breakdown at one operating point.
 */
typedef struct PemfcVoltage {
  /**
   * Current density, A/m2.
   */
  double i_fc;
  /**
   * Cell voltage, V.
   */
  double u_cell;
  /**
   * Equilibrium potential, V.
   */
  double u_eq;
  /**
   * Cathode activation overpotential, V.
   */
  double eta_c;
  /**
   * Protonic ohmic drop, V.
   */
  double dv_ohmic_p;
  /**
   * Electronic ohmic drop, V.
   */
  double dv_ohmic_e;
  /**
   * Concentration loss, V.
   */
  double dv_conc;
  /**
   * Internal current density, A/m2.
   */
  double i_n;
  /**
   * Short-circuit current density, A/m2.
   */
  double i_sc;
  /**
   * Proton resistance, ohm m2.
   */
  double r_p;
} PemfcVoltage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a simulator of the default cell, mesh and solver settings.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum PemfcStatus pemfc_simulator_new_default(struct PemfcSimulator **out);

/**
 * Creates a simulator from scenario TOML text (cell, mesh, solver and
 * initial tables are used; the run table is ignored).
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer to
 * writable storage for a handle.
 */
enum PemfcStatus pemfc_simulator_from_toml(const char *toml, struct PemfcSimulator **out);

/**
 * Releases a simulator. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from a constructor that was not yet freed.
 */
void pemfc_simulator_free(struct PemfcSimulator *sim);

/**
 * Restores the initial state.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum PemfcStatus pemfc_reset(struct PemfcSimulator *sim);

/**
 * Solves the steady state at `i_fc` (A/m2) starting from the current state,
 * keeps it as the new state and writes its voltage breakdown.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum PemfcStatus pemfc_steady(struct PemfcSimulator *sim, double i_fc, struct PemfcVoltage *out);

/**
 * Steady polarization curve over `n` strictly increasing currents. Writes
 * the cell voltage (NaN when infeasible) and a feasibility flag per point.
 * The state is left unchanged.
 *
 * # Safety
 * `sim` must be a live handle; `currents`, `u_cell` and `feasible` must
 * point to `n` elements each.
 */
enum PemfcStatus pemfc_sweep(struct PemfcSimulator *sim,
                             const double *currents,
                             uintptr_t n,
                             double *u_cell,
                             uint8_t *feasible);

/**
 * Integrates the current state for `duration` seconds at constant `i_fc`
 * and writes the final voltage breakdown.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum PemfcStatus pemfc_advance(struct PemfcSimulator *sim,
                               double i_fc,
                               double duration,
                               struct PemfcVoltage *out);

/**
 * Number of entries of the flat state vector.
 *
 * # Safety
 * `sim` must be a live handle or null (returns 0).
 */
uintptr_t pemfc_state_len(const struct PemfcSimulator *sim);

/**
 * Copies the flat state vector into `buf` of capacity `len`.
 *
 * # Safety
 * `sim` must be a live handle and `buf` must point to `len` writable
 * doubles.
 */
enum PemfcStatus pemfc_state_copy(const struct PemfcSimulator *sim, double *buf, uintptr_t len);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *pemfc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pemfc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEMFC_H */
