#ifndef MOVESTAR_H
#define MOVESTAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MovestarStatus {
  MOVESTAR_STATUS_OK = 0,
  MOVESTAR_STATUS_NULL_POINTER = 1,
  MOVESTAR_STATUS_INVALID_ARGUMENT = 2,
  MOVESTAR_STATUS_UNKNOWN_VEHICLE = 3,
  MOVESTAR_STATUS_NEGATIVE_SPEED = 4,
  MOVESTAR_STATUS_INVALID_SPEED = 5,
  MOVESTAR_STATUS_EMPTY_SESSION = 6,
  MOVESTAR_STATUS_TABLE_IO = 7,
  MOVESTAR_STATUS_TABLE_INVALID = 8,
  MOVESTAR_STATUS_MODEL = 9,
  MOVESTAR_STATUS_PANIC = 10,
} MovestarStatus;

// One vehicle's emission state.
typedef struct MovestarSession MovestarSession;

// Loaded parameter and rate tables.
typedef struct MovestarTables MovestarTables;

// Energy in kJ, pollutants in g, unless the tables declare otherwise.
typedef struct MovestarEmissions {
  double energy;
  double co;
  double hc;
  double nox;
  double co2;
} MovestarEmissions;

typedef struct MovestarStep {
  uint8_t opmode;
  // kW/t
  double vsp;
  // m/s^2
  double accel;
  // Emitted during this second.
  struct MovestarEmissions emissions;
} MovestarStep;

typedef struct MovestarSummary {
  size_t seconds;
  // Metres.
  double distance;
  struct MovestarEmissions totals;
  // False when the session covered no distance; `factors` is then zeroed.
  bool factors_defined;
  // Totals per km.
  struct MovestarEmissions factors;
} MovestarSummary;

// Loads the built-in tables.
//
// # Safety
// `out` must be null or valid for writes.
enum MovestarStatus movestar_tables_load_default(struct MovestarTables **out);

// Loads and validates `params.csv`/`rates.csv` style files.
//
// # Safety
// Paths must be null or NUL-terminated UTF-8; `out` must be null or valid
// for writes.
enum MovestarStatus movestar_tables_load(const char *params_path,
                                         const char *rates_path,
                                         struct MovestarTables **out);

// # Safety
// `tables` must be null or a handle from a `movestar_tables_load*` call that
// has not been freed.
void movestar_tables_free(struct MovestarTables *tables);

// Starts a session for `veh_type` 1 (light-duty vehicle) or 2 (light-duty
// truck).
//
// # Safety
// `tables` must be null or a live tables handle; `out` must be null or valid
// for writes.
enum MovestarStatus movestar_session_create(const struct MovestarTables *tables,
                                            int32_t veh_type,
                                            struct MovestarSession **out);

// Advances one second at `speed` m/s. On error the session is unchanged.
//
// # Safety
// `session` must be null or a live session handle; `out` must be null or
// valid for writes.
enum MovestarStatus movestar_session_step(struct MovestarSession *session,
                                          double speed,
                                          struct MovestarStep *out);

// Totals and per-km factors over all steps so far. The session remains usable.
//
// # Safety
// `session` must be null or a live session handle; `out` must be null or
// valid for writes.
enum MovestarStatus movestar_session_finalize(const struct MovestarSession *session,
                                              struct MovestarSummary *out);

// # Safety
// `session` must be null or a live session handle.
void movestar_session_destroy(struct MovestarSession *session);

// Static, NUL-terminated description of `status`.
const char *movestar_status_message(enum MovestarStatus status);

#endif  /* MOVESTAR_H */
