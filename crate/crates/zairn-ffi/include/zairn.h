#ifndef ZAIRN_H
#define ZAIRN_H

/* Generated by cbindgen from the zairn-ffi crate; regenerate with `cargo build -p zairn-ffi` instead of editing. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>


// Adversarial scenario selector for [`zairn_run_scenario`].
typedef enum ZairnScenario {
  // Honest claim with the correct context.
  ZAIRN_SCENARIO_HONEST = 0,
  // Replay of one drop's transcript against another drop.
  ZAIRN_SCENARIO_CROSS_DROP = 1,
  // Claim for an expired epoch.
  ZAIRN_SCENARIO_STALE_EPOCH = 2,
  // Modified client skips its local context check.
  ZAIRN_SCENARIO_APP_BYPASS = 3,
  // Tampered public signals with the original proof.
  ZAIRN_SCENARIO_SIG_TAMPER = 4,
  // Transfer across challenge sessions.
  ZAIRN_SCENARIO_CROSS_SESSION = 5,
  // Transfer within one shared-nonce epoch.
  ZAIRN_SCENARIO_SAME_EPOCH = 6,
} ZairnScenario;

// Result code of every fallible call.
typedef enum ZairnStatus {
  // Success.
  ZAIRN_STATUS_OK = 0,
  // A required pointer argument was null.
  ZAIRN_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  ZAIRN_STATUS_INVALID_UTF8 = 2,
  // An argument was outside its domain (range, length, or unknown id).
  ZAIRN_STATUS_INVALID_ARGUMENT = 3,
  // The output buffer is too small; re-query the required length.
  ZAIRN_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal invariant failed.
  ZAIRN_STATUS_INTERNAL_ERROR = 5,
} ZairnStatus;

// Verifier strategy selector (mirrors the library's eight strategies).
typedef enum ZairnStrategy {
  // No context binding.
  ZAIRN_STRATEGY_NO_BINDING = 0,
  // Client-side context check only.
  ZAIRN_STRATEGY_CLIENT_CHECK = 1,
  // Server recomputes context digests from its own records.
  ZAIRN_STRATEGY_SERVER_RECOMPUTE = 2,
  // Server compares against stored challenge digests.
  ZAIRN_STRATEGY_SERVER_STORED = 3,
  // Stored digests plus a challenge-digest equality check.
  ZAIRN_STRATEGY_SERVER_STORED_HARDENED = 4,
  // Server-signed challenge token.
  ZAIRN_STRATEGY_SERVER_SIGNED_TOKEN = 5,
  // Session digest carried inside the proof statement.
  ZAIRN_STRATEGY_IN_PROOF_SESSION = 6,
  // Full context digest carried inside the proof statement.
  ZAIRN_STRATEGY_IN_PROOF_FULL_CONTEXT = 7,
} ZairnStrategy;

// Outcome of a verification or scenario run.
typedef enum ZairnVerdict {
  ZAIRN_VERDICT_ACCEPT = 0,
  // Proof failed cryptographic verification.
  ZAIRN_VERDICT_REJECT_BAD_PROOF = 1,
  // Context digest or field mismatch.
  ZAIRN_VERDICT_REJECT_CTX_MISMATCH = 2,
  // Nonce resolves to no live challenge session.
  ZAIRN_VERDICT_REJECT_NONCE_UNKNOWN = 3,
  // Claimed epoch is not the current epoch.
  ZAIRN_VERDICT_REJECT_STALE_EPOCH = 4,
  // Challenge token failed authentication.
  ZAIRN_VERDICT_REJECT_TOKEN_INVALID = 5,
  // Stored challenge digest mismatch.
  ZAIRN_VERDICT_REJECT_DIGEST_MISMATCH = 6,
  // The scenario does not apply to this strategy's relation.
  ZAIRN_VERDICT_NOT_APPLICABLE = 7,
} ZairnVerdict;

// Opaque challenge-issuance server. Obtain with [`zairn_server_new`],
// release with [`zairn_server_free`]. Not thread-safe; guard externally.
typedef struct ZairnServer ZairnServer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Decimal digest of an application context tuple (drop id, policy
// version, epoch), reduced into the proof system's scalar field.
//
// Behaves as a length query when `buf` is null or `buf_len` is 0: the
// required capacity (including NUL) is stored in `written`.
//
// # Safety
// `drop_id` and `policy_version` must be valid NUL-terminated C
// strings; `buf` must point to `buf_len` writable bytes when non-null;
// `written` must be a valid pointer.
enum ZairnStatus zairn_context_digest_dec(const char *drop_id,
                                          const char *policy_version,
                                          uint64_t epoch,
                                          char *buf,
                                          size_t buf_len,
                                          size_t *written);

// Decimal digest of a 16-byte server nonce.
//
// # Safety
// `nonce` must point to `nonce_len` readable bytes; `buf` must point to
// `buf_len` writable bytes when non-null; `written` must be valid.
enum ZairnStatus zairn_nonce_digest_dec(const uint8_t *nonce,
                                        size_t nonce_len,
                                        char *buf,
                                        size_t buf_len,
                                        size_t *written);

// Fixed-point geofence predicate: is `point` within `radius_m` of
// `target`, using the same integer arithmetic as the proof relation?
// Coordinates are integer microdegrees.
//
// # Safety
// `result` must be a valid pointer.
enum ZairnStatus zairn_within_radius(int64_t target_lat_udeg,
                                     int64_t target_lon_udeg,
                                     double radius_m,
                                     int64_t point_lat_udeg,
                                     int64_t point_lon_udeg,
                                     bool *result);

// End-to-end unlock latency in milliseconds under the fitted affine
// model, for `k` sequential unlocks at the given round-trip time.
//
// # Safety
// `result` must be a valid pointer.
enum ZairnStatus zairn_e2e_latency_ms(enum ZairnStrategy strategy,
                                      bool epoch_derived_nonce,
                                      uint64_t k,
                                      uint64_t rtt_ms,
                                      uint64_t *result);

// Smallest `k` whose end-to-end latency exceeds the interactivity
// threshold; stores 0 when no such `k` exists.
//
// # Safety
// `result` must be a valid pointer.
enum ZairnStatus zairn_k_star(enum ZairnStrategy strategy,
                              bool epoch_derived_nonce,
                              uint64_t rtt_ms,
                              uint64_t *result);

// Run one adversarial scenario against one verifier strategy under the
// scenario's standard nonce policy with no injected faults, and store
// the verdict.
//
// # Safety
// `verdict` must be a valid pointer.
enum ZairnStatus zairn_run_scenario(enum ZairnScenario scenario,
                                    enum ZairnStrategy strategy,
                                    uint64_t seed,
                                    enum ZairnVerdict *verdict);

// Allocate a challenge server seeded deterministically. Never returns
// null. Release with [`zairn_server_free`].
struct ZairnServer *zairn_server_new(uint64_t seed);

// Release a server handle. Passing null is a no-op.
//
// # Safety
// `server` must be null or a pointer returned by [`zairn_server_new`]
// that has not already been freed.
void zairn_server_free(struct ZairnServer *server);

// Register a drop (geofenced unlock target) with the server.
//
// # Safety
// `server` must be a live handle; `drop_id` and `policy_version` must
// be valid NUL-terminated C strings.
enum ZairnStatus zairn_server_add_drop(struct ZairnServer *server,
                                       const char *drop_id,
                                       int64_t lat_udeg,
                                       int64_t lon_udeg,
                                       double radius_m,
                                       const char *policy_version);

// Current epoch counter of the server.
//
// # Safety
// `server` must be a live handle; `epoch` must be a valid pointer.
enum ZairnStatus zairn_server_current_epoch(const struct ZairnServer *server, uint64_t *epoch);

// Advance the server to the next epoch, expiring outstanding
// challenges.
//
// # Safety
// `server` must be a live handle.
enum ZairnStatus zairn_server_advance_epoch(struct ZairnServer *server);

// Issue a challenge for a registered drop and return the challenge
// bundle (nonce, digests, signed token) as JSON. Supports the length
// query convention.
//
// # Safety
// `server` must be a live handle; `drop_id` must be a valid
// NUL-terminated C string; `buf` must point to `buf_len` writable bytes
// when non-null; `written` must be a valid pointer.
enum ZairnStatus zairn_server_issue_challenge(struct ZairnServer *server,
                                              const char *drop_id,
                                              bool epoch_derived_nonce,
                                              char *buf,
                                              size_t buf_len,
                                              size_t *written);

// Serialize the server's public state (drops, records, epoch — never
// key material) as JSON. Supports the length query convention.
//
// # Safety
// `server` must be a live handle; `buf` must point to `buf_len`
// writable bytes when non-null; `written` must be a valid pointer.
enum ZairnStatus zairn_server_export_json(const struct ZairnServer *server,
                                          char *buf,
                                          size_t buf_len,
                                          size_t *written);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ZAIRN_H */
