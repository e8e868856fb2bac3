//! C ABI over the proximity-proof simulator: context and nonce digests,
//! the fixed-point geofence predicate, the deployment latency model, the
//! adversarial scenario runner, and an opaque challenge-server handle.
//!
//! Conventions:
//! - Every fallible function returns a [`ZairnStatus`]; results travel
//!   through out-pointers.
//! - String outputs use a caller-supplied buffer plus a written-length
//!   out-parameter. Passing a null buffer (or zero capacity) performs a
//!   length query: the required capacity (including the NUL terminator)
//!   is stored and the call returns OK.
//! - The server handle is allocated by [`zairn_server_new`] and must be
//!   released exactly once with [`zairn_server_free`].

use std::ffi::CStr;
use std::os::raw::c_char;

use zairn_core::codec::{ContextTuple, Nonce, NONCE_LEN};
use zairn_core::deploy::{e2e_latency, k_star, LatencyParams};
use zairn_core::scenario::{run_scenario, ScenarioId, ScenarioOutcome};
use zairn_core::server::{
    FaultSet, NoncePolicy, RejectReason, ServerState, Strategy, Verdict,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZairnStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was outside its domain (range, length, or unknown id).
    InvalidArgument = 3,
    /// The output buffer is too small; re-query the required length.
    BufferTooSmall = 4,
    /// An internal invariant failed.
    InternalError = 5,
}

/// Verifier strategy selector (mirrors the library's eight strategies).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZairnStrategy {
    /// No context binding.
    NoBinding = 0,
    /// Client-side context check only.
    ClientCheck = 1,
    /// Server recomputes context digests from its own records.
    ServerRecompute = 2,
    /// Server compares against stored challenge digests.
    ServerStored = 3,
    /// Stored digests plus a challenge-digest equality check.
    ServerStoredHardened = 4,
    /// Server-signed challenge token.
    ServerSignedToken = 5,
    /// Session digest carried inside the proof statement.
    InProofSession = 6,
    /// Full context digest carried inside the proof statement.
    InProofFullContext = 7,
}

impl ZairnStrategy {
    fn to_core(self) -> Strategy {
        match self {
            ZairnStrategy::NoBinding => Strategy::S1,
            ZairnStrategy::ClientCheck => Strategy::S2a,
            ZairnStrategy::ServerRecompute => Strategy::S2b,
            ZairnStrategy::ServerStored => Strategy::S2cDefault,
            ZairnStrategy::ServerStoredHardened => Strategy::S2cHardened,
            ZairnStrategy::ServerSignedToken => Strategy::S2d,
            ZairnStrategy::InProofSession => Strategy::S3a,
            ZairnStrategy::InProofFullContext => Strategy::S3b,
        }
    }
}

/// Adversarial scenario selector for [`zairn_run_scenario`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZairnScenario {
    /// Honest claim with the correct context.
    Honest = 0,
    /// Replay of one drop's transcript against another drop.
    CrossDrop = 1,
    /// Claim for an expired epoch.
    StaleEpoch = 2,
    /// Modified client skips its local context check.
    AppBypass = 3,
    /// Tampered public signals with the original proof.
    SigTamper = 4,
    /// Transfer across challenge sessions.
    CrossSession = 5,
    /// Transfer within one shared-nonce epoch.
    SameEpoch = 6,
}

impl ZairnScenario {
    fn to_core(self) -> ScenarioId {
        match self {
            ZairnScenario::Honest => ScenarioId::Honest,
            ZairnScenario::CrossDrop => ScenarioId::CrossDrop,
            ZairnScenario::StaleEpoch => ScenarioId::StaleEpoch,
            ZairnScenario::AppBypass => ScenarioId::AppBypass,
            ZairnScenario::SigTamper => ScenarioId::SigTamper,
            ZairnScenario::CrossSession => ScenarioId::CrossSession,
            ZairnScenario::SameEpoch => ScenarioId::SameEpoch,
        }
    }
}

/// Outcome of a verification or scenario run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZairnVerdict {
    Accept = 0,
    /// Proof failed cryptographic verification.
    RejectBadProof = 1,
    /// Context digest or field mismatch.
    RejectCtxMismatch = 2,
    /// Nonce resolves to no live challenge session.
    RejectNonceUnknown = 3,
    /// Claimed epoch is not the current epoch.
    RejectStaleEpoch = 4,
    /// Challenge token failed authentication.
    RejectTokenInvalid = 5,
    /// Stored challenge digest mismatch.
    RejectDigestMismatch = 6,
    /// The scenario does not apply to this strategy's relation.
    NotApplicable = 7,
}

fn verdict_code(v: Verdict) -> ZairnVerdict {
    match v {
        Verdict::Accept => ZairnVerdict::Accept,
        Verdict::Reject(RejectReason::BadProof) => ZairnVerdict::RejectBadProof,
        Verdict::Reject(RejectReason::CtxMismatch) => ZairnVerdict::RejectCtxMismatch,
        Verdict::Reject(RejectReason::NonceUnknown) => ZairnVerdict::RejectNonceUnknown,
        Verdict::Reject(RejectReason::StaleEpoch) => ZairnVerdict::RejectStaleEpoch,
        Verdict::Reject(RejectReason::TokenInvalid) => ZairnVerdict::RejectTokenInvalid,
        Verdict::Reject(RejectReason::DigestMismatch) => ZairnVerdict::RejectDigestMismatch,
    }
}

/// Opaque challenge-issuance server. Obtain with [`zairn_server_new`],
/// release with [`zairn_server_free`]. Not thread-safe; guard externally.
pub struct ZairnServer {
    inner: ServerState,
}

/// # Safety
/// `s` must be a valid NUL-terminated C string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ZairnStatus> {
    if s.is_null() {
        return Err(ZairnStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| ZairnStatus::InvalidUtf8)
}

/// # Safety
/// `buf` must point to `buf_len` writable bytes when non-null, and
/// `written` must be a valid pointer.
unsafe fn write_string(
    value: &str,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> ZairnStatus {
    if written.is_null() {
        return ZairnStatus::NullPointer;
    }
    let needed = value.len() + 1;
    *written = needed;
    if buf.is_null() || buf_len == 0 {
        return ZairnStatus::Ok; // length query
    }
    if buf_len < needed {
        return ZairnStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(value.as_ptr(), buf.cast::<u8>(), value.len());
    *buf.add(value.len()) = 0;
    ZairnStatus::Ok
}

/// Decimal digest of an application context tuple (drop id, policy
/// version, epoch), reduced into the proof system's scalar field.
///
/// Behaves as a length query when `buf` is null or `buf_len` is 0: the
/// required capacity (including NUL) is stored in `written`.
///
/// # Safety
/// `drop_id` and `policy_version` must be valid NUL-terminated C
/// strings; `buf` must point to `buf_len` writable bytes when non-null;
/// `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_context_digest_dec(
    drop_id: *const c_char,
    policy_version: *const c_char,
    epoch: u64,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> ZairnStatus {
    let drop_id = match read_str(drop_id) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let policy_version = match read_str(policy_version) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let digest = match ContextTuple::new(drop_id, policy_version, epoch).digest() {
        Ok(d) => d,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    write_string(&digest.to_decimal(), buf, buf_len, written)
}

/// Decimal digest of a 16-byte server nonce.
///
/// # Safety
/// `nonce` must point to `nonce_len` readable bytes; `buf` must point to
/// `buf_len` writable bytes when non-null; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn zairn_nonce_digest_dec(
    nonce: *const u8,
    nonce_len: usize,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> ZairnStatus {
    if nonce.is_null() {
        return ZairnStatus::NullPointer;
    }
    if nonce_len != NONCE_LEN {
        return ZairnStatus::InvalidArgument;
    }
    let bytes = std::slice::from_raw_parts(nonce, nonce_len);
    let nonce = match Nonce::new(bytes.to_vec()) {
        Ok(n) => n,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    write_string(&nonce.digest().to_decimal(), buf, buf_len, written)
}

/// Fixed-point geofence predicate: is `point` within `radius_m` of
/// `target`, using the same integer arithmetic as the proof relation?
/// Coordinates are integer microdegrees.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_within_radius(
    target_lat_udeg: i64,
    target_lon_udeg: i64,
    radius_m: f64,
    point_lat_udeg: i64,
    point_lon_udeg: i64,
    result: *mut bool,
) -> ZairnStatus {
    if result.is_null() {
        return ZairnStatus::NullPointer;
    }
    let target = match zairn_core::geo::GeoPoint::new(target_lat_udeg, target_lon_udeg) {
        Ok(p) => p,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    let params = match zairn_core::geo::GeoParams::new(target, radius_m) {
        Ok(p) => p,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    let point = match zairn_core::geo::GeoPoint::new(point_lat_udeg, point_lon_udeg) {
        Ok(p) => p,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    *result = zairn_core::geo::within_radius(point, &params);
    ZairnStatus::Ok
}

fn policy(epoch_derived_nonce: bool) -> NoncePolicy {
    if epoch_derived_nonce {
        NoncePolicy::EpochDerived
    } else {
        NoncePolicy::PerRequest
    }
}

/// End-to-end unlock latency in milliseconds under the fitted affine
/// model, for `k` sequential unlocks at the given round-trip time.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_e2e_latency_ms(
    strategy: ZairnStrategy,
    epoch_derived_nonce: bool,
    k: u64,
    rtt_ms: u64,
    result: *mut u64,
) -> ZairnStatus {
    if result.is_null() {
        return ZairnStatus::NullPointer;
    }
    if k == 0 {
        return ZairnStatus::InvalidArgument;
    }
    *result = e2e_latency(
        &LatencyParams::default(),
        strategy.to_core(),
        policy(epoch_derived_nonce),
        k,
        rtt_ms,
    );
    ZairnStatus::Ok
}

/// Smallest `k` whose end-to-end latency exceeds the interactivity
/// threshold; stores 0 when no such `k` exists.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_k_star(
    strategy: ZairnStrategy,
    epoch_derived_nonce: bool,
    rtt_ms: u64,
    result: *mut u64,
) -> ZairnStatus {
    if result.is_null() {
        return ZairnStatus::NullPointer;
    }
    *result = k_star(
        &LatencyParams::default(),
        strategy.to_core(),
        policy(epoch_derived_nonce),
        rtt_ms,
    )
    .unwrap_or(0);
    ZairnStatus::Ok
}

/// Run one adversarial scenario against one verifier strategy under the
/// scenario's standard nonce policy with no injected faults, and store
/// the verdict.
///
/// # Safety
/// `verdict` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_run_scenario(
    scenario: ZairnScenario,
    strategy: ZairnStrategy,
    seed: u64,
    verdict: *mut ZairnVerdict,
) -> ZairnStatus {
    if verdict.is_null() {
        return ZairnStatus::NullPointer;
    }
    let id = scenario.to_core();
    let outcome = run_scenario(
        id,
        strategy.to_core(),
        id.matrix_policy(),
        FaultSet::none(),
        seed,
    );
    *verdict = match outcome {
        ScenarioOutcome::Applicable(v) => verdict_code(v),
        ScenarioOutcome::NotApplicable => ZairnVerdict::NotApplicable,
    };
    ZairnStatus::Ok
}

/// Allocate a challenge server seeded deterministically. Never returns
/// null. Release with [`zairn_server_free`].
#[no_mangle]
pub extern "C" fn zairn_server_new(seed: u64) -> *mut ZairnServer {
    Box::into_raw(Box::new(ZairnServer {
        inner: ServerState::new(seed),
    }))
}

/// Release a server handle. Passing null is a no-op.
///
/// # Safety
/// `server` must be null or a pointer returned by [`zairn_server_new`]
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_free(server: *mut ZairnServer) {
    if !server.is_null() {
        drop(Box::from_raw(server));
    }
}

/// Register a drop (geofenced unlock target) with the server.
///
/// # Safety
/// `server` must be a live handle; `drop_id` and `policy_version` must
/// be valid NUL-terminated C strings.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_add_drop(
    server: *mut ZairnServer,
    drop_id: *const c_char,
    lat_udeg: i64,
    lon_udeg: i64,
    radius_m: f64,
    policy_version: *const c_char,
) -> ZairnStatus {
    let Some(server) = server.as_mut() else {
        return ZairnStatus::NullPointer;
    };
    let drop_id = match read_str(drop_id) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let policy_version = match read_str(policy_version) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match server
        .inner
        .add_drop(drop_id, lat_udeg, lon_udeg, radius_m, policy_version)
    {
        Ok(()) => ZairnStatus::Ok,
        Err(_) => ZairnStatus::InvalidArgument,
    }
}

/// Current epoch counter of the server.
///
/// # Safety
/// `server` must be a live handle; `epoch` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_current_epoch(
    server: *const ZairnServer,
    epoch: *mut u64,
) -> ZairnStatus {
    let Some(server) = server.as_ref() else {
        return ZairnStatus::NullPointer;
    };
    if epoch.is_null() {
        return ZairnStatus::NullPointer;
    }
    *epoch = server.inner.current_epoch();
    ZairnStatus::Ok
}

/// Advance the server to the next epoch, expiring outstanding
/// challenges.
///
/// # Safety
/// `server` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_advance_epoch(server: *mut ZairnServer) -> ZairnStatus {
    let Some(server) = server.as_mut() else {
        return ZairnStatus::NullPointer;
    };
    server.inner.advance_epoch();
    ZairnStatus::Ok
}

/// Issue a challenge for a registered drop and return the challenge
/// bundle (nonce, digests, signed token) as JSON. Supports the length
/// query convention.
///
/// # Safety
/// `server` must be a live handle; `drop_id` must be a valid
/// NUL-terminated C string; `buf` must point to `buf_len` writable bytes
/// when non-null; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_issue_challenge(
    server: *mut ZairnServer,
    drop_id: *const c_char,
    epoch_derived_nonce: bool,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> ZairnStatus {
    let Some(server) = server.as_mut() else {
        return ZairnStatus::NullPointer;
    };
    let drop_id = match read_str(drop_id) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let bundle = match server
        .inner
        .issue_challenge(drop_id, policy(epoch_derived_nonce))
    {
        Ok(b) => b,
        Err(_) => return ZairnStatus::InvalidArgument,
    };
    let json = match serde_json::to_string(&bundle) {
        Ok(j) => j,
        Err(_) => return ZairnStatus::InternalError,
    };
    write_string(&json, buf, buf_len, written)
}

/// Serialize the server's public state (drops, records, epoch — never
/// key material) as JSON. Supports the length query convention.
///
/// # Safety
/// `server` must be a live handle; `buf` must point to `buf_len`
/// writable bytes when non-null; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zairn_server_export_json(
    server: *const ZairnServer,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> ZairnStatus {
    let Some(server) = server.as_ref() else {
        return ZairnStatus::NullPointer;
    };
    write_string(&server.inner.export_json(), buf, buf_len, written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn fetch_string<F>(call: F) -> String
    where
        F: Fn(*mut c_char, usize, *mut usize) -> ZairnStatus,
    {
        let mut needed = 0usize;
        assert_eq!(
            call(std::ptr::null_mut(), 0, &mut needed),
            ZairnStatus::Ok,
            "length query succeeds"
        );
        assert!(needed > 0);
        let mut buf = vec![0i8; needed];
        let mut written = 0usize;
        assert_eq!(
            call(buf.as_mut_ptr().cast::<c_char>(), buf.len(), &mut written),
            ZairnStatus::Ok
        );
        assert_eq!(written, needed);
        let bytes: Vec<u8> = buf[..needed - 1].iter().map(|&b| b as u8).collect();
        assert_eq!(buf[needed - 1], 0, "NUL terminated");
        String::from_utf8(bytes).expect("utf8")
    }

    #[test]
    fn context_digest_matches_library() {
        let drop_id = CString::new("drop-a").expect("no interior NUL");
        let version = CString::new("2").expect("no interior NUL");
        let via_ffi = fetch_string(|buf, len, written| unsafe {
            zairn_context_digest_dec(drop_id.as_ptr(), version.as_ptr(), 3, buf, len, written)
        });
        let direct = ContextTuple::new("drop-a", "2", 3)
            .digest()
            .expect("encodable")
            .to_decimal();
        assert_eq!(via_ffi, direct);
    }

    #[test]
    fn context_digest_null_and_short_buffer() {
        let version = CString::new("2").expect("no interior NUL");
        let mut written = 0usize;
        let status = unsafe {
            zairn_context_digest_dec(
                std::ptr::null(),
                version.as_ptr(),
                1,
                std::ptr::null_mut(),
                0,
                &mut written,
            )
        };
        assert_eq!(status, ZairnStatus::NullPointer);

        let drop_id = CString::new("drop-a").expect("no interior NUL");
        let mut tiny = [0i8; 4];
        let status = unsafe {
            zairn_context_digest_dec(
                drop_id.as_ptr(),
                version.as_ptr(),
                1,
                tiny.as_mut_ptr().cast::<c_char>(),
                tiny.len(),
                &mut written,
            )
        };
        assert_eq!(status, ZairnStatus::BufferTooSmall);
        assert!(written > tiny.len());
    }

    #[test]
    fn nonce_digest_rejects_wrong_length() {
        let nonce = [7u8; 16];
        let via_ffi = fetch_string(|buf, len, written| unsafe {
            zairn_nonce_digest_dec(nonce.as_ptr(), nonce.len(), buf, len, written)
        });
        let direct = Nonce::from_array(nonce).digest().to_decimal();
        assert_eq!(via_ffi, direct);

        let mut written = 0usize;
        let status = unsafe {
            zairn_nonce_digest_dec(nonce.as_ptr(), 15, std::ptr::null_mut(), 0, &mut written)
        };
        assert_eq!(status, ZairnStatus::InvalidArgument);
    }

    #[test]
    fn within_radius_across_the_fence() {
        let site = zairn_core::geo::GeoPoint::new(35_660_000, 139_700_000).expect("fixture");
        for (d, want) in [(48.0, true), (52.0, false)] {
            let point =
                zairn_core::geo::offset_point(site, zairn_core::geo::Bearing::East, d)
                    .expect("offset ok");
            let mut result = false;
            let status = unsafe {
                zairn_within_radius(
                    site.lat_udeg,
                    site.lon_udeg,
                    50.0,
                    point.lat_udeg,
                    point.lon_udeg,
                    &mut result,
                )
            };
            assert_eq!(status, ZairnStatus::Ok);
            assert_eq!(result, want, "{d} m");
        }
    }

    #[test]
    fn latency_model_values() {
        let mut ms = 0u64;
        let status = unsafe {
            zairn_e2e_latency_ms(ZairnStrategy::ServerStoredHardened, true, 10, 100, &mut ms)
        };
        assert_eq!(status, ZairnStatus::Ok);
        assert_eq!(ms, 950);

        let mut k = 0u64;
        let status = unsafe { zairn_k_star(ZairnStrategy::ServerStored, false, 100, &mut k) };
        assert_eq!(status, ZairnStatus::Ok);
        assert_eq!(k, 6);

        // With an epoch-derived nonce there are no unlock round trips,
        // so the crossing comes from the per-unlock base cost alone and
        // is independent of RTT: 50 + 12*80 = 1010 > 1000.
        for rtt in [50, 300] {
            let status =
                unsafe { zairn_k_star(ZairnStrategy::InProofFullContext, true, rtt, &mut k) };
            assert_eq!(status, ZairnStatus::Ok);
            assert_eq!(k, 12);
        }
    }

    #[test]
    fn scenario_verdict_codes() {
        let mut verdict = ZairnVerdict::Accept;
        let status = unsafe {
            zairn_run_scenario(
                ZairnScenario::SameEpoch,
                ZairnStrategy::InProofFullContext,
                42,
                &mut verdict,
            )
        };
        assert_eq!(status, ZairnStatus::Ok);
        assert_eq!(verdict, ZairnVerdict::RejectCtxMismatch);

        let status = unsafe {
            zairn_run_scenario(
                ZairnScenario::SigTamper,
                ZairnStrategy::NoBinding,
                42,
                &mut verdict,
            )
        };
        assert_eq!(status, ZairnStatus::Ok);
        assert_eq!(verdict, ZairnVerdict::NotApplicable);

        let status = unsafe {
            zairn_run_scenario(
                ZairnScenario::Honest,
                ZairnStrategy::ServerSignedToken,
                42,
                &mut verdict,
            )
        };
        assert_eq!(status, ZairnStatus::Ok);
        assert_eq!(verdict, ZairnVerdict::Accept);
    }

    #[test]
    fn server_handle_lifecycle() {
        let server = zairn_server_new(42);
        assert!(!server.is_null());
        unsafe {
            let drop_id = CString::new("drop-a").expect("no interior NUL");
            let version = CString::new("2").expect("no interior NUL");
            assert_eq!(
                zairn_server_add_drop(
                    server,
                    drop_id.as_ptr(),
                    35_660_000,
                    139_700_000,
                    50.0,
                    version.as_ptr()
                ),
                ZairnStatus::Ok
            );
            assert_eq!(
                zairn_server_add_drop(
                    server,
                    drop_id.as_ptr(),
                    35_660_000,
                    139_700_000,
                    50.0,
                    version.as_ptr()
                ),
                ZairnStatus::InvalidArgument,
                "duplicate drop id"
            );

            let mut epoch = 0u64;
            assert_eq!(zairn_server_current_epoch(server, &mut epoch), ZairnStatus::Ok);
            assert_eq!(epoch, 1);
            assert_eq!(zairn_server_advance_epoch(server), ZairnStatus::Ok);
            assert_eq!(zairn_server_current_epoch(server, &mut epoch), ZairnStatus::Ok);
            assert_eq!(epoch, 2);

            let bundle_json = fetch_string(|buf, len, written| {
                zairn_server_issue_challenge(server, drop_id.as_ptr(), true, buf, len, written)
            });
            let bundle: serde_json::Value =
                serde_json::from_str(&bundle_json).expect("bundle is JSON");
            assert_eq!(bundle["drop_id"], "drop-a");
            assert_eq!(bundle["epoch"], 2);

            let missing = CString::new("no-such-drop").expect("no interior NUL");
            let mut written = 0usize;
            assert_eq!(
                zairn_server_issue_challenge(
                    server,
                    missing.as_ptr(),
                    true,
                    std::ptr::null_mut(),
                    0,
                    &mut written
                ),
                ZairnStatus::InvalidArgument
            );

            let snapshot = fetch_string(|buf, len, written| {
                zairn_server_export_json(server, buf, len, written)
            });
            assert!(snapshot.contains("drop-a"));
            assert!(!snapshot.to_lowercase().contains("key"), "no key material leaks");

            zairn_server_free(server);
            zairn_server_free(std::ptr::null_mut());
        }
    }
}
