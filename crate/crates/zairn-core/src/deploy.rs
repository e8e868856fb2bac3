//! Closed-form deployment analytics: end-to-end unlock latency, the
//! per-request-nonce latency threshold k*, and epoch-window transfer
//! exposure at venue POI densities.
//!
//! The latency constants are implementation-side modeling parameters
//! fitted so that one affine model reproduces the published end-to-end
//! figures for every strategy/policy pairing; they are not
//! externally-measured quantities. Every function here is pure.

use serde::{Deserialize, Serialize};

use crate::server::{NoncePolicy, Strategy};

/// Fitted affine latency model parameters (milliseconds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyParams {
    /// Per-session fixed cost.
    pub session_base_ms: u64,
    /// Cost per unlock (proof generation and verification).
    pub per_unlock_ms: u64,
    /// Extra cost of the signed-token round, strategy 2d only.
    pub sig_overhead_ms: u64,
    /// Responsiveness threshold used for k*.
    pub threshold_ms: u64,
}

impl Default for LatencyParams {
    fn default() -> Self {
        Self {
            session_base_ms: 50,
            per_unlock_ms: 80,
            sig_overhead_ms: 20,
            threshold_ms: 1000,
        }
    }
}

/// Challenge round trips a session of k unlocks requires: per-request
/// nonces cost one round trip per unlock (the stored-digest strategies
/// add one more for the initial session handshake); one epoch-derived
/// nonce serves the whole session, with the stored-digest strategies
/// still fetching it once.
pub fn round_trips(strategy: Strategy, policy: NoncePolicy, k: u64) -> u64 {
    let stored_digest = matches!(strategy, Strategy::S2cDefault | Strategy::S2cHardened);
    match policy {
        NoncePolicy::PerRequest => {
            if stored_digest {
                k
            } else {
                k.saturating_sub(1)
            }
        }
        NoncePolicy::EpochDerived => {
            if stored_digest {
                1
            } else {
                0
            }
        }
    }
}

/// End-to-end latency of a k-unlock session in milliseconds.
pub fn e2e_latency(
    params: &LatencyParams,
    strategy: Strategy,
    policy: NoncePolicy,
    k: u64,
    rtt_ms: u64,
) -> u64 {
    let sig = if strategy == Strategy::S2d {
        params.sig_overhead_ms
    } else {
        0
    };
    params.session_base_ms
        + k * params.per_unlock_ms
        + sig
        + round_trips(strategy, policy, k) * rtt_ms
}

/// Smallest k at which the session exceeds the responsiveness threshold;
/// `None` if no k up to 10^6 does.
pub fn k_star(
    params: &LatencyParams,
    strategy: Strategy,
    policy: NoncePolicy,
    rtt_ms: u64,
) -> Option<u64> {
    (1..=1_000_000).find(|&k| e2e_latency(params, strategy, policy, k, rtt_ms) > params.threshold_ms)
}

/// Ordered transfer pairs among k drops sharing one epoch nonce:
/// k(k-1), the session-level exposure per epoch.
pub fn epoch_vulnerable_pairs(k: u64) -> u64 {
    k.saturating_mul(k.saturating_sub(1))
}

/// Exposure over a session spanning several epochs.
pub fn session_pairs(k: u64, session_epochs: u64) -> u64 {
    session_epochs.saturating_mul(epoch_vulnerable_pairs(k))
}

/// POI density at a venue: counts within 50 m and within 100 m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueDensity {
    /// Short venue name as used in the epoch-window table.
    pub name: String,
    /// Long name as used in the density panel.
    pub station_name: String,
    pub k50: u64,
    pub k100: u64,
}

impl VenueDensity {
    fn new(name: &str, station_name: &str, k50: u64, k100: u64) -> Self {
        assert!(k50 <= k100, "the 50 m count is a subset of the 100 m count");
        Self {
            name: name.to_string(),
            station_name: station_name.to_string(),
            k50,
            k100,
        }
    }
}

/// OSM amenity/shop POI densities at the seven reference venues
/// (Overpass API snapshot, 2026-03-17).
pub fn builtin_venues() -> Vec<VenueDensity> {
    vec![
        VenueDensity::new("Shinjuku (Tokyo)", "Shinjuku Sta. (Tokyo)", 11, 26),
        VenueDensity::new("Nakano (Tokyo)", "Nakano Sta. (Tokyo)", 18, 42),
        VenueDensity::new("Kichijoji (Tokyo)", "Kichijoji Sta. (Tokyo)", 23, 80),
        VenueDensity::new("Tama-Center (Tokyo)", "Tama-Center (Tokyo)", 3, 16),
        VenueDensity::new("Times Sq. (NYC)", "Times Sq. (NYC)", 11, 40),
        VenueDensity::new("Oxford Circus (London)", "Oxford Circus (London)", 15, 49),
        VenueDensity::new("Alexanderplatz (Berlin)", "Alexanderplatz (Berlin)", 5, 23),
    ]
}

/// One row of the epoch-window exposure table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueRow {
    pub name: String,
    pub k: u64,
    pub pairs_per_epoch: u64,
    pub session_pairs: u64,
    pub full_context_pairs: u64,
}

/// Epoch-window exposure for each venue at its 50 m density: vulnerable
/// ordered pairs per 60 s epoch under session-level binding, the same
/// over a ten-epoch session, and the full-context count (always zero).
pub fn venue_report(venues: &[VenueDensity]) -> Vec<VenueRow> {
    venues
        .iter()
        .map(|v| VenueRow {
            name: v.name.clone(),
            k: v.k50,
            pairs_per_epoch: epoch_vulnerable_pairs(v.k50),
            session_pairs: session_pairs(v.k50, 10),
            full_context_pairs: 0,
        })
        .collect()
}
