//! Relation variants and public-signal layouts.
//!
//! Four circuit flavors expressed as pure predicates over a public-signal
//! vector and a private witness. Signals travel as field elements in a
//! fixed canonical order — `(out, lat_t, lon_t, r2, cos_scaled)` followed
//! by whichever context slots the relation binds — so a signal vector can
//! be serialized, authenticated, and tampered with slot-by-slot exactly
//! the way a verifier-facing proof transcript can.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{ContextTuple, FieldElement};
use crate::geo::{within_radius, GeoParams, GeoPoint};

/// The four circuit flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    /// The unconstrained-hint variant: `out` is a free prover input, so
    /// the distance comparison never constrains anything.
    PrototypeBuggy,
    /// Sound distance comparison, no context binding (5 signals).
    SoundGeoOnly,
    /// Sound distance plus in-proof session binding: epoch and nonce
    /// digest (7 signals).
    LevelII,
    /// Sound distance plus full context binding: context digest, epoch,
    /// and nonce digest (8 signals).
    LevelIII,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::PrototypeBuggy,
        RelationKind::SoundGeoOnly,
        RelationKind::LevelII,
        RelationKind::LevelIII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::PrototypeBuggy => "prototype-buggy",
            RelationKind::SoundGeoOnly => "sound-geo-only",
            RelationKind::LevelII => "level-ii",
            RelationKind::LevelIII => "level-iii",
        }
    }

    /// Number of public signals the kind exposes.
    pub fn signal_count(self) -> usize {
        match self {
            RelationKind::PrototypeBuggy | RelationKind::SoundGeoOnly => 5,
            RelationKind::LevelII => 7,
            RelationKind::LevelIII => 8,
        }
    }

    /// Index of the context-digest slot, when bound.
    pub fn ctx_digest_slot(self) -> Option<usize> {
        matches!(self, RelationKind::LevelIII).then_some(5)
    }

    /// Index of the epoch slot, when bound.
    pub fn epoch_slot(self) -> Option<usize> {
        match self {
            RelationKind::LevelII => Some(5),
            RelationKind::LevelIII => Some(6),
            _ => None,
        }
    }

    /// Index of the nonce-digest slot, when bound.
    pub fn challenge_digest_slot(self) -> Option<usize> {
        match self {
            RelationKind::LevelII => Some(6),
            RelationKind::LevelIII => Some(7),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StatementError {
    #[error("{kind:?} expects {expected} signals, got {got}")]
    LayoutMismatch {
        kind: RelationKind,
        expected: usize,
        got: usize,
    },
    #[error("{0:?} does not bind the supplied context inputs")]
    UnexpectedContext(RelationKind),
    #[error("{0:?} requires context inputs that were not supplied")]
    MissingContext(RelationKind),
    #[error("signal {0} does not decode to an in-range geo value")]
    UndecodableGeo(usize),
    #[error(transparent)]
    Codec(#[from] crate::codec::CodecError),
}

/// A canonical public-signal vector tagged with its relation kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicSignals {
    kind: RelationKind,
    signals: Vec<FieldElement>,
}

impl PublicSignals {
    /// Wrap a raw signal vector; the length must match the kind's layout.
    pub fn from_signals(kind: RelationKind, signals: Vec<FieldElement>) -> Result<Self, StatementError> {
        if signals.len() != kind.signal_count() {
            return Err(StatementError::LayoutMismatch {
                kind,
                expected: kind.signal_count(),
                got: signals.len(),
            });
        }
        Ok(Self { kind, signals })
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn signals(&self) -> &[FieldElement] {
        &self.signals
    }

    pub fn out(&self) -> &FieldElement {
        &self.signals[0]
    }

    pub fn set_out(&mut self, out: FieldElement) {
        self.signals[0] = out;
    }

    /// Overwrite one slot; the tamper primitive used by the adversarial
    /// experiments.
    pub fn set_signal(&mut self, idx: usize, value: FieldElement) {
        self.signals[idx] = value;
    }

    pub fn ctx_digest(&self) -> Option<&FieldElement> {
        self.kind.ctx_digest_slot().map(|i| &self.signals[i])
    }

    pub fn epoch(&self) -> Option<&FieldElement> {
        self.kind.epoch_slot().map(|i| &self.signals[i])
    }

    pub fn challenge_digest(&self) -> Option<&FieldElement> {
        self.kind.challenge_digest_slot().map(|i| &self.signals[i])
    }

    /// Decode slots 1..=4 back into the trusted geofence parameters.
    pub fn geo_params(&self) -> Result<GeoParams, StatementError> {
        let lat = fe_to_i64(&self.signals[1]).ok_or(StatementError::UndecodableGeo(1))?;
        let lon = fe_to_i64(&self.signals[2]).ok_or(StatementError::UndecodableGeo(2))?;
        let target = GeoPoint::new(lat, lon).map_err(|_| StatementError::UndecodableGeo(1))?;
        let r2 = fe_to_u64(&self.signals[3]).ok_or(StatementError::UndecodableGeo(3))?;
        let cos = fe_to_u64(&self.signals[4])
            .and_then(|v| u32::try_from(v).ok())
            .ok_or(StatementError::UndecodableGeo(4))?;
        Ok(GeoParams {
            target,
            r2_udeg2: r2,
            cos_scaled: cos,
        })
    }

    /// Canonical serialization: a JSON array of decimal strings in signal
    /// order. This exact byte string is what proofs authenticate.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.signals).expect("vec of strings always serializes")
    }
}

fn fe_to_i64(fe: &FieldElement) -> Option<i64> {
    let dec = fe.to_decimal();
    if let Ok(v) = dec.parse::<i64>() {
        return Some(v);
    }
    // Large elements may be embeddings of negative values: x ↦ p + x.
    let p = num_bigint::BigUint::parse_bytes(crate::codec::FIELD_PRIME_DEC.as_bytes(), 10)?;
    let v = num_bigint::BigUint::parse_bytes(dec.as_bytes(), 10)?;
    let mag: u64 = (&p - &v).try_into().ok()?;
    i64::try_from(mag).ok().map(|m| -m)
}

fn fe_to_u64(fe: &FieldElement) -> Option<u64> {
    fe.to_decimal().parse::<u64>().ok()
}

/// The prover's private input: a claimed position, plus the free `out`
/// hint that only the unconstrained prototype relation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: GeoPoint,
    pub claimed_out: u8,
}

impl Witness {
    pub fn new(point: GeoPoint) -> Self {
        Self {
            point,
            claimed_out: 1,
        }
    }

    pub fn with_claimed_out(point: GeoPoint, claimed_out: u8) -> Self {
        Self { point, claimed_out }
    }
}

/// Assemble the honest public-signal vector for a kind: `out = 1`, the
/// geofence parameters, then the context slots the kind binds. Context
/// inputs must be present exactly when the kind needs them (both
/// session-bound kinds need the tuple for its epoch; only the fully bound
/// kind embeds the tuple's digest).
pub fn build_public_signals(
    kind: RelationKind,
    params: &GeoParams,
    ctx: Option<&ContextTuple>,
    nonce_digest: Option<&FieldElement>,
) -> Result<PublicSignals, StatementError> {
    let mut signals = vec![
        FieldElement::from_u64(1),
        FieldElement::from_coord(params.target.lat_udeg),
        FieldElement::from_coord(params.target.lon_udeg),
        FieldElement::from_u64(params.r2_udeg2),
        FieldElement::from_u64(params.cos_scaled as u64),
    ];
    match kind {
        RelationKind::PrototypeBuggy | RelationKind::SoundGeoOnly => {
            if ctx.is_some() || nonce_digest.is_some() {
                return Err(StatementError::UnexpectedContext(kind));
            }
        }
        RelationKind::LevelII => {
            let (ctx, n) = ctx.zip(nonce_digest).ok_or(StatementError::MissingContext(kind))?;
            signals.push(FieldElement::from_u64(ctx.epoch));
            signals.push(n.clone());
        }
        RelationKind::LevelIII => {
            let (ctx, n) = ctx.zip(nonce_digest).ok_or(StatementError::MissingContext(kind))?;
            signals.push(ctx.digest()?);
            signals.push(FieldElement::from_u64(ctx.epoch));
            signals.push(n.clone());
        }
    }
    PublicSignals::from_signals(kind, signals)
}

/// Evaluate the relation predicate. Sound kinds hold iff the witness
/// point is within the encoded fence and `out = 1`; the unconstrained
/// prototype holds whenever `out` equals the prover's free hint,
/// regardless of distance.
pub fn eval_relation(kind: RelationKind, pub_signals: &PublicSignals, w: &Witness) -> Result<bool, StatementError> {
    if pub_signals.kind() != kind {
        return Err(StatementError::LayoutMismatch {
            kind,
            expected: kind.signal_count(),
            got: pub_signals.signals().len(),
        });
    }
    match kind {
        RelationKind::PrototypeBuggy => {
            Ok(*pub_signals.out() == FieldElement::from_u64(w.claimed_out as u64))
        }
        _ => {
            let params = pub_signals.geo_params()?;
            Ok(*pub_signals.out() == FieldElement::from_u64(1) && within_radius(w.point, &params))
        }
    }
}
