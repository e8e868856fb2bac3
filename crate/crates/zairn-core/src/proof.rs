//! Idealized signal-binding proof backend.
//!
//! Stands in for a pairing-based SNARK with exactly the two properties
//! the security analysis relies on: a proof is an unforgeable tag bound
//! to its relation kind and exact public-signal vector, and the proving
//! oracle refuses to issue a proof unless the relation actually holds for
//! the supplied witness. Proofs are HMAC-SHA-256 tags under a per-keypair
//! secret that never leaves the key material; the adversary-facing
//! surface is `verify` plus previously issued proofs.

use std::fmt;
use std::sync::{Arc, Mutex};

use hmac::{Hmac, Mac};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::lp_encode;
use crate::statement::{eval_relation, PublicSignals, RelationKind, StatementError, Witness};

type HmacSha256 = Hmac<Sha256>;

#[derive(Debug, Error, PartialEq)]
pub enum ProofError {
    #[error("relation unsatisfied: the proving oracle refuses to issue a proof")]
    ProveRefused,
    #[error("keypair is for {key:?} but the signals are for {signals:?}")]
    KindMismatch {
        key: RelationKind,
        signals: RelationKind,
    },
    #[error(transparent)]
    Statement(#[from] StatementError),
}

/// Shared key material: the MAC secret plus an append-only log of every
/// signal vector the oracle has issued a proof for.
struct KeyMaterial {
    key_id: String,
    kind: RelationKind,
    secret: [u8; 32],
    issued: Mutex<Vec<PublicSignals>>,
}

impl KeyMaterial {
    fn tag(&self, pub_signals: &PublicSignals) -> [u8; 32] {
        let msg = lp_encode(&[
            self.key_id.as_bytes(),
            self.kind.name().as_bytes(),
            pub_signals.canonical_json().as_bytes(),
        ])
        .expect("key id, kind name, and signal JSON are all short");
        let mut mac = HmacSha256::new_from_slice(&self.secret).expect("any key length accepted");
        mac.update(&msg);
        mac.finalize().into_bytes().into()
    }
}

/// The proving capability. Holding it grants access to the proving
/// oracle; it is never serialized and its debug form reveals nothing.
#[derive(Clone)]
pub struct ProvingKey {
    inner: Arc<KeyMaterial>,
}

impl fmt::Debug for ProvingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProvingKey")
            .field("key_id", &self.inner.key_id)
            .field("kind", &self.inner.kind)
            .field("secret", &"<redacted>")
            .finish()
    }
}

impl ProvingKey {
    /// Issue a proof for `pub_signals` iff the relation holds for the
    /// witness. Every issuance is recorded in the oracle's audit log.
    pub fn prove(&self, pub_signals: &PublicSignals, w: &Witness) -> Result<Proof, ProofError> {
        if pub_signals.kind() != self.inner.kind {
            return Err(ProofError::KindMismatch {
                key: self.inner.kind,
                signals: pub_signals.kind(),
            });
        }
        if !eval_relation(self.inner.kind, pub_signals, w)? {
            return Err(ProofError::ProveRefused);
        }
        self.inner
            .issued
            .lock()
            .expect("issuance log lock")
            .push(pub_signals.clone());
        Ok(Proof {
            tag: self.inner.tag(pub_signals),
        })
    }

    /// Snapshot of every signal vector a proof was issued for.
    pub fn audit_log(&self) -> Vec<PublicSignals> {
        self.inner.issued.lock().expect("issuance log lock").clone()
    }
}

/// The public verification capability: checks tags, reveals no secret.
#[derive(Clone)]
pub struct VerifyingKey {
    inner: Arc<KeyMaterial>,
}

impl fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerifyingKey")
            .field("key_id", &self.inner.key_id)
            .field("kind", &self.inner.kind)
            .finish()
    }
}

impl VerifyingKey {
    pub fn key_id(&self) -> &str {
        &self.inner.key_id
    }

    pub fn kind(&self) -> RelationKind {
        self.inner.kind
    }

    /// True iff the proof's tag matches this key and the exact signal
    /// vector presented. Malformed input verifies false, never errors.
    pub fn verify(&self, pub_signals: &PublicSignals, proof: &Proof) -> bool {
        if pub_signals.kind() != self.inner.kind {
            return false;
        }
        let mut mac = HmacSha256::new_from_slice(&self.inner.secret).expect("any key length accepted");
        mac.update(
            &lp_encode(&[
                self.inner.key_id.as_bytes(),
                self.inner.kind.name().as_bytes(),
                pub_signals.canonical_json().as_bytes(),
            ])
            .expect("short fields"),
        );
        mac.verify_slice(&proof.tag).is_ok()
    }
}

/// A proving/verifying capability pair for one relation kind.
#[derive(Debug, Clone)]
pub struct KeyPair {
    pub proving: ProvingKey,
    pub verifying: VerifyingKey,
}

/// Deterministic key generation: the MAC secret and key id are derived
/// from the relation kind and seed, so equal seeds reproduce identical
/// proofs and distinct seeds yield non-cross-verifiable keys.
pub fn keygen(kind: RelationKind, seed: u64) -> KeyPair {
    let seed_dec = seed.to_string();
    let secret: [u8; 32] = Sha256::digest(
        lp_encode(&[b"mac-key" as &[u8], kind.name().as_bytes(), seed_dec.as_bytes()])
            .expect("short fields"),
    )
    .into();
    let id_digest = Sha256::digest(
        lp_encode(&[b"key-id" as &[u8], kind.name().as_bytes(), seed_dec.as_bytes()])
            .expect("short fields"),
    );
    let material = Arc::new(KeyMaterial {
        key_id: hex::encode(&id_digest[..8]),
        kind,
        secret,
        issued: Mutex::new(Vec::new()),
    });
    KeyPair {
        proving: ProvingKey {
            inner: Arc::clone(&material),
        },
        verifying: VerifyingKey { inner: material },
    }
}

/// An issued proof: a 32-byte authentication tag, rendered as 64 hex
/// characters on the wire.
#[derive(Clone, PartialEq, Eq)]
pub struct Proof {
    tag: [u8; 32],
}

impl Proof {
    pub fn to_hex(&self) -> String {
        hex::encode(self.tag)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        let tag: [u8; 32] = bytes.try_into().ok()?;
        Some(Self { tag })
    }

    /// A syntactically valid but unauthenticated proof; forgery-attempt
    /// material for the adversarial experiments.
    pub fn from_raw_tag(tag: [u8; 32]) -> Self {
        Self { tag }
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Proof({})", self.to_hex())
    }
}

impl Serialize for Proof {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Proof {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Proof::from_hex(&s).ok_or_else(|| D::Error::custom("proof must be 64 hex characters"))
    }
}
