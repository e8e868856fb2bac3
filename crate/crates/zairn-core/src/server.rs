//! Challenge issuance, server state, and the eight verifier strategies.
//!
//! The server owns the deployment's drops, issues challenge bundles under
//! one of two nonce policies, stores per-session records, and evaluates
//! claims under eight acceptance predicates that differ only in where and
//! how they check context: nowhere (1), in adversary-controlled client
//! code (2a), by recomputing digests from claim fields (2b), against
//! stored records resolved through the nonce (2c in default and hardened
//! forms), via a signed challenge token (2d), or against in-proof public
//! signals (3a and 3b). A fault set models the operational failures whose
//! absence each predicate silently assumes.
//!
//! Two modeling choices carry the security analysis. First, the nonce
//! preimage acts as a session credential: strategies 2b and 2c compare
//! the claim's nonce bytes to the stored record, so knowing a digest
//! `N = H(nonce)` never substitutes for knowing `nonce`. Second, the
//! `mapping_failure` and `nonce_reuse` faults collapse that session
//! lookup to "first record with these nonce bytes, any drop" — the
//! precise sense in which those predicates assume a correct nonce-to-drop
//! mapping and nonce uniqueness.

use std::collections::BTreeMap;

use hmac::{Hmac, Mac};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{drift_encode, hash_to_field, lp_encode, ContextTuple, DriftId, FieldElement, Nonce, NONCE_LEN};
use crate::geo::GeoParams;
use crate::proof::{keygen, KeyPair, Proof, ProvingKey, VerifyingKey};
use crate::statement::{build_public_signals, PublicSignals, RelationKind};

type HmacSha256 = Hmac<Sha256>;

#[derive(Debug, Error, PartialEq)]
pub enum ServerError {
    #[error("unknown drop {0:?}")]
    UnknownDrop(String),
    #[error("drop {0:?} already registered")]
    DuplicateDrop(String),
    #[error("snapshot malformed: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Codec(#[from] crate::codec::CodecError),
    #[error(transparent)]
    Geo(#[from] crate::geo::GeoError),
}

/// A registered geofenced drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drop {
    pub drop_id: String,
    pub geo: GeoParams,
    pub policy_version: String,
}

/// How challenge nonces are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoncePolicy {
    /// A fresh nonce per issuance; per-session server state.
    PerRequest,
    /// One nonce per epoch, shared across every drop in the venue.
    EpochDerived,
}

/// Operational failures that can be injected into the deployment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultSet {
    /// The nonce-to-drop association is no longer validated.
    pub mapping_failure: bool,
    /// Issuance hands out the first nonce ever issued, forever.
    pub nonce_reuse: bool,
    /// A maintenance change desynchronized the recomputing verifier's
    /// encoder from the canonical one.
    pub drift: Option<DriftId>,
    /// The client-side context check is skipped (modified client).
    pub client_bypass: bool,
    /// The hardened stored-digest strategy omits its digest comparisons,
    /// reverting to default stored-nonce behavior.
    pub omit_pub7_check: bool,
}

impl FaultSet {
    pub fn none() -> Self {
        Self::default()
    }
}

/// The eight verifier strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// No context binding at all.
    S1,
    /// Context validated in adversary-controlled client code.
    S2a,
    /// Server recomputes expected digests from the claim's fields.
    S2b,
    /// Server resolves the nonce to a stored session record.
    S2cDefault,
    /// Stored-record resolution plus in-proof digest comparisons.
    S2cHardened,
    /// Signed challenge token binding (drop, epoch, nonce).
    S2d,
    /// In-proof session binding: epoch and nonce digest as signals.
    S3a,
    /// In-proof context binding: context digest, epoch, nonce digest.
    S3b,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::S1,
        Strategy::S2a,
        Strategy::S2b,
        Strategy::S2cDefault,
        Strategy::S2cHardened,
        Strategy::S2d,
        Strategy::S3a,
        Strategy::S3b,
    ];

    /// The seven strategies of the scenario matrix, in column order; the
    /// stored-digest column is the default (non-hardened) form.
    pub const MATRIX: [Strategy; 7] = [
        Strategy::S1,
        Strategy::S2a,
        Strategy::S2b,
        Strategy::S2cDefault,
        Strategy::S2d,
        Strategy::S3a,
        Strategy::S3b,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::S1 => "1",
            Strategy::S2a => "2a",
            Strategy::S2b => "2b",
            Strategy::S2cDefault => "2c-default",
            Strategy::S2cHardened => "2c-hardened",
            Strategy::S2d => "2d",
            Strategy::S3a => "3a",
            Strategy::S3b => "3b",
        }
    }

    /// Column header used by the scenario-matrix table.
    pub fn column_header(self) -> &'static str {
        match self {
            Strategy::S1 => "None",
            Strategy::S2a => "Cli.",
            Strategy::S2b => "Srv.r",
            Strategy::S2cDefault => "Srv.s",
            Strategy::S2cHardened => "Srv.s+",
            Strategy::S2d => "Srv.sig",
            Strategy::S3a => "(ii)",
            Strategy::S3b => "(iii)",
        }
    }

    /// The relation kind this strategy's claims carry: off-circuit
    /// strategies take plain sound geo proofs; the hardened stored-digest
    /// strategy and level (iii) read the full 8-signal layout; level (ii)
    /// reads the 7-signal session layout.
    pub fn expected_kind(self) -> RelationKind {
        match self {
            Strategy::S2cHardened | Strategy::S3b => RelationKind::LevelIII,
            Strategy::S3a => RelationKind::LevelII,
            _ => RelationKind::SoundGeoOnly,
        }
    }

    /// Count of operational assumptions the strategy's acceptance
    /// predicate relies on; the no-binding and client-side strategies are
    /// not assigned a count.
    pub fn op_assumption_count(self) -> Option<u32> {
        match self {
            Strategy::S2b => Some(6),
            Strategy::S2cDefault | Strategy::S2cHardened | Strategy::S3a => Some(4),
            Strategy::S2d => Some(5),
            Strategy::S3b => Some(2),
            Strategy::S1 | Strategy::S2a => None,
        }
    }

    /// Server-state growth class of the strategy's bookkeeping.
    pub fn state_class(self) -> &'static str {
        match self {
            Strategy::S2cDefault | Strategy::S2cHardened => "O(k*U)",
            _ => "O(1)",
        }
    }
}

/// Machine-readable rejection causes (the tables report only the verdict).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    BadProof,
    CtxMismatch,
    NonceUnknown,
    StaleEpoch,
    TokenInvalid,
    DigestMismatch,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::BadProof => "bad_proof",
            RejectReason::CtxMismatch => "ctx_mismatch",
            RejectReason::NonceUnknown => "nonce_unknown",
            RejectReason::StaleEpoch => "stale_epoch",
            RejectReason::TokenInvalid => "token_invalid",
            RejectReason::DigestMismatch => "digest_mismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// A signed challenge token: the tag covers (drop, epoch, nonce); the
/// nonce itself is not carried in the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedToken {
    pub drop_id: String,
    pub epoch: u64,
    pub sig: String,
}

/// One stored issuance: the session record the verifier strategies
/// resolve against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeRecord {
    pub drop_id: String,
    pub epoch: u64,
    pub issued_at_epoch: u64,
    pub nonce: Nonce,
    pub n_digest: FieldElement,
    pub c_digest: FieldElement,
    pub token: SignedToken,
}

/// Everything a claimant receives when requesting a challenge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeBundle {
    pub drop_id: String,
    pub policy_version: String,
    pub geo: GeoParams,
    pub epoch: u64,
    pub c_digest: FieldElement,
    pub nonce: Nonce,
    pub n_digest: FieldElement,
    pub token: SignedToken,
}

impl ChallengeBundle {
    pub fn context(&self) -> ContextTuple {
        ContextTuple::new(self.drop_id.clone(), self.policy_version.clone(), self.epoch)
    }

    /// Assemble claim auxiliary data from this bundle.
    pub fn to_aux(&self, client_ok: bool) -> ClaimAux {
        ClaimAux {
            epoch: self.epoch,
            c_digest: self.c_digest.clone(),
            n_digest: self.n_digest.clone(),
            nonce: self.nonce.clone(),
            token: self.token.clone(),
            client_ok,
        }
    }
}

/// Adversary-supplied auxiliary claim data: asserted context values, the
/// session nonce preimage, the challenge token, and the client-side
/// check's reported outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimAux {
    pub epoch: u64,
    pub c_digest: FieldElement,
    pub n_digest: FieldElement,
    pub nonce: Nonce,
    pub token: SignedToken,
    pub client_ok: bool,
}

/// A complete unlock claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub claimed_drop_id: String,
    pub pub_signals: PublicSignals,
    pub proof: Proof,
    pub aux: ClaimAux,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DigestStoreEntry {
    drop_id: String,
    epoch: u64,
    n_digest: FieldElement,
    c_digest: FieldElement,
}

/// The serializable portion of the server; keys are rebuilt from the seed
/// on import and never leave the process.
#[derive(Serialize, Deserialize)]
struct Snapshot {
    seed: u64,
    current_epoch: u64,
    drops: BTreeMap<String, Drop>,
    records: Vec<ChallengeRecord>,
    nonce_map: BTreeMap<String, String>,
    digest_store: Vec<DigestStoreEntry>,
    faults: FaultSet,
    nonce_counter: u64,
    first_nonce: Option<Nonce>,
    epoch_nonces: BTreeMap<u64, Nonce>,
}

/// The challenge server: drops, session records, nonce bookkeeping,
/// signing key, and relation keypairs.
pub struct ServerState {
    seed: u64,
    current_epoch: u64,
    drops: BTreeMap<String, Drop>,
    records: Vec<ChallengeRecord>,
    nonce_map: BTreeMap<String, String>,
    digest_store: Vec<DigestStoreEntry>,
    faults: FaultSet,
    nonce_counter: u64,
    first_nonce: Option<Nonce>,
    epoch_nonces: BTreeMap<u64, Nonce>,
    sign_key: [u8; 32],
    keys: BTreeMap<RelationKind, KeyPair>,
}

impl ServerState {
    pub fn new(seed: u64) -> Self {
        let sign_key: [u8; 32] = Sha256::digest(
            lp_encode(&[b"sign-key" as &[u8], seed.to_string().as_bytes()]).expect("short fields"),
        )
        .into();
        let keys = RelationKind::ALL
            .iter()
            .map(|&kind| (kind, keygen(kind, seed)))
            .collect();
        Self {
            seed,
            current_epoch: 1,
            drops: BTreeMap::new(),
            records: Vec::new(),
            nonce_map: BTreeMap::new(),
            digest_store: Vec::new(),
            faults: FaultSet::none(),
            nonce_counter: 0,
            first_nonce: None,
            epoch_nonces: BTreeMap::new(),
            sign_key,
            keys,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn current_epoch(&self) -> u64 {
        self.current_epoch
    }

    pub fn advance_epoch(&mut self) {
        self.current_epoch += 1;
    }

    pub fn faults(&self) -> &FaultSet {
        &self.faults
    }

    pub fn set_faults(&mut self, faults: FaultSet) {
        self.faults = faults;
    }

    pub fn add_drop(
        &mut self,
        drop_id: &str,
        lat_udeg: i64,
        lon_udeg: i64,
        radius_m: f64,
        policy_version: &str,
    ) -> Result<(), ServerError> {
        if self.drops.contains_key(drop_id) {
            return Err(ServerError::DuplicateDrop(drop_id.to_string()));
        }
        let geo = GeoParams::new(crate::geo::GeoPoint::new(lat_udeg, lon_udeg)?, radius_m)?;
        self.drops.insert(
            drop_id.to_string(),
            Drop {
                drop_id: drop_id.to_string(),
                geo,
                policy_version: policy_version.to_string(),
            },
        );
        Ok(())
    }

    pub fn drop(&self, drop_id: &str) -> Option<&Drop> {
        self.drops.get(drop_id)
    }

    pub fn records(&self) -> &[ChallengeRecord] {
        &self.records
    }

    pub fn digest_store_len(&self) -> usize {
        self.digest_store.len()
    }

    pub fn verifying_key(&self, kind: RelationKind) -> &VerifyingKey {
        &self.keys[&kind].verifying
    }

    /// The client-side proving capability for simulation harnesses; never
    /// handed to adversary code.
    pub fn proving_key(&self, kind: RelationKind) -> &ProvingKey {
        &self.keys[&kind].proving
    }

    fn fresh_request_nonce(&mut self) -> Nonce {
        let digest = Sha256::digest(
            lp_encode(&[
                b"nonce-req" as &[u8],
                self.seed.to_string().as_bytes(),
                self.nonce_counter.to_string().as_bytes(),
            ])
            .expect("short fields"),
        );
        self.nonce_counter += 1;
        let mut bytes = [0u8; NONCE_LEN];
        bytes.copy_from_slice(&digest[..NONCE_LEN]);
        Nonce::from_array(bytes)
    }

    fn epoch_nonce(&mut self, epoch: u64) -> Nonce {
        if let Some(n) = self.epoch_nonces.get(&epoch) {
            return n.clone();
        }
        let digest = Sha256::digest(
            lp_encode(&[
                b"nonce-epoch" as &[u8],
                self.seed.to_string().as_bytes(),
                epoch.to_string().as_bytes(),
            ])
            .expect("short fields"),
        );
        let mut bytes = [0u8; NONCE_LEN];
        bytes.copy_from_slice(&digest[..NONCE_LEN]);
        let nonce = Nonce::from_array(bytes);
        self.epoch_nonces.insert(epoch, nonce.clone());
        nonce
    }

    /// Issue (or idempotently re-issue) a challenge for a drop under the
    /// given nonce policy at the current epoch.
    pub fn issue_challenge(&mut self, drop_id: &str, policy: NoncePolicy) -> Result<ChallengeBundle, ServerError> {
        let drop = self
            .drops
            .get(drop_id)
            .cloned()
            .ok_or_else(|| ServerError::UnknownDrop(drop_id.to_string()))?;
        let epoch = self.current_epoch;
        let nonce = if self.faults.nonce_reuse && self.first_nonce.is_some() {
            self.first_nonce.clone().expect("checked above")
        } else {
            match policy {
                NoncePolicy::PerRequest => self.fresh_request_nonce(),
                NoncePolicy::EpochDerived => self.epoch_nonce(epoch),
            }
        };
        if self.first_nonce.is_none() {
            self.first_nonce = Some(nonce.clone());
        }
        let n_digest = nonce.digest();
        let ctx = ContextTuple::new(drop_id, &drop.policy_version, epoch);
        let c_digest = ctx.digest()?;
        // Idempotent on (drop, epoch, nonce digest): a repeated request
        // returns the existing record's bundle.
        if let Some(existing) = self
            .records
            .iter()
            .find(|r| r.drop_id == drop_id && r.epoch == epoch && r.n_digest == n_digest)
        {
            return Ok(ChallengeBundle {
                drop_id: drop_id.to_string(),
                policy_version: drop.policy_version.clone(),
                geo: drop.geo,
                epoch,
                c_digest: existing.c_digest.clone(),
                nonce: existing.nonce.clone(),
                n_digest: existing.n_digest.clone(),
                token: existing.token.clone(),
            });
        }
        let token = self.sign_token(drop_id, epoch, &nonce);
        self.records.push(ChallengeRecord {
            drop_id: drop_id.to_string(),
            epoch,
            issued_at_epoch: epoch,
            nonce: nonce.clone(),
            n_digest: n_digest.clone(),
            c_digest: c_digest.clone(),
            token: token.clone(),
        });
        self.nonce_map
            .entry(n_digest.to_decimal())
            .or_insert_with(|| drop_id.to_string());
        self.digest_store.push(DigestStoreEntry {
            drop_id: drop_id.to_string(),
            epoch,
            n_digest: n_digest.clone(),
            c_digest: c_digest.clone(),
        });
        Ok(ChallengeBundle {
            drop_id: drop_id.to_string(),
            policy_version: drop.policy_version,
            geo: drop.geo,
            epoch,
            c_digest,
            nonce,
            n_digest,
            token,
        })
    }

    fn token_message(&self, drop_id: &str, epoch: u64, nonce: &Nonce) -> Vec<u8> {
        // Under a broken nonce-to-drop mapping the token service loses
        // the drop association: tags no longer cover the drop identity.
        if self.faults.mapping_failure {
            lp_encode(&[epoch.to_string().as_bytes(), nonce.bytes()]).expect("short fields")
        } else {
            lp_encode(&[drop_id.as_bytes(), epoch.to_string().as_bytes(), nonce.bytes()])
                .expect("short fields")
        }
    }

    pub fn sign_token(&self, drop_id: &str, epoch: u64, nonce: &Nonce) -> SignedToken {
        let mut mac = HmacSha256::new_from_slice(&self.sign_key).expect("any key length accepted");
        mac.update(&self.token_message(drop_id, epoch, nonce));
        SignedToken {
            drop_id: drop_id.to_string(),
            epoch,
            sig: hex::encode(mac.finalize().into_bytes()),
        }
    }

    pub fn check_token(&self, claimed_drop: &str, epoch: u64, nonce: &Nonce, token: &SignedToken) -> bool {
        let mut mac = HmacSha256::new_from_slice(&self.sign_key).expect("any key length accepted");
        mac.update(&self.token_message(claimed_drop, epoch, nonce));
        let expected = hex::encode(mac.finalize().into_bytes());
        // Not constant-time; the model's adversaries do not time the server.
        expected == token.sig
    }

    /// The honest client application's own context check: the claim's
    /// asserted context must be the one the app currently expects for the
    /// claimed drop. Harnesses call this to fill `ClaimAux::client_ok`.
    pub fn honest_client_check(&self, claimed_drop: &str, aux: &ClaimAux) -> bool {
        let Some(drop) = self.drops.get(claimed_drop) else {
            return false;
        };
        let ctx = ContextTuple::new(claimed_drop, &drop.policy_version, self.current_epoch);
        aux.epoch == self.current_epoch && ctx.digest().ok().as_ref() == Some(&aux.c_digest)
    }

    /// Session resolution for the record-checking strategies: the claim's
    /// nonce bytes must match a current-epoch record for the claimed drop.
    /// When the nonce-to-drop mapping or nonce uniqueness has failed, the
    /// lookup degrades to the first record with matching bytes, any drop.
    fn resolve_session(&self, claimed_drop: &str, nonce: &Nonce) -> Option<&ChallengeRecord> {
        let invariants_broken = self.faults.mapping_failure || self.faults.nonce_reuse;
        self.records.iter().find(|r| {
            r.epoch == self.current_epoch
                && r.nonce == *nonce
                && (invariants_broken || r.drop_id == claimed_drop)
        })
    }

    /// Evaluate a claim under one strategy's acceptance predicate.
    pub fn verify_claim(&self, strategy: Strategy, claim: &Claim) -> Verdict {
        let kind = strategy.expected_kind();
        let vk = self.verifying_key(kind);
        if claim.pub_signals.kind() != kind || !vk.verify(&claim.pub_signals, &claim.proof) {
            return Verdict::Reject(RejectReason::BadProof);
        }
        let aux = &claim.aux;
        let claimed = claim.claimed_drop_id.as_str();
        match strategy {
            Strategy::S1 => Verdict::Accept,
            Strategy::S2a => {
                if self.faults.client_bypass || aux.client_ok {
                    Verdict::Accept
                } else if aux.epoch != self.current_epoch {
                    Verdict::Reject(RejectReason::StaleEpoch)
                } else {
                    Verdict::Reject(RejectReason::CtxMismatch)
                }
            }
            Strategy::S2b => {
                if aux.epoch != self.current_epoch {
                    return Verdict::Reject(RejectReason::StaleEpoch);
                }
                let Some(drop) = self.drops.get(claimed) else {
                    return Verdict::Reject(RejectReason::CtxMismatch);
                };
                let tuple = ContextTuple::new(claimed, &drop.policy_version, aux.epoch);
                let (ctx_enc, nonce_enc) = match self.faults.drift {
                    Some(variant) => drift_encode(variant, &tuple, &aux.nonce).expect("short fields"),
                    None => (tuple.encode().expect("short fields"), aux.nonce.bytes().to_vec()),
                };
                if hash_to_field(&ctx_enc) != aux.c_digest {
                    return Verdict::Reject(RejectReason::CtxMismatch);
                }
                if hash_to_field(&nonce_enc) != aux.n_digest {
                    return Verdict::Reject(RejectReason::DigestMismatch);
                }
                if self.resolve_session(claimed, &aux.nonce).is_none() {
                    return Verdict::Reject(RejectReason::NonceUnknown);
                }
                Verdict::Accept
            }
            Strategy::S2cDefault => {
                if aux.epoch != self.current_epoch {
                    return Verdict::Reject(RejectReason::StaleEpoch);
                }
                if self.resolve_session(claimed, &aux.nonce).is_none() {
                    return Verdict::Reject(RejectReason::NonceUnknown);
                }
                Verdict::Accept
            }
            Strategy::S2cHardened => {
                if aux.epoch != self.current_epoch {
                    return Verdict::Reject(RejectReason::StaleEpoch);
                }
                let Some(record) = self.resolve_session(claimed, &aux.nonce) else {
                    return Verdict::Reject(RejectReason::NonceUnknown);
                };
                if !self.faults.omit_pub7_check {
                    if claim.pub_signals.challenge_digest() != Some(&record.n_digest) {
                        return Verdict::Reject(RejectReason::DigestMismatch);
                    }
                    if claim.pub_signals.ctx_digest() != Some(&record.c_digest) {
                        return Verdict::Reject(RejectReason::DigestMismatch);
                    }
                }
                Verdict::Accept
            }
            Strategy::S2d => {
                if aux.epoch != self.current_epoch {
                    return Verdict::Reject(RejectReason::StaleEpoch);
                }
                if !self.check_token(claimed, aux.epoch, &aux.nonce, &aux.token) {
                    return Verdict::Reject(RejectReason::TokenInvalid);
                }
                Verdict::Accept
            }
            Strategy::S3a | Strategy::S3b => {
                if claim.pub_signals.epoch() != Some(&FieldElement::from_u64(self.current_epoch)) {
                    return Verdict::Reject(RejectReason::StaleEpoch);
                }
                let Some(drop) = self.drops.get(claimed) else {
                    return Verdict::Reject(RejectReason::CtxMismatch);
                };
                // Drop-keyed resolution: the latest current-epoch record
                // for the claimed drop, independent of any nonce claim.
                let Some(record) = self
                    .records
                    .iter()
                    .rev()
                    .find(|r| r.drop_id == claimed && r.epoch == self.current_epoch)
                else {
                    return Verdict::Reject(RejectReason::NonceUnknown);
                };
                let ctx = ContextTuple::new(claimed, &drop.policy_version, self.current_epoch);
                let expected = build_public_signals(kind, &drop.geo, Some(&ctx), Some(&record.n_digest))
                    .expect("drop parameters are well-formed");
                if claim.pub_signals == expected {
                    Verdict::Accept
                } else if claim.pub_signals.challenge_digest() != expected.challenge_digest() {
                    Verdict::Reject(RejectReason::DigestMismatch)
                } else {
                    Verdict::Reject(RejectReason::CtxMismatch)
                }
            }
        }
    }

    /// Serialize the replayable state; keypairs and the signing key are
    /// derived from the seed and never exported.
    pub fn export_json(&self) -> String {
        let snapshot = Snapshot {
            seed: self.seed,
            current_epoch: self.current_epoch,
            drops: self.drops.clone(),
            records: self.records.clone(),
            nonce_map: self.nonce_map.clone(),
            digest_store: self.digest_store.clone(),
            faults: self.faults.clone(),
            nonce_counter: self.nonce_counter,
            first_nonce: self.first_nonce.clone(),
            epoch_nonces: self.epoch_nonces.clone(),
        };
        serde_json::to_string_pretty(&snapshot).expect("snapshot always serializes")
    }

    pub fn import_json(json: &str) -> Result<Self, ServerError> {
        let snapshot: Snapshot =
            serde_json::from_str(json).map_err(|e| ServerError::Snapshot(e.to_string()))?;
        let mut state = ServerState::new(snapshot.seed);
        state.current_epoch = snapshot.current_epoch;
        state.drops = snapshot.drops;
        state.records = snapshot.records;
        state.nonce_map = snapshot.nonce_map;
        state.digest_store = snapshot.digest_store;
        state.faults = snapshot.faults;
        state.nonce_counter = snapshot.nonce_counter;
        state.first_nonce = snapshot.first_nonce;
        state.epoch_nonces = snapshot.epoch_nonces;
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statement::Witness;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    const SHIBUYA: (i64, i64) = (35_659_500, 139_700_600);

    fn server_with_drop() -> ServerState {
        let mut s = ServerState::new(42);
        s.add_drop("drop-a", SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
        s
    }

    /// Build the honest claim a drop's claimant would submit under one
    /// strategy, standing at the drop itself.
    fn honest_claim(state: &ServerState, strategy: Strategy, bundle: &ChallengeBundle) -> Claim {
        let kind = strategy.expected_kind();
        let pub_signals = match kind {
            RelationKind::SoundGeoOnly | RelationKind::PrototypeBuggy => {
                build_public_signals(kind, &bundle.geo, None, None).unwrap()
            }
            _ => build_public_signals(kind, &bundle.geo, Some(&bundle.context()), Some(&bundle.n_digest))
                .unwrap(),
        };
        let proof = state
            .proving_key(kind)
            .prove(&pub_signals, &Witness::new(bundle.geo.target))
            .unwrap();
        let aux = bundle.to_aux(true);
        Claim {
            claimed_drop_id: bundle.drop_id.clone(),
            pub_signals,
            proof,
            aux,
        }
    }

    #[test]
    fn per_request_nonces_are_distinct() {
        let mut s = server_with_drop();
        let b1 = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        let b2 = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        assert_ne!(b1.nonce, b2.nonce);
        assert_ne!(b1.n_digest, b2.n_digest);
        assert_eq!(s.records().len(), 2);
    }

    #[test]
    fn epoch_derived_shares_nonce_across_drops() {
        let mut s = server_with_drop();
        s.add_drop("drop-b", SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
        let ba = s.issue_challenge("drop-a", NoncePolicy::EpochDerived).unwrap();
        let bb = s.issue_challenge("drop-b", NoncePolicy::EpochDerived).unwrap();
        assert_eq!(ba.nonce, bb.nonce);
        assert_eq!(ba.n_digest, bb.n_digest);
        assert_ne!(ba.c_digest, bb.c_digest);
        // Re-request is idempotent: same bundle, no new record.
        let ba2 = s.issue_challenge("drop-a", NoncePolicy::EpochDerived).unwrap();
        assert_eq!(ba, ba2);
        assert_eq!(s.records().len(), 2);
    }

    #[test]
    fn issued_record_digest_matches_context() {
        let mut s = server_with_drop();
        let b = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        assert_eq!(b.c_digest, b.context().digest().unwrap());
        assert_eq!(b.n_digest, b.nonce.digest());
        assert_eq!(
            s.issue_challenge("missing", NoncePolicy::PerRequest),
            Err(ServerError::UnknownDrop("missing".into()))
        );
    }

    #[test]
    fn honest_claims_accepted_under_every_strategy() {
        for strategy in Strategy::ALL {
            let mut s = server_with_drop();
            let bundle = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
            let claim = honest_claim(&s, strategy, &bundle);
            assert_eq!(s.verify_claim(strategy, &claim), Verdict::Accept, "{strategy:?}");
        }
    }

    #[test]
    fn stale_epoch_rejected_by_all_context_strategies() {
        for strategy in Strategy::ALL {
            let mut s = server_with_drop();
            let bundle = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
            let mut claim = honest_claim(&s, strategy, &bundle);
            s.advance_epoch();
            claim.aux.client_ok = s.honest_client_check("drop-a", &claim.aux);
            let verdict = s.verify_claim(strategy, &claim);
            if strategy == Strategy::S1 {
                assert_eq!(verdict, Verdict::Accept);
            } else {
                assert_eq!(verdict, Verdict::Reject(RejectReason::StaleEpoch), "{strategy:?}");
            }
        }
    }

    #[test]
    fn token_binds_all_three_fields() {
        let s = server_with_drop();
        let nonce = Nonce::from_array([7u8; 16]);
        let token = s.sign_token("drop-a", 3, &nonce);
        assert!(s.check_token("drop-a", 3, &nonce, &token));
        assert!(!s.check_token("drop-b", 3, &nonce, &token));
        assert!(!s.check_token("drop-a", 4, &nonce, &token));
        assert!(!s.check_token("drop-a", 3, &Nonce::from_array([8u8; 16]), &token));
        let other = ServerState::new(43);
        assert!(!other.check_token("drop-a", 3, &nonce, &token));
    }

    #[test]
    fn mapping_failure_drops_drop_id_from_token() {
        let mut s = server_with_drop();
        s.set_faults(FaultSet {
            mapping_failure: true,
            ..FaultSet::none()
        });
        let nonce = Nonce::from_array([7u8; 16]);
        let token = s.sign_token("drop-a", 3, &nonce);
        // Any claimed drop now validates against the same tag.
        assert!(s.check_token("drop-b", 3, &nonce, &token));
    }

    #[test]
    fn nonce_reuse_returns_first_nonce_forever() {
        let mut s = server_with_drop();
        s.add_drop("drop-b", SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
        s.set_faults(FaultSet {
            nonce_reuse: true,
            ..FaultSet::none()
        });
        let b1 = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        let b2 = s.issue_challenge("drop-b", NoncePolicy::PerRequest).unwrap();
        s.advance_epoch();
        let b3 = s.issue_challenge("drop-a", NoncePolicy::EpochDerived).unwrap();
        assert_eq!(b1.nonce, b2.nonce);
        assert_eq!(b1.nonce, b3.nonce);
    }

    #[test]
    fn snapshot_round_trip_preserves_behavior() {
        let mut s = server_with_drop();
        s.add_drop("drop-b", SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
        let _ = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        let json = s.export_json();
        let mut restored = ServerState::import_json(&json).unwrap();
        assert_eq!(restored.current_epoch(), s.current_epoch());
        assert_eq!(restored.records(), s.records());
        // Issuance continues identically after restore.
        let next_a = s.issue_challenge("drop-b", NoncePolicy::PerRequest).unwrap();
        let next_b = restored.issue_challenge("drop-b", NoncePolicy::PerRequest).unwrap();
        assert_eq!(next_a, next_b);
        // Keys were rebuilt from the seed: old proofs still verify.
        let bundle = next_b;
        let claim = honest_claim(&restored, Strategy::S3b, &bundle);
        assert_eq!(restored.verify_claim(Strategy::S3b, &claim), Verdict::Accept);
        assert!(ServerState::import_json("not json").is_err());
    }

    #[test]
    fn snapshot_does_not_leak_key_material() {
        let mut s = server_with_drop();
        let _ = s.issue_challenge("drop-a", NoncePolicy::PerRequest).unwrap();
        let json = s.export_json();
        assert!(!json.contains("sign_key"));
        assert!(!json.contains("secret"));
        assert!(!json.contains("verifying"));
    }

    #[test]
    fn strategy_metadata_counts() {
        assert_eq!(Strategy::S2b.op_assumption_count(), Some(6));
        assert_eq!(Strategy::S2cDefault.op_assumption_count(), Some(4));
        assert_eq!(Strategy::S2cHardened.op_assumption_count(), Some(4));
        assert_eq!(Strategy::S2d.op_assumption_count(), Some(5));
        assert_eq!(Strategy::S3a.op_assumption_count(), Some(4));
        assert_eq!(Strategy::S3b.op_assumption_count(), Some(2));
        assert_eq!(Strategy::S1.op_assumption_count(), None);
        assert_eq!(Strategy::S2a.op_assumption_count(), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

        /// Session-state growth: k drops served to u users each costs k*u
        /// stored digests under per-request nonces, at most k under
        /// epoch-derived nonces.
        #[test]
        fn digest_store_size_law(k in 1usize..6, u in 1usize..6) {
            let mut per_request = ServerState::new(7);
            let mut epoch_derived = ServerState::new(7);
            for i in 0..k {
                let id = format!("drop-{i}");
                per_request.add_drop(&id, SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
                epoch_derived.add_drop(&id, SHIBUYA.0, SHIBUYA.1, 50.0, "2").unwrap();
            }
            for _ in 0..u {
                for i in 0..k {
                    let id = format!("drop-{i}");
                    per_request.issue_challenge(&id, NoncePolicy::PerRequest).unwrap();
                    epoch_derived.issue_challenge(&id, NoncePolicy::EpochDerived).unwrap();
                }
            }
            prop_assert_eq!(per_request.digest_store_len(), k * u);
            prop_assert!(epoch_derived.digest_store_len() <= k);
        }
    }
}
