//! Executable attack scenarios and simulation experiments.
//!
//! Everything here is built from one reusable setup: two (or `k`)
//! coordinate-identical drops at a Shibuya street anchor, a seeded server,
//! and honest proofs generated for one drop's context. Each scenario then
//! mounts a specific transfer or mutation and reports the verdict under a
//! chosen verifier strategy. Scenario adversaries are deliberately strong
//! on the acquisition side — they may request the target drop's own
//! challenge bundle, nonce preimage included, because issuance is open to
//! any user. The security games in [`crate::games`] model the weaker
//! digest-only adversary.

use serde::{Deserialize, Serialize};

use crate::codec::{ContextTuple, DriftId, Nonce};
use crate::proof::Proof;
use crate::server::{
    ChallengeBundle, Claim, FaultSet, NoncePolicy, ServerState, Strategy, Verdict,
};
use crate::statement::{build_public_signals, PublicSignals, RelationKind, Witness};

/// Fixture anchor for the twin-drop experiments (microdegrees).
pub const ANCHOR_UDEG: (i64, i64) = (35_659_500, 139_700_600);
/// Fence radius shared by all scenario drops.
pub const SCENARIO_RADIUS_M: f64 = 50.0;
/// Policy version registered for all scenario drops.
pub const SCENARIO_POLICY_VERSION: &str = "2";

/// The seven attack scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioId {
    /// A: honest claim with correct context.
    Honest,
    /// B: naive cross-drop replay of another drop's transcript and aux.
    CrossDrop,
    /// C: honest claim resubmitted after the epoch advanced.
    StaleEpoch,
    /// D: cross-drop replay through a modified client that reports its
    /// context check as passed.
    AppBypass,
    /// E: one public signal mutated after proof generation.
    SigTamper,
    /// F: transfer between coordinate-identical drops across sessions
    /// (distinct nonces), with the target's own bundle as aux.
    CrossSession,
    /// G: same transfer within one epoch under a shared epoch nonce.
    SameEpoch,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 7] = [
        ScenarioId::Honest,
        ScenarioId::CrossDrop,
        ScenarioId::StaleEpoch,
        ScenarioId::AppBypass,
        ScenarioId::SigTamper,
        ScenarioId::CrossSession,
        ScenarioId::SameEpoch,
    ];

    pub fn letter(self) -> char {
        match self {
            ScenarioId::Honest => 'A',
            ScenarioId::CrossDrop => 'B',
            ScenarioId::StaleEpoch => 'C',
            ScenarioId::AppBypass => 'D',
            ScenarioId::SigTamper => 'E',
            ScenarioId::CrossSession => 'F',
            ScenarioId::SameEpoch => 'G',
        }
    }

    /// Row label used by the scenario-matrix table.
    pub fn row_label(self) -> &'static str {
        match self {
            ScenarioId::Honest => "A: Honest",
            ScenarioId::CrossDrop => "B: Cross-drop",
            ScenarioId::StaleEpoch => "C: Stale epoch",
            ScenarioId::AppBypass => "D: App. byp.",
            ScenarioId::SigTamper => "E: Sig. tamp.",
            ScenarioId::CrossSession => "F: Coord-id.",
            ScenarioId::SameEpoch => "G: Coord-id.",
        }
    }

    /// Short description column of the scenario-matrix table.
    pub fn row_desc(self) -> &'static str {
        match self {
            ScenarioId::Honest => "Correct ctx",
            ScenarioId::CrossDrop => "Naive replay",
            ScenarioId::StaleEpoch => "Expired",
            ScenarioId::AppBypass => "Client mod.",
            ScenarioId::SigTamper => "Mod. pub.",
            ScenarioId::CrossSession => "Cross-sess.",
            ScenarioId::SameEpoch => "Same-epoch",
        }
    }

    /// The nonce policy under which the matrix runs this scenario: G is
    /// the shared-epoch-nonce attack; everything else uses per-request
    /// nonces.
    pub fn matrix_policy(self) -> NoncePolicy {
        match self {
            ScenarioId::SameEpoch => NoncePolicy::EpochDerived,
            _ => NoncePolicy::PerRequest,
        }
    }
}

/// Scenario result: E is undefined for strategies whose relation carries
/// no context signals to tamper with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioOutcome {
    Applicable(Verdict),
    NotApplicable,
}

impl ScenarioOutcome {
    /// Matrix cell symbol: A, R, or - for not applicable.
    pub fn cell(self) -> &'static str {
        match self {
            ScenarioOutcome::Applicable(Verdict::Accept) => "A",
            ScenarioOutcome::Applicable(Verdict::Reject(_)) => "R",
            ScenarioOutcome::NotApplicable => "-",
        }
    }

    pub fn verdict(self) -> Option<Verdict> {
        match self {
            ScenarioOutcome::Applicable(v) => Some(v),
            ScenarioOutcome::NotApplicable => None,
        }
    }
}

/// Twin-drop laboratory: one server, two co-located drops, both already
/// holding a current-epoch challenge.
pub struct TwinLab {
    pub server: ServerState,
    pub x: ChallengeBundle,
    pub y: ChallengeBundle,
}

/// Build the twin-drop setup used by scenarios and the end-to-end attack.
pub fn twin_lab(policy: NoncePolicy, faults: FaultSet, seed: u64) -> TwinLab {
    let mut server = ServerState::new(seed);
    server.set_faults(faults);
    server
        .add_drop("drop-x", ANCHOR_UDEG.0, ANCHOR_UDEG.1, SCENARIO_RADIUS_M, SCENARIO_POLICY_VERSION)
        .expect("fixture drop is valid");
    server
        .add_drop("drop-y", ANCHOR_UDEG.0, ANCHOR_UDEG.1, SCENARIO_RADIUS_M, SCENARIO_POLICY_VERSION)
        .expect("fixture drop is valid");
    let x = server
        .issue_challenge("drop-x", policy)
        .expect("drop registered");
    let y = server
        .issue_challenge("drop-y", policy)
        .expect("drop registered");
    TwinLab { server, x, y }
}

/// Honest public signals and proof for a bundle's drop, standing at the
/// drop itself, shaped for the given relation kind.
pub fn honest_transcript(
    server: &ServerState,
    kind: RelationKind,
    bundle: &ChallengeBundle,
) -> (PublicSignals, Proof) {
    let pub_signals = match kind {
        RelationKind::PrototypeBuggy | RelationKind::SoundGeoOnly => {
            build_public_signals(kind, &bundle.geo, None, None).expect("no context required")
        }
        RelationKind::LevelII | RelationKind::LevelIII => build_public_signals(
            kind,
            &bundle.geo,
            Some(&bundle.context()),
            Some(&bundle.n_digest),
        )
        .expect("context available"),
    };
    let proof = server
        .proving_key(kind)
        .prove(&pub_signals, &Witness::new(bundle.geo.target))
        .expect("claimant is inside the fence");
    (pub_signals, proof)
}

/// Run one scenario under one strategy and return the verdict.
pub fn run_scenario(
    id: ScenarioId,
    strategy: Strategy,
    policy: NoncePolicy,
    faults: FaultSet,
    seed: u64,
) -> ScenarioOutcome {
    let kind = strategy.expected_kind();
    let mut lab = twin_lab(policy, faults, seed);
    let (pub_x, proof_x) = honest_transcript(&lab.server, kind, &lab.x);
    let claim = match id {
        ScenarioId::Honest => {
            let mut aux = lab.x.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-x", &aux);
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
        ScenarioId::CrossDrop => {
            // X's entire transcript and aux replayed against drop Y.
            let mut aux = lab.x.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-y", &aux);
            Claim {
                claimed_drop_id: "drop-y".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
        ScenarioId::StaleEpoch => {
            lab.server.advance_epoch();
            let mut aux = lab.x.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-x", &aux);
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
        ScenarioId::AppBypass => {
            // As CrossDrop, but the modified client reports its check as
            // passed.
            let aux = lab.x.to_aux(true);
            Claim {
                claimed_drop_id: "drop-y".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
        ScenarioId::SigTamper => {
            if kind.ctx_digest_slot().is_none() && kind.epoch_slot().is_none() {
                return ScenarioOutcome::NotApplicable;
            }
            let mut tampered = pub_x;
            let last = kind.signal_count() - 1;
            let bumped = tampered.signals()[last].successor();
            tampered.set_signal(last, bumped);
            let mut aux = lab.x.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-x", &aux);
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals: tampered,
                proof: proof_x,
                aux,
            }
        }
        ScenarioId::CrossSession | ScenarioId::SameEpoch => {
            // The adversary legitimately requests Y's own challenge and
            // uses the resulting bundle — preimage and token included —
            // as aux for X's transcript.
            let mut aux = lab.y.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-y", &aux);
            Claim {
                claimed_drop_id: "drop-y".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
    };
    ScenarioOutcome::Applicable(lab.server.verify_claim(strategy, &claim))
}

/// The full scenario matrix: seven scenarios by the seven column
/// strategies, faultless, with the policy each scenario prescribes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub scenario: ScenarioId,
    pub cells: Vec<ScenarioOutcome>,
}

pub fn run_full_matrix(seed: u64) -> Vec<MatrixRow> {
    ScenarioId::ALL
        .iter()
        .map(|&scenario| MatrixRow {
            scenario,
            cells: Strategy::MATRIX
                .iter()
                .map(|&strategy| {
                    run_scenario(
                        scenario,
                        strategy,
                        scenario.matrix_policy(),
                        FaultSet::none(),
                        seed,
                    )
                })
                .collect(),
        })
        .collect()
}

/// Context element mutated by the ablation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AblationElement {
    DropId,
    PolicyVersion,
    Epoch,
    ServerNonce,
}

impl AblationElement {
    pub const ALL: [AblationElement; 4] = [
        AblationElement::DropId,
        AblationElement::PolicyVersion,
        AblationElement::Epoch,
        AblationElement::ServerNonce,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AblationElement::DropId => "drop_id",
            AblationElement::PolicyVersion => "policy_version",
            AblationElement::Epoch => "epoch",
            AblationElement::ServerNonce => "server_nonce",
        }
    }

    /// The attack each mutation simulates.
    pub fn attack_label(self) -> &'static str {
        match self {
            AblationElement::DropId => "Cross-drop replay",
            AblationElement::PolicyVersion => "Policy downgrade",
            AblationElement::Epoch => "Stale-context reuse",
            AblationElement::ServerNonce => "Session hijacking",
        }
    }
}

/// One ablation row: the context-free prototype verdict next to the
/// full-context verdict for the same mutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationRow {
    pub element: AblationElement,
    pub prototype: Verdict,
    pub full_context: Verdict,
}

/// Resubmit a valid proof with one verifier-side context element mutated.
/// The prototype relation carries no context signals, so every mutation
/// leaves its transcript verifiable; the full-context path compares the
/// claim against expected signals rebuilt from stored state and rejects.
pub fn run_ablation(element: AblationElement, seed: u64) -> AblationRow {
    let mut lab = twin_lab(NoncePolicy::PerRequest, FaultSet::none(), seed);

    // Prototype side: 5-signal transcript, tag-only verification.
    let (proto_pub, proto_proof) = honest_transcript(&lab.server, RelationKind::PrototypeBuggy, &lab.x);
    let prototype = if lab
        .server
        .verifying_key(RelationKind::PrototypeBuggy)
        .verify(&proto_pub, &proto_proof)
    {
        Verdict::Accept
    } else {
        Verdict::Reject(crate::server::RejectReason::BadProof)
    };

    // Full-context side: LevelIII claim evaluated under in-proof binding.
    let kind = RelationKind::LevelIII;
    let claim = match element {
        AblationElement::DropId => {
            // X's honest transcript submitted against drop Y.
            let (pub_x, proof_x) = honest_transcript(&lab.server, kind, &lab.x);
            let mut aux = lab.y.to_aux(false);
            aux.client_ok = lab.server.honest_client_check("drop-y", &aux);
            Claim {
                claimed_drop_id: "drop-y".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux,
            }
        }
        AblationElement::PolicyVersion => {
            // Transcript generated under a downgraded policy version.
            let ctx = ContextTuple::new("drop-x", "1", lab.server.current_epoch());
            let pub_signals =
                build_public_signals(kind, &lab.x.geo, Some(&ctx), Some(&lab.x.n_digest))
                    .expect("context available");
            let proof = lab
                .server
                .proving_key(kind)
                .prove(&pub_signals, &Witness::new(lab.x.geo.target))
                .expect("inside the fence");
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals,
                proof,
                aux: lab.x.to_aux(true),
            }
        }
        AblationElement::Epoch => {
            // Honest transcript replayed after the epoch advanced.
            let (pub_x, proof_x) = honest_transcript(&lab.server, kind, &lab.x);
            lab.server.advance_epoch();
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals: pub_x,
                proof: proof_x,
                aux: lab.x.to_aux(true),
            }
        }
        AblationElement::ServerNonce => {
            // Transcript bound to an attacker-substituted session nonce.
            let foreign = Nonce::from_array([9u8; 16]);
            let pub_signals = build_public_signals(
                kind,
                &lab.x.geo,
                Some(&lab.x.context()),
                Some(&foreign.digest()),
            )
            .expect("context available");
            let proof = lab
                .server
                .proving_key(kind)
                .prove(&pub_signals, &Witness::new(lab.x.geo.target))
                .expect("inside the fence");
            Claim {
                claimed_drop_id: "drop-x".into(),
                pub_signals,
                proof,
                aux: lab.x.to_aux(true),
            }
        }
    };
    let full_context = lab.server.verify_claim(Strategy::S3b, &claim);
    AblationRow {
        element,
        prototype,
        full_context,
    }
}

pub fn run_ablation_all(seed: u64) -> Vec<AblationRow> {
    AblationElement::ALL
        .iter()
        .map(|&e| run_ablation(e, seed))
        .collect()
}

/// Verdicts for one drift variant on an honest claim: the recomputing
/// verifier, the stored-digest (hardened) verifier, and in-proof binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftRow {
    pub variant: Option<DriftId>,
    pub recomputed: Verdict,
    pub stored: Verdict,
    pub in_proof: Verdict,
}

/// Table name for a drift variant row.
pub fn drift_row_title(variant: Option<DriftId>) -> String {
    match variant {
        None => "Baseline".to_string(),
        Some(v) => {
            let what = match v {
                DriftId::D1 => "Encoding format",
                DriftId::D2 => "Field reorder",
                DriftId::D3 => "Epoch off-by-one",
                DriftId::D4 => "Version format",
                DriftId::D5 => "Nonce encoding",
            };
            format!("{}: {}", v.label(), what)
        }
    }
}

/// Submit an honest claim while the verifier's encoder has drifted from
/// the issuance-time encoding. Only the recomputing strategy consults the
/// drifted encoder; stored-digest and in-proof comparisons use values
/// captured at issuance and are unaffected.
pub fn drift_experiment(variant: Option<DriftId>, seed: u64) -> DriftRow {
    let faults = FaultSet {
        drift: variant,
        ..FaultSet::none()
    };
    let verdict_for = |strategy: Strategy| {
        let lab = twin_lab(NoncePolicy::PerRequest, faults.clone(), seed);
        let (pub_x, proof_x) = honest_transcript(&lab.server, strategy.expected_kind(), &lab.x);
        let mut aux = lab.x.to_aux(false);
        aux.client_ok = lab.server.honest_client_check("drop-x", &aux);
        let claim = Claim {
            claimed_drop_id: "drop-x".into(),
            pub_signals: pub_x,
            proof: proof_x,
            aux,
        };
        lab.server.verify_claim(strategy, &claim)
    };
    DriftRow {
        variant,
        recomputed: verdict_for(Strategy::S2b),
        stored: verdict_for(Strategy::S2cHardened),
        in_proof: verdict_for(Strategy::S3b),
    }
}

pub fn drift_experiment_all(seed: u64) -> Vec<DriftRow> {
    let mut rows = vec![drift_experiment(None, seed)];
    rows.extend(DriftId::ALL.iter().map(|&v| drift_experiment(Some(v), seed)));
    rows
}

/// End-to-end cross-drop attack outcome for the two in-proof levels,
/// plus the signal slots at which the two full-context target vectors
/// differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossDropOutcome {
    pub session_level: Verdict,
    pub context_level: Verdict,
    pub target_diff_slots: Vec<usize>,
}

/// Mount the coordinate-identical transfer end to end. `F` runs distinct
/// sessions (per-request nonces); `G` runs the same-epoch shared-nonce
/// variant. Returns the session-level and full-context verdicts.
pub fn e2e_cross_drop(id: ScenarioId, seed: u64) -> CrossDropOutcome {
    assert!(
        matches!(id, ScenarioId::CrossSession | ScenarioId::SameEpoch),
        "end-to-end attack is defined for the coordinate-identical scenarios"
    );
    let policy = id.matrix_policy();
    let session_level = run_scenario(id, Strategy::S3a, policy, FaultSet::none(), seed)
        .verdict()
        .expect("applicable");
    let context_level = run_scenario(id, Strategy::S3b, policy, FaultSet::none(), seed)
        .verdict()
        .expect("applicable");

    // Compare the two drops' expected full-context vectors directly.
    let lab = twin_lab(policy, FaultSet::none(), seed);
    let expected_x = build_public_signals(
        RelationKind::LevelIII,
        &lab.x.geo,
        Some(&lab.x.context()),
        Some(&lab.x.n_digest),
    )
    .expect("context available");
    let expected_y = build_public_signals(
        RelationKind::LevelIII,
        &lab.y.geo,
        Some(&lab.y.context()),
        Some(&lab.y.n_digest),
    )
    .expect("context available");
    let target_diff_slots = (0..RelationKind::LevelIII.signal_count())
        .filter(|&i| expected_x.signals()[i] != expected_y.signals()[i])
        .collect();
    CrossDropOutcome {
        session_level,
        context_level,
        target_diff_slots,
    }
}

/// In-proof binding level for the venue simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BindingLevel {
    /// Session binding: epoch and nonce digest in the proof.
    Ii,
    /// Full context binding: context digest, epoch, nonce digest.
    Iii,
}

impl BindingLevel {
    pub fn label(self) -> &'static str {
        match self {
            BindingLevel::Ii => "ii",
            BindingLevel::Iii => "iii",
        }
    }

    fn strategy(self) -> Strategy {
        match self {
            BindingLevel::Ii => Strategy::S3a,
            BindingLevel::Iii => Strategy::S3b,
        }
    }
}

/// Venue lab: k coordinate-identical drops sharing one epoch nonce.
pub struct VenueLab {
    pub server: ServerState,
    pub bundles: Vec<ChallengeBundle>,
}

pub fn venue_lab(k: usize, seed: u64) -> VenueLab {
    let mut server = ServerState::new(seed);
    for i in 0..k {
        server
            .add_drop(
                &format!("drop-{i}"),
                ANCHOR_UDEG.0,
                ANCHOR_UDEG.1,
                SCENARIO_RADIUS_M,
                SCENARIO_POLICY_VERSION,
            )
            .expect("fixture drop is valid");
    }
    let bundles = (0..k)
        .map(|i| {
            server
                .issue_challenge(&format!("drop-{i}"), NoncePolicy::EpochDerived)
                .expect("drop registered")
        })
        .collect();
    VenueLab { server, bundles }
}

/// Attempt every ordered cross-drop transfer among k co-located drops in
/// one epoch: drop i's honest transcript, drop j's own bundle as aux.
/// Returns (attempted pairs, accepted pairs).
pub fn multi_drop_venue(k: usize, level: BindingLevel, seed: u64) -> (usize, usize) {
    let lab = venue_lab(k, seed);
    let strategy = level.strategy();
    let kind = strategy.expected_kind();
    let transcripts: Vec<(PublicSignals, Proof)> = lab
        .bundles
        .iter()
        .map(|b| honest_transcript(&lab.server, kind, b))
        .collect();
    let mut attempts = 0;
    let mut accepted = 0;
    for (i, transcript) in transcripts.iter().enumerate() {
        for (j, target) in lab.bundles.iter().enumerate() {
            if i == j {
                continue;
            }
            attempts += 1;
            let mut aux = target.to_aux(false);
            aux.client_ok = lab.server.honest_client_check(&target.drop_id, &aux);
            let claim = Claim {
                claimed_drop_id: target.drop_id.clone(),
                pub_signals: transcript.0.clone(),
                proof: transcript.1.clone(),
                aux,
            };
            if lab.server.verify_claim(strategy, &claim).is_accept() {
                accepted += 1;
            }
        }
    }
    (attempts, accepted)
}

/// Shared-epoch indistinguishability check: with identical geometry and a
/// shared nonce, all k session-level public vectors serialize identically,
/// while the k full-context vectors differ pairwise in exactly the
/// context-digest slot.
pub fn lemma1_check(k: usize, seed: u64) -> bool {
    let lab = venue_lab(k, seed);
    let level_ii: Vec<String> = lab
        .bundles
        .iter()
        .map(|b| {
            build_public_signals(
                RelationKind::LevelII,
                &b.geo,
                Some(&b.context()),
                Some(&b.n_digest),
            )
            .expect("context available")
            .canonical_json()
        })
        .collect();
    let all_identical = level_ii.windows(2).all(|w| w[0] == w[1]);

    let level_iii: Vec<PublicSignals> = lab
        .bundles
        .iter()
        .map(|b| {
            build_public_signals(
                RelationKind::LevelIII,
                &b.geo,
                Some(&b.context()),
                Some(&b.n_digest),
            )
            .expect("context available")
        })
        .collect();
    let ctx_slot = RelationKind::LevelIII
        .ctx_digest_slot()
        .expect("full-context layout");
    let mut slot5_only = true;
    for a in 0..k {
        for b in (a + 1)..k {
            let diff: Vec<usize> = (0..RelationKind::LevelIII.signal_count())
                .filter(|&s| level_iii[a].signals()[s] != level_iii[b].signals()[s])
                .collect();
            if diff != vec![ctx_slot] {
                slot5_only = false;
            }
        }
    }
    all_identical && slot5_only
}
