//! Security games for transcript transfer and context binding.
//!
//! The transfer game models a transcript-only adversary: it holds a
//! recorded (signals, proof) pair for one context but has neither fresh
//! coordinates nor proving access, and must make a verifier accept the
//! transcript under a different context. The binding game models the
//! canonical replay adversary against a chosen verifier strategy: it owns
//! one legitimate session (nonce preimage and all) among `n` co-located
//! drops, observes every other session only as digests and tokens — there
//! is no issuance oracle handing out foreign preimages — and replays its
//! transcript with the most favorable auxiliary data it can assemble.
//!
//! In the idealized proof backend every outcome is exact: configurations
//! are won with probability exactly one or exactly zero, independent of
//! trial count and seed.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::lp_encode;
use crate::proof::Proof;
use crate::scenario::{honest_transcript, twin_lab, ANCHOR_UDEG, SCENARIO_POLICY_VERSION, SCENARIO_RADIUS_M};
use crate::server::{
    ChallengeBundle, Claim, ClaimAux, FaultSet, NoncePolicy, ServerState, Strategy,
};
use crate::statement::RelationKind;

/// Aggregate result of a repeated game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub wins: u32,
    pub trials: u32,
    pub win_rate: f64,
}

impl GameOutcome {
    fn new(wins: u32, trials: u32) -> Self {
        Self {
            wins,
            trials,
            win_rate: f64::from(wins) / f64::from(trials),
        }
    }
}

/// The three transcript-transfer adversary strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferAdversary {
    /// Submit the recorded transcript unchanged under the new context.
    ReplayOriginal,
    /// Rewrite the context slots to match the new context, keeping the
    /// recorded proof.
    ModifySignals,
    /// Fabricate a proof for the new context without witness or proving
    /// access.
    FreshProofNoWitness,
}

impl TransferAdversary {
    pub const ALL: [TransferAdversary; 3] = [
        TransferAdversary::ReplayOriginal,
        TransferAdversary::ModifySignals,
        TransferAdversary::FreshProofNoWitness,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TransferAdversary::ReplayOriginal => "replay_original",
            TransferAdversary::ModifySignals => "modify_signals",
            TransferAdversary::FreshProofNoWitness => "fresh_proof_no_witness",
        }
    }
}

/// Play the transcript-transfer game once; returns true iff the
/// adversary wins (the verifier accepts under the second context).
pub fn transcript_transfer_game(adversary: TransferAdversary, seed: u64) -> bool {
    let lab = twin_lab(NoncePolicy::PerRequest, FaultSet::none(), seed);
    let kind = RelationKind::LevelIII;
    let (pub_x, proof_x) = honest_transcript(&lab.server, kind, &lab.x);

    // The verifier for the second context: full in-proof binding against
    // drop Y's expected signals.
    let mut aux = lab.y.to_aux(false);
    aux.client_ok = lab.server.honest_client_check("drop-y", &aux);

    let (pub_signals, proof) = match adversary {
        TransferAdversary::ReplayOriginal => (pub_x, proof_x),
        TransferAdversary::ModifySignals => {
            let mut rewritten = pub_x;
            let epoch_slot = kind.epoch_slot().expect("full-context layout");
            let ctx_slot = kind.ctx_digest_slot().expect("full-context layout");
            let n_slot = kind.challenge_digest_slot().expect("full-context layout");
            rewritten.set_signal(ctx_slot, lab.y.c_digest.clone());
            rewritten.set_signal(
                epoch_slot,
                crate::codec::FieldElement::from_u64(lab.y.epoch),
            );
            rewritten.set_signal(n_slot, lab.y.n_digest.clone());
            (rewritten, proof_x)
        }
        TransferAdversary::FreshProofNoWitness => {
            // Without the proving key the best available tag is a guess
            // derived from public data.
            let target = crate::statement::build_public_signals(
                kind,
                &lab.y.geo,
                Some(&lab.y.context()),
                Some(&lab.y.n_digest),
            )
            .expect("context available");
            let guess: [u8; 32] = Sha256::digest(target.canonical_json().as_bytes()).into();
            (target, Proof::from_raw_tag(guess))
        }
    };
    let claim = Claim {
        claimed_drop_id: "drop-y".into(),
        pub_signals,
        proof,
        aux,
    };
    lab.server.verify_claim(Strategy::S3b, &claim).is_accept()
}

/// Session framing for the binding game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SessionFraming {
    /// Source and targets share the current epoch.
    SameEpoch,
    /// The epoch advances (and challenges are reissued) between the
    /// adversary's session and the attempted transfer.
    CrossSession,
}

fn derive_trial_seed(seed: u64, trial: u32) -> u64 {
    seed.wrapping_add(u64::from(trial).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Deterministic target index j in {2, ..., n} for a trial.
fn derive_target(seed: u64, trial: u32, n: usize) -> usize {
    let digest = Sha256::digest(
        lp_encode(&[
            b"game-target" as &[u8],
            seed.to_string().as_bytes(),
            trial.to_string().as_bytes(),
        ])
        .expect("short fields"),
    );
    let raw = u64::from_be_bytes(digest[..8].try_into().expect("eight bytes"));
    2 + (raw as usize % (n - 1))
}

fn issue_all(server: &mut ServerState, n: usize, policy: NoncePolicy) -> Vec<ChallengeBundle> {
    (1..=n)
        .map(|i| {
            server
                .issue_challenge(&format!("drop-{i}"), policy)
                .expect("drop registered")
        })
        .collect()
}

/// One binding-game trial; returns true iff either candidate claim is
/// accepted.
fn binding_trial(
    strategy: Strategy,
    n: usize,
    policy: NoncePolicy,
    faults: &FaultSet,
    framing: SessionFraming,
    trial_seed: u64,
    target_j: usize,
) -> bool {
    let mut server = ServerState::new(trial_seed);
    server.set_faults(faults.clone());
    for i in 1..=n {
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
    let bundles = issue_all(&mut server, n, policy);
    let source = bundles[0].clone();
    let (pub_1, proof_1) = honest_transcript(&server, strategy.expected_kind(), &source);
    if framing == SessionFraming::CrossSession {
        server.advance_epoch();
        let _ = issue_all(&mut server, n, policy);
    }
    let current = server.current_epoch();
    let target_id = format!("drop-{target_j}");
    // The adversary's view of the target session: digests and token from
    // the stored record, never the nonce preimage.
    let target_record = server
        .records()
        .iter()
        .rev()
        .find(|r| r.drop_id == target_id && r.epoch == current)
        .expect("target was issued a challenge")
        .clone();

    let candidates = [
        // Own preimage and digest, target's context digest.
        ClaimAux {
            epoch: current,
            c_digest: target_record.c_digest.clone(),
            n_digest: source.n_digest.clone(),
            nonce: source.nonce.clone(),
            token: source.token.clone(),
            client_ok: true,
        },
        // Target's record values wholesale, own preimage where one is
        // required.
        ClaimAux {
            epoch: current,
            c_digest: target_record.c_digest.clone(),
            n_digest: target_record.n_digest.clone(),
            nonce: source.nonce.clone(),
            token: target_record.token.clone(),
            client_ok: true,
        },
    ];
    candidates.into_iter().any(|aux| {
        let claim = Claim {
            claimed_drop_id: target_id.clone(),
            pub_signals: pub_1.clone(),
            proof: proof_1.clone(),
            aux,
        };
        server.verify_claim(strategy, &claim).is_accept()
    })
}

fn run_binding_game(
    strategy: Strategy,
    n: usize,
    policy: NoncePolicy,
    faults: &FaultSet,
    framing: SessionFraming,
    trials: u32,
    seed: u64,
) -> GameOutcome {
    assert!(n >= 2, "the game needs a target distinct from the source");
    assert!(trials >= 1);
    let mut wins = 0;
    for trial in 0..trials {
        let trial_seed = derive_trial_seed(seed, trial);
        let j = derive_target(seed, trial, n);
        if binding_trial(strategy, n, policy, faults, framing, trial_seed, j) {
            wins += 1;
        }
    }
    GameOutcome::new(wins, trials)
}

/// The context-binding game: same-epoch framing. Under per-request
/// nonces the adversary's session and the target's are distinct
/// (cross-session in the published sense); under epoch-derived nonces
/// they share one nonce.
pub fn context_binding_game(
    strategy: Strategy,
    n: usize,
    policy: NoncePolicy,
    faults: FaultSet,
    trials: u32,
    seed: u64,
) -> GameOutcome {
    run_binding_game(strategy, n, policy, &faults, SessionFraming::SameEpoch, trials, seed)
}

/// Binding game with an epoch boundary between the adversary's session
/// and the transfer attempt: challenges are reissued, the old transcript
/// and preimage go stale under every strategy.
pub fn cross_session_binding_game(
    strategy: Strategy,
    n: usize,
    policy: NoncePolicy,
    faults: FaultSet,
    trials: u32,
    seed: u64,
) -> GameOutcome {
    run_binding_game(strategy, n, policy, &faults, SessionFraming::CrossSession, trials, seed)
}

/// Named fault configuration for the standard game report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameFaults {
    None,
    MappingFailure,
    NonceReuse,
}

impl GameFaults {
    pub fn label(self) -> &'static str {
        match self {
            GameFaults::None => "none",
            GameFaults::MappingFailure => "mapping_failure",
            GameFaults::NonceReuse => "nonce_reuse",
        }
    }

    pub fn fault_set(self) -> FaultSet {
        match self {
            GameFaults::None => FaultSet::none(),
            GameFaults::MappingFailure => FaultSet {
                mapping_failure: true,
                ..FaultSet::none()
            },
            GameFaults::NonceReuse => FaultSet {
                nonce_reuse: true,
                ..FaultSet::none()
            },
        }
    }
}

/// One row of the standard binding-game report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReportRow {
    pub strategy: Strategy,
    pub policy: NoncePolicy,
    pub faults: GameFaults,
    pub expected_rate: f64,
    pub outcome: GameOutcome,
}

/// The published win-rate configurations: trivial strategies, the four
/// invariant-dependent strategies faultless and under each invariant
/// failure, and the in-proof levels under both nonce policies.
pub fn standard_game_report(n: usize, trials: u32, seed: u64) -> Vec<GameReportRow> {
    use GameFaults::{MappingFailure, None as NoFaults, NonceReuse};
    use NoncePolicy::{EpochDerived, PerRequest};
    let configs: [(Strategy, NoncePolicy, GameFaults, f64); 18] = [
        (Strategy::S1, PerRequest, NoFaults, 1.0),
        (Strategy::S2a, PerRequest, NoFaults, 1.0),
        (Strategy::S2b, PerRequest, NoFaults, 0.0),
        (Strategy::S2cDefault, PerRequest, NoFaults, 0.0),
        (Strategy::S2cHardened, PerRequest, NoFaults, 0.0),
        (Strategy::S2d, PerRequest, NoFaults, 0.0),
        (Strategy::S2b, PerRequest, MappingFailure, 1.0),
        (Strategy::S2cDefault, PerRequest, MappingFailure, 1.0),
        (Strategy::S2cHardened, PerRequest, MappingFailure, 1.0),
        (Strategy::S2d, PerRequest, MappingFailure, 1.0),
        (Strategy::S2b, PerRequest, NonceReuse, 1.0),
        (Strategy::S2cDefault, PerRequest, NonceReuse, 1.0),
        (Strategy::S2cHardened, PerRequest, NonceReuse, 1.0),
        (Strategy::S2d, PerRequest, NonceReuse, 1.0),
        (Strategy::S3a, EpochDerived, NoFaults, 1.0),
        (Strategy::S3a, PerRequest, NoFaults, 0.0),
        (Strategy::S3b, PerRequest, NoFaults, 0.0),
        (Strategy::S3b, EpochDerived, NoFaults, 0.0),
    ];
    configs
        .into_iter()
        .map(|(strategy, policy, faults, expected_rate)| GameReportRow {
            strategy,
            policy,
            faults,
            expected_rate,
            outcome: context_binding_game(strategy, n, policy, faults.fault_set(), trials, seed),
        })
        .collect()
}
