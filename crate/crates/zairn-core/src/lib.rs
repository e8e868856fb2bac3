//! Deterministic simulator for context-bound proximity proofs.
//!
//! The library models a location-unlock deployment end to end: a fixed-point
//! geofence predicate ([`geo`]), canonical length-prefixed context encoding
//! hashed into a prime field ([`codec`]), four proximity relation variants
//! ([`statement`]), an idealized MAC-based proving backend with exact
//! soundness coupling ([`proof`]), a challenge-issuance server with eight
//! verifier strategies and fault injection ([`server`]), adversarial
//! transfer scenarios and security games ([`scenario`], [`games`]), a
//! closed-form deployment latency model ([`deploy`]), and CSV/Markdown
//! rendering of every decision table ([`report`]).
//!
//! Everything is deterministic under caller-supplied seeds; no wall-clock
//! time, threads, or network I/O enter any code path. The `zairn` binary
//! regenerates the decision tables from these modules and checks them
//! against committed golden fixtures.

pub mod codec;
pub mod deploy;
pub mod games;
pub mod geo;
pub mod proof;
pub mod report;
pub mod scenario;
pub mod server;
pub mod statement;
