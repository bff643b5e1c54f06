//! Directed (t, n)-threshold multi-signatures over a Schnorr group.
//!
//! A trusted dealer splits a group key among `n` members with Shamir sharing
//! and masks every share with a per-member nonce. Any `t` members can then
//! sign a message for one designated receiver `R`: each contributes a partial
//! signature, a secretless combiner checks and sums them, and only `R` (who
//! holds `x_R`) can check the result. `R` can later convince a third party
//! through an interactive discrete-log-equality proof.
//!
//! Module map:
//!
//! - [`group`]: modular arithmetic, parameter generation, keys, hashing
//! - [`shamir`]: polynomials and Lagrange weights
//! - [`dealer`]: the share distribution center and its public board
//! - [`signing`]: share recovery, commitments, partial signatures
//! - [`combiner`]: partial verification and aggregation
//! - [`receiver`]: directed verification and the confirmation protocol
//! - [`sim`]: deterministic multi-party simulator with attack scenarios
//! - [`records`]: the line-oriented `%DTMS v1` file format
//! - [`fixture`]: the seven-member toy worked example

pub mod combiner;
pub mod dealer;
pub mod error;
pub mod fixture;
pub mod group;
pub mod receiver;
pub mod records;
pub mod shamir;
pub mod signing;
pub mod sim;

pub use combiner::{Combiner, GroupSignature};
pub use dealer::{dealer_setup, DealerPublicBoard, DealerSecrets, MemberRecord};
pub use error::{Error, Result};
pub use group::{GroupParams, HashMode, KeyPair};
pub use receiver::{ConfirmationPackage, ZkTranscript, ZkVerdict};
pub use shamir::{LagrangeWeights, MemberId};
pub use signing::{PartialSignature, SessionAggregates};

/// Marker for role states built exclusively from public values.
///
/// Implemented for the combiner and the third-party roles. A type holding a
/// private key, share, nonce or dealer secret must never implement it.
pub trait PublicOnly {}
