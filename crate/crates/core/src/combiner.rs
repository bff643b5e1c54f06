//! The designated combiner: checks each partial signature against the public
//! board and sums the valid ones into the group signature.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::dealer::DealerPublicBoard;
use crate::error::{Error, Result};
use crate::group::{hash_to_zq, GroupParams, CHALLENGE_TAG};
use crate::shamir::{LagrangeWeights, MemberId};
use crate::signing::{PartialSignature, SessionAggregates};
use crate::PublicOnly;

/// `{S_S, U_S, W_S, m}` plus the signer set needed to rebuild `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub s_s: BigUint,
    pub u_s: BigUint,
    pub w_s: BigUint,
    pub message: Vec<u8>,
    /// Sorted ascending.
    pub signers: Vec<MemberId>,
}

/// Holds only public values: parameters, the dealer's board, and how to
/// obtain Lagrange weights.
#[derive(Clone, Debug)]
pub struct Combiner {
    params: GroupParams,
    board: DealerPublicBoard,
    weights: LagrangeWeights,
    recompute_challenge: bool,
}

impl PublicOnly for Combiner {}

impl Combiner {
    pub fn new(params: GroupParams, board: DealerPublicBoard) -> Self {
        Combiner {
            params,
            board,
            weights: LagrangeWeights::Computed,
            recompute_challenge: true,
        }
    }

    pub fn with_weights(mut self, weights: LagrangeWeights) -> Self {
        self.weights = weights;
        self
    }

    /// When set (the default), the combiner recomputes `R_S = h(V_S, m)`
    /// itself instead of trusting the value carried by the partials.
    pub fn recompute_challenge(mut self, on: bool) -> Self {
        self.recompute_challenge = on;
        self
    }

    pub fn board(&self) -> &DealerPublicBoard {
        &self.board
    }

    /// `g^{s_i} ≡ B_i · m_i^{λ_i·R_S mod q} (mod p)`.
    ///
    /// Unknown or out-of-subset ids are errors, not `false`.
    pub fn verify_partial(&self, ps: &PartialSignature, subset: &[MemberId]) -> Result<bool> {
        let record = self.board.member(ps.uid)?;
        let params = &self.params;
        let lambda = self.weights.coefficient(ps.uid, subset, &params.q)?;
        if ps.s >= params.q || ps.challenge >= params.q || !params.is_element(&ps.b) {
            return Ok(false);
        }
        let exponent = params.scalar_mul(&lambda, &ps.challenge);
        let rhs = params.mul(&ps.b, &params.pow(&record.m, &exponent));
        Ok(params.pow_g(&ps.s) == rhs)
    }

    /// Verifies every partial and returns `S_S = Σ s_i mod q` with the payload.
    pub fn combine(
        &self,
        partials: &[PartialSignature],
        aggregates: &SessionAggregates,
        message: &[u8],
    ) -> Result<GroupSignature> {
        let params = &self.params;
        let subset = &aggregates.signers;
        if subset.len() < self.board.threshold {
            return Err(Error::SubsetTooSmall {
                have: subset.len(),
                need: self.board.threshold,
            });
        }
        let mut ids: Vec<MemberId> = partials.iter().map(|p| p.uid).collect();
        ids.sort();
        if ids != *subset {
            if let Some(missing) = subset.iter().find(|id| !ids.contains(id)) {
                return Err(Error::MissingCommitment(*missing));
            }
            let extra = ids
                .iter()
                .find(|id| !subset.contains(id))
                .copied()
                .unwrap_or(ids[0]);
            return Err(Error::NotInSubset(extra));
        }

        let challenge = &partials[0].challenge;
        if partials.iter().any(|p| &p.challenge != challenge) {
            return Err(Error::ChallengeMismatch);
        }
        if self.recompute_challenge {
            let expected = hash_to_zq(CHALLENGE_TAG, &[&aggregates.v_s], message, params)?;
            if &expected != challenge {
                return Err(Error::ChallengeMismatch);
            }
        }

        let mut rejected = Vec::new();
        for ps in partials {
            if !self.verify_partial(ps, subset)? {
                rejected.push(ps.uid);
            }
        }
        if !rejected.is_empty() {
            rejected.sort();
            return Err(Error::PartialRejected(rejected));
        }

        let s_s = partials
            .iter()
            .fold(BigUint::zero(), |acc, p| params.scalar_add(&acc, &p.s));
        Ok(GroupSignature {
            s_s,
            u_s: aggregates.u_s.clone(),
            w_s: aggregates.w_s.clone(),
            message: message.to_vec(),
            signers: subset.clone(),
        })
    }
}
