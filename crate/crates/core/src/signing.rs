//! Signer-side protocol: share recovery, nonce commitments, aggregation,
//! shadow modification and partial signatures.
//!
//! Each signer `i` draws two nonces `(k1, k2)` and commits to
//!
//! | name | formula              | channel   |
//! |------|----------------------|-----------|
//! | `A_i`| `g^{-k2}`            | broadcast |
//! | `B_i`| `g^{k1}`             | private   |
//! | `C_i`| `g^{k1} · y_R^{k2}`  | broadcast |
//!
//! The aggregates `U_S, V_S, W_S` are the products of the `A`, `B` and `C`
//! values mod `p`, and the challenge is `R_S = h(V_S, m)`. The partial
//! signature is `s_i = k1 + l_i·λ_i·R_S mod q`.

use std::fmt;

use num_bigint::BigUint;
use rand::{CryptoRng, RngCore};

use crate::dealer::MemberRecord;
use crate::error::{Error, Result};
use crate::group::{hash_to_zq, pow_g_neg, random_scalar, GroupParams, CHALLENGE_TAG};
use crate::shamir::{check_member_ids, LagrangeWeights, MemberId};

/// A member's opened masked share `l_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct RecoveredShare {
    pub uid: MemberId,
    pub value: BigUint,
}

impl fmt::Debug for RecoveredShare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RecoveredShare({}, <redacted>)", self.uid)
    }
}

/// Opens `l_i = v_i · W^{x_i} mod p` and checks it against the board.
pub fn recover_share(
    record: &MemberRecord,
    w: &BigUint,
    member_secret: &BigUint,
    params: &GroupParams,
) -> Result<RecoveredShare> {
    let mismatch = |reason: &str| Error::BoardMismatch {
        uid: record.uid,
        reason: reason.to_string(),
    };
    let value = params.mul(&record.v, &params.pow(w, member_secret));
    if value >= params.q {
        return Err(mismatch("recovered share is not below q"));
    }
    if params.pow_g(&value) != record.m {
        return Err(mismatch("recovered share does not match m_i"));
    }
    if params.pow_g(member_secret) != record.public_key {
        return Err(mismatch(
            "private key does not match the board's public key",
        ));
    }
    Ok(RecoveredShare {
        uid: record.uid,
        value,
    })
}

/// The per-session nonce pair `(k1, k2)`. Consumed by [`partial_sign`].
pub struct NonceSecret {
    k1: BigUint,
    k2: BigUint,
}

impl fmt::Debug for NonceSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NonceSecret(<redacted>)")
    }
}

impl NonceSecret {
    pub fn generate<R: RngCore + CryptoRng>(params: &GroupParams, rng: &mut R) -> Self {
        NonceSecret {
            k1: random_scalar(params, rng),
            k2: random_scalar(params, rng),
        }
    }

    pub fn from_values(params: &GroupParams, k1: BigUint, k2: BigUint) -> Result<Self> {
        params.check_scalar(&k1, "k1")?;
        params.check_scalar(&k2, "k2")?;
        Ok(NonceSecret { k1, k2 })
    }

    pub fn commit(&self, params: &GroupParams, receiver_key: &BigUint) -> CommitmentTriple {
        let b = params.pow_g(&self.k1);
        CommitmentTriple {
            a: pow_g_neg(params, &self.k2),
            c: params.mul(&b, &params.pow(receiver_key, &self.k2)),
            b,
        }
    }
}

/// Commitments `(A_i, B_i, C_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentTriple {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
}

pub fn nonce_commit<R: RngCore + CryptoRng>(
    params: &GroupParams,
    receiver_key: &BigUint,
    rng: &mut R,
) -> Result<(NonceSecret, CommitmentTriple)> {
    params.check_element(receiver_key, "receiver public key")?;
    let nonce = NonceSecret::generate(params, rng);
    let triple = nonce.commit(params, receiver_key);
    Ok((nonce, triple))
}

/// Session-wide values every signer derives from all commitments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionAggregates {
    pub u_s: BigUint,
    pub v_s: BigUint,
    pub w_s: BigUint,
    pub challenge: BigUint,
    /// Signer subset, sorted ascending.
    pub signers: Vec<MemberId>,
}

pub fn aggregate_commitments(
    commitments: &[(MemberId, CommitmentTriple)],
    threshold: usize,
    message: &[u8],
    params: &GroupParams,
) -> Result<SessionAggregates> {
    if commitments.len() < threshold || commitments.is_empty() {
        return Err(Error::SubsetTooSmall {
            have: commitments.len(),
            need: threshold.max(1),
        });
    }
    let mut signers: Vec<MemberId> = commitments.iter().map(|(id, _)| *id).collect();
    check_member_ids(&signers, &params.q)?;
    signers.sort();

    for (id, t) in commitments {
        for (what, val) in [("A", &t.a), ("B", &t.b), ("C", &t.c)] {
            if !params.is_element(val) {
                return Err(Error::InvalidElement(format!("{what} from member {id}")));
            }
        }
    }
    let u_s = params.product(commitments.iter().map(|(_, t)| &t.a));
    let v_s = params.product(commitments.iter().map(|(_, t)| &t.b));
    let w_s = params.product(commitments.iter().map(|(_, t)| &t.c));
    let challenge = hash_to_zq(CHALLENGE_TAG, &[&v_s], message, params)?;
    Ok(SessionAggregates {
        u_s,
        v_s,
        w_s,
        challenge,
        signers,
    })
}

/// A signer's Lagrange weight and modified shadow `MS_i = l_i · λ_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct SignerContext {
    pub uid: MemberId,
    pub lambda: BigUint,
    pub modified_shadow: BigUint,
}

impl fmt::Debug for SignerContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignerContext")
            .field("uid", &self.uid)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

pub fn modify_shadow(
    share: &RecoveredShare,
    subset: &[MemberId],
    weights: &LagrangeWeights,
    params: &GroupParams,
) -> Result<SignerContext> {
    let lambda = weights.coefficient(share.uid, subset, &params.q)?;
    let modified_shadow = params.scalar_mul(&share.value, &lambda);
    Ok(SignerContext {
        uid: share.uid,
        lambda,
        modified_shadow,
    })
}

/// One signer's contribution `(s_i, B_i, R_S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSignature {
    pub uid: MemberId,
    pub s: BigUint,
    pub b: BigUint,
    pub challenge: BigUint,
}

/// `s_i = k1 + MS_i · R_S mod q`. Consumes the nonce.
pub fn partial_sign(
    params: &GroupParams,
    nonce: NonceSecret,
    context: &SignerContext,
    challenge: &BigUint,
) -> Result<PartialSignature> {
    if challenge >= &params.q {
        return Err(Error::InvalidScalar("challenge not below q".into()));
    }
    let s = params.scalar_add(
        &nonce.k1,
        &params.scalar_mul(&context.modified_shadow, challenge),
    );
    Ok(PartialSignature {
        uid: context.uid,
        b: params.pow_g(&nonce.k1),
        s,
        challenge: challenge.clone(),
    })
}
