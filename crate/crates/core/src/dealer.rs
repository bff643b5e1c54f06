//! The trusted share distribution center.
//!
//! The dealer picks the group polynomial `f`, publishes `y_S = g^{f(0)}` and
//! `W = g^{-K}`, and for every member masks the Shamir share with a fresh
//! nonce: `l_i = K_i + f(u_i) mod q`. The masked share travels publicly as
//! `v_i = l_i · y_i^K mod p`, which only the holder of `x_i` can open since
//! `v_i · W^{x_i} = l_i`. Alongside it the board carries `m_i = g^{l_i}` and
//! `n_i = g^{K_i}` so that partial signatures and the group signature can be
//! checked without any secret.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::{pow_g_neg, random_scalar, GroupParams};
use crate::shamir::{check_member_ids, poly_sample, MemberId, SecretPolynomial};

const RESAMPLE_LIMIT: usize = 64;

/// Public board entry for one member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberRecord {
    pub uid: MemberId,
    /// The member's own public key `y_i = g^{x_i}`.
    pub public_key: BigUint,
    /// `m_i = g^{l_i}`.
    pub m: BigUint,
    /// `n_i = g^{K_i}`.
    pub n: BigUint,
    /// `v_i = l_i · y_i^K`, the masked-share transport value.
    pub v: BigUint,
}

/// Everything the dealer publishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealerPublicBoard {
    pub group_public_key: BigUint,
    pub w: BigUint,
    pub threshold: usize,
    pub members: Vec<MemberRecord>,
}

impl DealerPublicBoard {
    pub fn group_size(&self) -> usize {
        self.members.len()
    }

    pub fn member(&self, uid: MemberId) -> Result<&MemberRecord> {
        self.members
            .iter()
            .find(|m| m.uid == uid)
            .ok_or(Error::UnknownMember(uid))
    }

    pub fn ids(&self) -> Vec<MemberId> {
        self.members.iter().map(|m| m.uid).collect()
    }

    /// Structural checks that need no secret: ranges, distinct ids, threshold.
    pub fn check_public(&self, params: &GroupParams) -> Result<()> {
        let n = self.group_size();
        if self.threshold == 0 || self.threshold > n {
            return Err(Error::InvalidThreshold {
                t: self.threshold,
                n,
            });
        }
        check_member_ids(&self.ids(), &params.q)?;
        if !params.in_subgroup(&self.group_public_key) {
            return Err(Error::InvalidElement("y_S outside the subgroup".into()));
        }
        if !params.in_subgroup(&self.w) {
            return Err(Error::InvalidElement("W outside the subgroup".into()));
        }
        for rec in &self.members {
            for (what, val) in [
                ("y", &rec.public_key),
                ("m", &rec.m),
                ("n", &rec.n),
                ("v", &rec.v),
            ] {
                if !params.is_element(val) {
                    return Err(Error::BoardMismatch {
                        uid: rec.uid,
                        reason: format!("{what} not in [1, p-1]"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Values only the dealer knows. Deliberately has no serialization.
#[derive(Clone)]
pub struct DealerSecrets {
    pub polynomial: SecretPolynomial,
    pub masking_key: BigUint,
    pub nonces: BTreeMap<MemberId, BigUint>,
    /// Raw Shamir shares `f(u_i)`.
    pub shares: BTreeMap<MemberId, BigUint>,
    /// Masked shares `l_i`.
    pub masked_shares: BTreeMap<MemberId, BigUint>,
}

impl fmt::Debug for DealerSecrets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DealerSecrets")
            .field("members", &self.nonces.len())
            .finish_non_exhaustive()
    }
}

impl DealerSecrets {
    pub fn group_secret(&self) -> &BigUint {
        self.polynomial.secret()
    }
}

/// Fixed dealer inputs for replaying a worked example.
///
/// `share_values`, when present, replaces `f(u_i)` for each member in order;
/// this is how an example with unstated member identities is reproduced.
#[derive(Clone, Debug)]
pub struct DealerFixture {
    pub coefficients: Vec<BigUint>,
    pub masking_key: BigUint,
    pub nonces: Vec<BigUint>,
    pub share_values: Option<Vec<BigUint>>,
}

fn check_inputs(params: &GroupParams, t: usize, members: &[(MemberId, BigUint)]) -> Result<()> {
    let n = members.len();
    if t == 0 || t > n {
        return Err(Error::InvalidThreshold { t, n });
    }
    let ids: Vec<MemberId> = members.iter().map(|(id, _)| *id).collect();
    check_member_ids(&ids, &params.q)?;
    for (id, y) in members {
        if y < &BigUint::from(2u32) || y >= &params.p {
            return Err(Error::BoardMismatch {
                uid: *id,
                reason: "member public key not in [2, p-1]".into(),
            });
        }
    }
    Ok(())
}

fn publish(
    params: &GroupParams,
    t: usize,
    members: &[(MemberId, BigUint)],
    polynomial: SecretPolynomial,
    masking_key: BigUint,
    nonces: BTreeMap<MemberId, BigUint>,
    shares: BTreeMap<MemberId, BigUint>,
) -> Result<(DealerPublicBoard, DealerSecrets)> {
    let group_public_key = params.pow_g(polynomial.secret());
    let w = pow_g_neg(params, &masking_key);

    let mut records = Vec::with_capacity(members.len());
    let mut masked_shares = BTreeMap::new();
    for (uid, y) in members {
        let k_i = &nonces[uid];
        let l = params.scalar_add(k_i, &shares[uid]);
        if l.is_zero() {
            return Err(Error::BoardMismatch {
                uid: *uid,
                reason: "masked share is zero".into(),
            });
        }
        let v = params.mul(&l, &params.pow(y, &masking_key));
        records.push(MemberRecord {
            uid: *uid,
            public_key: y.clone(),
            m: params.pow_g(&l),
            n: params.pow_g(k_i),
            v,
        });
        masked_shares.insert(*uid, l);
    }

    let board = DealerPublicBoard {
        group_public_key,
        w,
        threshold: t,
        members: records,
    };
    let secrets = DealerSecrets {
        polynomial,
        masking_key,
        nonces,
        shares,
        masked_shares,
    };
    Ok((board, secrets))
}

/// Runs the dealer with fresh randomness.
///
/// `members` lists each member's id and public key `y_i`. Nonces `K_i` that
/// would make `l_i` zero are resampled.
pub fn dealer_setup<R: RngCore + CryptoRng>(
    params: &GroupParams,
    t: usize,
    members: &[(MemberId, BigUint)],
    rng: &mut R,
) -> Result<(DealerPublicBoard, DealerSecrets)> {
    check_inputs(params, t, members)?;
    let secret = random_scalar(params, rng);
    let polynomial = poly_sample(t, &secret, params, rng)?;
    let masking_key = random_scalar(params, rng);

    let mut nonces = BTreeMap::new();
    let mut shares = BTreeMap::new();
    for (uid, _) in members {
        let share = polynomial.eval_at(*uid, &params.q);
        let mut attempts = 0;
        let k_i = loop {
            let k = random_scalar(params, rng);
            if !params.scalar_add(&k, &share).is_zero() {
                break k;
            }
            attempts += 1;
            if attempts >= RESAMPLE_LIMIT {
                return Err(Error::ResampleExhausted(*uid));
            }
        };
        nonces.insert(*uid, k_i);
        shares.insert(*uid, share);
    }
    publish(params, t, members, polynomial, masking_key, nonces, shares)
}

/// Runs the dealer on fixed inputs.
pub fn dealer_setup_fixture(
    params: &GroupParams,
    t: usize,
    members: &[(MemberId, BigUint)],
    fixture: &DealerFixture,
) -> Result<(DealerPublicBoard, DealerSecrets)> {
    check_inputs(params, t, members)?;
    if fixture.coefficients.len() != t {
        return Err(Error::Config(format!(
            "fixture has {} coefficients for threshold {t}",
            fixture.coefficients.len()
        )));
    }
    if fixture.nonces.len() != members.len() {
        return Err(Error::Config(
            "fixture nonce count differs from group size".into(),
        ));
    }
    params.check_scalar(&fixture.masking_key, "masking key")?;
    let polynomial = SecretPolynomial::from_coefficients(fixture.coefficients.clone(), &params.q)?;

    let mut nonces = BTreeMap::new();
    let mut shares = BTreeMap::new();
    for (k, (uid, _)) in members.iter().enumerate() {
        params.check_scalar(&fixture.nonces[k], "member nonce")?;
        let share = match &fixture.share_values {
            Some(values) => values.get(k).map(|v| v % &params.q).ok_or_else(|| {
                Error::Config("fixture share count differs from group size".into())
            })?,
            None => polynomial.eval_at(*uid, &params.q),
        };
        nonces.insert(*uid, fixture.nonces[k].clone());
        shares.insert(*uid, share);
    }
    publish(
        params,
        t,
        members,
        polynomial,
        fixture.masking_key.clone(),
        nonces,
        shares,
    )
}

/// Checks every board invariant against the dealer's retained secrets.
pub fn check_board_against_secrets(
    params: &GroupParams,
    board: &DealerPublicBoard,
    secrets: &DealerSecrets,
) -> Result<()> {
    board.check_public(params)?;
    let mismatch = |uid: MemberId, reason: &str| Error::BoardMismatch {
        uid,
        reason: reason.to_string(),
    };
    if board.group_public_key != params.pow_g(secrets.group_secret()) {
        return Err(Error::InvalidElement("y_S ≠ g^{f(0)}".into()));
    }
    if params.mul(&board.w, &params.pow_g(&secrets.masking_key)) != BigUint::from(1u32) {
        return Err(Error::InvalidElement("W ≠ g^{-K}".into()));
    }
    for rec in &board.members {
        let l = &secrets.masked_shares[&rec.uid];
        let k_i = &secrets.nonces[&rec.uid];
        if l >= &params.q || l.is_zero() {
            return Err(mismatch(rec.uid, "l_i not in [1, q-1]"));
        }
        if params.scalar_add(k_i, &secrets.shares[&rec.uid]) != *l {
            return Err(mismatch(rec.uid, "l_i ≠ K_i + f(u_i)"));
        }
        if rec.m != params.pow_g(l) {
            return Err(mismatch(rec.uid, "m_i ≠ g^{l_i}"));
        }
        if rec.n != params.pow_g(k_i) {
            return Err(mismatch(rec.uid, "n_i ≠ g^{K_i}"));
        }
        if rec.v != params.mul(l, &params.pow(&rec.public_key, &secrets.masking_key)) {
            return Err(mismatch(rec.uid, "v_i ≠ l_i · y_i^K"));
        }
        if rec.m != params.mul(&rec.n, &params.pow_g(&secrets.shares[&rec.uid])) {
            return Err(mismatch(rec.uid, "m_i ≠ n_i · g^{f(u_i)}"));
        }
    }
    Ok(())
}
