//! Polynomials over `Z_q`, share evaluation, and Lagrange reconstruction at 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::{mod_inv, GroupParams};

/// Public identity `u` of a group member. Never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemberId(u64);

impl MemberId {
    pub fn new(uid: u64) -> Result<Self> {
        if uid == 0 {
            Err(Error::ZeroMemberId)
        } else {
            Ok(MemberId(uid))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_scalar(self) -> BigUint {
        BigUint::from(self.0)
    }
}

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Checks that ids are nonzero and pairwise distinct modulo `q`.
pub fn check_member_ids(ids: &[MemberId], q: &BigUint) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &id in ids {
        let r = id.as_scalar() % q;
        if r.is_zero() {
            return Err(Error::ZeroMemberId);
        }
        if !seen.insert(r) {
            return Err(Error::DuplicateMember(id));
        }
    }
    Ok(())
}

/// `f(x) = a_0 + a_1 x + … + a_{t-1} x^{t-1}` over `Z_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretPolynomial {
    coefficients: Vec<BigUint>,
}

impl fmt::Debug for SecretPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretPolynomial(t = {})", self.threshold())
    }
}

impl SecretPolynomial {
    pub fn from_coefficients(coefficients: Vec<BigUint>, q: &BigUint) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidThreshold { t: 0, n: 0 });
        }
        Ok(SecretPolynomial {
            coefficients: coefficients.into_iter().map(|c| c % q).collect(),
        })
    }

    pub fn threshold(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    /// The shared secret `f(0)`.
    pub fn secret(&self) -> &BigUint {
        &self.coefficients[0]
    }

    /// Horner evaluation mod `q`.
    pub fn eval(&self, x: &BigUint, q: &BigUint) -> BigUint {
        let x = x % q;
        self.coefficients
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| (acc * &x + c) % q)
    }

    pub fn eval_at(&self, id: MemberId, q: &BigUint) -> BigUint {
        self.eval(&id.as_scalar(), q)
    }
}

/// Samples a degree-`(t-1)` polynomial with `f(0) = secret`.
pub fn poly_sample<R: RngCore + CryptoRng>(
    t: usize,
    secret: &BigUint,
    params: &GroupParams,
    rng: &mut R,
) -> Result<SecretPolynomial> {
    if t == 0 {
        return Err(Error::InvalidThreshold { t, n: 0 });
    }
    params.check_scalar(secret, "polynomial secret")?;
    let mut coefficients = Vec::with_capacity(t);
    coefficients.push(secret.clone());
    // Higher coefficients are uniform in Z_q, zero included.
    for _ in 1..t {
        coefficients.push(rng.gen_biguint_below(&params.q));
    }
    SecretPolynomial::from_coefficients(coefficients, &params.q)
}

fn to_signed(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

fn reduce(x: BigInt, q: &BigUint) -> BigUint {
    let q = to_signed(q);
    let r = ((x % &q) + &q) % &q;
    r.magnitude().clone()
}

/// `λ_i = Π_{j ∈ S, j ≠ i} (−u_j)·(u_i − u_j)^{-1} mod q`.
pub fn lagrange_at_zero(i: MemberId, subset: &[MemberId], q: &BigUint) -> Result<BigUint> {
    if !subset.contains(&i) {
        return Err(Error::NotInSubset(i));
    }
    let ui = to_signed(&i.as_scalar());
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for &j in subset.iter().filter(|&&j| j != i) {
        let uj = to_signed(&j.as_scalar());
        num = num * reduce(-uj.clone(), q) % q;
        let diff = reduce(&ui - &uj, q);
        if diff.is_zero() {
            return Err(Error::DuplicateMember(j));
        }
        den = den * diff % q;
    }
    Ok(num * mod_inv(&den, q)? % q)
}

/// `f(0) = Σ share_i · λ_i mod q`.
pub fn reconstruct_at_zero(shares: &[(MemberId, BigUint)], q: &BigUint) -> Result<BigUint> {
    if shares.is_empty() {
        return Err(Error::SubsetTooSmall { have: 0, need: 1 });
    }
    let ids: Vec<MemberId> = shares.iter().map(|(id, _)| *id).collect();
    check_member_ids(&ids, q)?;
    shares.iter().try_fold(BigUint::zero(), |acc, (id, share)| {
        let lambda = lagrange_at_zero(*id, &ids, q)?;
        Ok((acc + share * lambda) % q)
    })
}

/// Where Lagrange coefficients come from.
///
/// `Computed` is the normal path. `Fixed` supplies coefficients directly for
/// replaying worked examples whose member identities are not stated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum LagrangeWeights {
    #[default]
    Computed,
    Fixed(BTreeMap<MemberId, BigUint>),
}

impl LagrangeWeights {
    pub fn fixed<I: IntoIterator<Item = (MemberId, u64)>>(entries: I) -> Self {
        LagrangeWeights::Fixed(
            entries
                .into_iter()
                .map(|(id, v)| (id, BigUint::from(v)))
                .collect(),
        )
    }

    pub fn coefficient(&self, i: MemberId, subset: &[MemberId], q: &BigUint) -> Result<BigUint> {
        match self {
            LagrangeWeights::Computed => lagrange_at_zero(i, subset, q),
            LagrangeWeights::Fixed(table) => {
                if !subset.contains(&i) {
                    return Err(Error::NotInSubset(i));
                }
                table.get(&i).map(|v| v % q).ok_or(Error::MissingWeight(i))
            }
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, LagrangeWeights::Fixed(_))
    }
}
