//! Directed verification by the receiver `R`, and the confirmation protocol
//! through which `R` convinces a third party `C` that a signature is valid.
//!
//! Only `R` can verify: it needs `U_S^{x_R}` to turn `W_S` back into
//! `R_R = W_S · U_S^{x_R}`, which equals the signers' `V_S` in an honest run.
//! The check is
//!
//! ```text
//! g^{S_S} ≡ R_R · (E · y_S)^{h(R_R, m)}  (mod p),   E = Π n_i^{λ_i}
//! ```
//!
//! To convince `C`, `R` hands over `μ = U_S^{x_R}` and `R_R`, and then proves
//! `log_{U_S} μ = log_g y_R` interactively:
//!
//! 1. `C → R`: `w = U_S^u · g^v`
//! 2. `R → C`: `β = w · g^α`, `γ = β^{x_R}`
//! 3. `C → R`: `(u, v)`; `R` checks `w`
//! 4. `R → C`: `α`; `C` checks `β = U_S^u · g^{v+α}` and `γ = μ^u · y_R^{v+α}`

use std::fmt;

use num_bigint::BigUint;
use rand::{CryptoRng, RngCore};

use crate::combiner::GroupSignature;
use crate::dealer::DealerPublicBoard;
use crate::error::{Error, Result};
use crate::group::{hash_to_zq, random_below_p, GroupParams, KeyPair, CHALLENGE_TAG};
use crate::shamir::{LagrangeWeights, MemberId};
use crate::PublicOnly;

/// `E = Π_{i ∈ H_S} n_i^{λ_i} mod p`.
pub fn compute_e(
    signers: &[MemberId],
    board: &DealerPublicBoard,
    weights: &LagrangeWeights,
    params: &GroupParams,
) -> Result<BigUint> {
    let mut e = BigUint::from(1u32);
    for &uid in signers {
        let record = board.member(uid)?;
        let lambda = weights.coefficient(uid, signers, &params.q)?;
        e = params.mul(&e, &params.pow(&record.n, &lambda));
    }
    Ok(e)
}

/// `R_R = W_S · U_S^{x_R} mod p`.
pub fn recover_commitment(
    w_s: &BigUint,
    u_s: &BigUint,
    receiver_secret: &BigUint,
    params: &GroupParams,
) -> BigUint {
    params.mul(w_s, &params.pow(u_s, receiver_secret))
}

/// `g^{S_S} ≡ R_R · (E · y_S)^{R_S} (mod p)` with `R_S = h(R_R, m)`.
fn congruence_holds(
    s_s: &BigUint,
    r_r: &BigUint,
    e: &BigUint,
    group_public_key: &BigUint,
    message: &[u8],
    params: &GroupParams,
) -> bool {
    if s_s >= &params.q || !params.is_element(r_r) || !params.is_element(e) {
        return false;
    }
    let Ok(challenge) = hash_to_zq(CHALLENGE_TAG, &[r_r], message, params) else {
        return false;
    };
    let base = params.mul(e, group_public_key);
    params.pow_g(s_s) == params.mul(r_r, &params.pow(&base, &challenge))
}

/// Full directed verification. `E` is always rebuilt from the board.
pub fn verify_group_signature(
    sig: &GroupSignature,
    board: &DealerPublicBoard,
    receiver: &KeyPair,
    weights: &LagrangeWeights,
    params: &GroupParams,
) -> bool {
    if sig.signers.len() < board.threshold || !params.is_element(&sig.u_s) {
        return false;
    }
    let Ok(e) = compute_e(&sig.signers, board, weights, params) else {
        return false;
    };
    let r_r = recover_commitment(&sig.w_s, &sig.u_s, &receiver.x, params);
    congruence_holds(
        &sig.s_s,
        &r_r,
        &e,
        &board.group_public_key,
        &sig.message,
        params,
    )
}

/// `{R_R, E, S_S, U_S, m, μ}` sent from `R` to `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfirmationPackage {
    pub r_r: BigUint,
    pub e: BigUint,
    pub s_s: BigUint,
    pub u_s: BigUint,
    pub message: Vec<u8>,
    pub mu: BigUint,
}

pub fn build_confirmation_package(
    sig: &GroupSignature,
    board: &DealerPublicBoard,
    receiver: &KeyPair,
    weights: &LagrangeWeights,
    params: &GroupParams,
) -> Result<ConfirmationPackage> {
    if !verify_group_signature(sig, board, receiver, weights, params) {
        return Err(Error::SignatureInvalid);
    }
    let mu = params.pow(&sig.u_s, &receiver.x);
    Ok(ConfirmationPackage {
        r_r: params.mul(&mu, &sig.w_s),
        e: compute_e(&sig.signers, board, weights, params)?,
        s_s: sig.s_s.clone(),
        u_s: sig.u_s.clone(),
        message: sig.message.clone(),
        mu,
    })
}

/// `C`'s congruence check on a package, trusting the packaged `E`.
pub fn third_party_check(
    package: &ConfirmationPackage,
    group_public_key: &BigUint,
    params: &GroupParams,
) -> bool {
    congruence_holds(
        &package.s_s,
        &package.r_r,
        &package.e,
        group_public_key,
        &package.message,
        params,
    )
}

/// The third party `C`. Optionally rebuilds `E` from the board instead of
/// trusting the packaged value.
#[derive(Clone, Debug)]
pub struct ThirdParty {
    params: GroupParams,
    group_public_key: BigUint,
    recompute: Option<(DealerPublicBoard, Vec<MemberId>, LagrangeWeights)>,
}

impl PublicOnly for ThirdParty {}

impl ThirdParty {
    pub fn new(params: GroupParams, group_public_key: BigUint) -> Self {
        ThirdParty {
            params,
            group_public_key,
            recompute: None,
        }
    }

    pub fn recompute_e_from(
        mut self,
        board: DealerPublicBoard,
        signers: Vec<MemberId>,
        weights: LagrangeWeights,
    ) -> Self {
        self.recompute = Some((board, signers, weights));
        self
    }

    pub fn check(&self, package: &ConfirmationPackage) -> bool {
        if let Some((board, signers, weights)) = &self.recompute {
            match compute_e(signers, board, weights, &self.params) {
                Ok(e) if e == package.e => {}
                _ => return false,
            }
        }
        third_party_check(package, &self.group_public_key, &self.params)
    }
}

/// The randomness `C` (`u`, `v`) and `R` (`α`) draw for one confirmation run.
/// Values live in `[1, p-1]` and are used unreduced as exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkRandomness {
    pub u: BigUint,
    pub v: BigUint,
    pub alpha: BigUint,
}

/// Which of the three confirmation checks failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZkCheck {
    /// `R` found `w ≠ U_S^u · g^v` after `C` opened `(u, v)`.
    Opening,
    /// `C` found `β ≠ U_S^u · g^{v+α}`.
    Beta,
    /// `C` found `γ ≠ μ^u · y_R^{v+α}`.
    Gamma,
}

impl fmt::Display for ZkCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZkCheck::Opening => "opening",
            ZkCheck::Beta => "beta",
            ZkCheck::Gamma => "gamma",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZkVerdict {
    Accept,
    Reject(ZkCheck),
}

impl ZkVerdict {
    pub fn is_accept(self) -> bool {
        self == ZkVerdict::Accept
    }
}

/// Message sequence of one confirmation run. `alpha` is absent when `R`
/// aborted at the opening check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZkTranscript {
    pub w: BigUint,
    pub beta: BigUint,
    pub gamma: BigUint,
    pub u: BigUint,
    pub v: BigUint,
    pub alpha: Option<BigUint>,
    pub verdict: ZkVerdict,
}

/// `C`'s side of the confirmation protocol.
#[derive(Clone, Debug)]
pub struct ConfirmationVerifier {
    params: GroupParams,
    u_s: BigUint,
    mu: BigUint,
    receiver_public: BigUint,
    u: BigUint,
    v: BigUint,
}

impl PublicOnly for ConfirmationVerifier {}

impl ConfirmationVerifier {
    pub fn new(
        params: &GroupParams,
        package: &ConfirmationPackage,
        receiver_public: &BigUint,
        u: BigUint,
        v: BigUint,
    ) -> Self {
        ConfirmationVerifier {
            params: params.clone(),
            u_s: package.u_s.clone(),
            mu: package.mu.clone(),
            receiver_public: receiver_public.clone(),
            u,
            v,
        }
    }

    pub fn sample<R: RngCore + CryptoRng>(
        params: &GroupParams,
        package: &ConfirmationPackage,
        receiver_public: &BigUint,
        rng: &mut R,
    ) -> Self {
        let u = random_below_p(params, rng);
        let v = random_below_p(params, rng);
        Self::new(params, package, receiver_public, u, v)
    }

    /// Move 1: `w = U_S^u · g^v`.
    pub fn challenge(&self) -> BigUint {
        let p = &self.params;
        p.mul(&p.pow(&self.u_s, &self.u), &p.pow_g(&self.v))
    }

    /// Move 3: reveal `(u, v)`.
    pub fn open(&self) -> (BigUint, BigUint) {
        (self.u.clone(), self.v.clone())
    }

    /// Final checks after move 4.
    pub fn finish(&self, beta: &BigUint, gamma: &BigUint, alpha: &BigUint) -> ZkVerdict {
        let p = &self.params;
        let exp = &self.v + alpha;
        let beta_expected = p.mul(&p.pow(&self.u_s, &self.u), &p.pow_g(&exp));
        if &beta_expected != beta {
            return ZkVerdict::Reject(ZkCheck::Beta);
        }
        let gamma_expected = p.mul(
            &p.pow(&self.mu, &self.u),
            &p.pow(&self.receiver_public, &exp),
        );
        if &gamma_expected != gamma {
            return ZkVerdict::Reject(ZkCheck::Gamma);
        }
        ZkVerdict::Accept
    }
}

/// `R`'s side of the confirmation protocol.
pub struct ConfirmationProver {
    params: GroupParams,
    secret: BigUint,
    u_s: BigUint,
    alpha: BigUint,
    w: Option<BigUint>,
}

impl fmt::Debug for ConfirmationProver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConfirmationProver")
            .field("u_s", &self.u_s)
            .finish_non_exhaustive()
    }
}

impl ConfirmationProver {
    pub fn new(params: &GroupParams, secret: &BigUint, u_s: &BigUint, alpha: BigUint) -> Self {
        ConfirmationProver {
            params: params.clone(),
            secret: secret.clone(),
            u_s: u_s.clone(),
            alpha,
            w: None,
        }
    }

    /// Move 2: `β = w · g^α`, `γ = β^{x_R}`.
    pub fn respond(&mut self, w: &BigUint) -> (BigUint, BigUint) {
        let p = &self.params;
        let beta = p.mul(w, &p.pow_g(&self.alpha));
        let gamma = p.pow(&beta, &self.secret);
        self.w = Some(w.clone());
        (beta, gamma)
    }

    /// Move 4: check `w = U_S^u · g^v`, then reveal `α`.
    pub fn reveal(&self, u: &BigUint, v: &BigUint) -> std::result::Result<BigUint, ZkCheck> {
        let p = &self.params;
        let expected = p.mul(&p.pow(&self.u_s, u), &p.pow_g(v));
        match &self.w {
            Some(w) if *w == expected => Ok(self.alpha.clone()),
            _ => Err(ZkCheck::Opening),
        }
    }
}

/// Drives both roles through the four moves with fixed randomness.
pub fn zk_run_with(
    package: &ConfirmationPackage,
    receiver: &KeyPair,
    randomness: &ZkRandomness,
    params: &GroupParams,
) -> ZkTranscript {
    let verifier = ConfirmationVerifier::new(
        params,
        package,
        &receiver.y,
        randomness.u.clone(),
        randomness.v.clone(),
    );
    let mut prover =
        ConfirmationProver::new(params, &receiver.x, &package.u_s, randomness.alpha.clone());
    run_moves(&verifier, &mut prover)
}

/// Runs the moves between an arbitrary verifier and prover.
pub fn run_moves(verifier: &ConfirmationVerifier, prover: &mut ConfirmationProver) -> ZkTranscript {
    let w = verifier.challenge();
    let (beta, gamma) = prover.respond(&w);
    let (u, v) = verifier.open();
    let (alpha, verdict) = match prover.reveal(&u, &v) {
        Ok(alpha) => {
            let verdict = verifier.finish(&beta, &gamma, &alpha);
            (Some(alpha), verdict)
        }
        Err(check) => (None, ZkVerdict::Reject(check)),
    };
    ZkTranscript {
        w,
        beta,
        gamma,
        u,
        v,
        alpha,
        verdict,
    }
}

/// Runs the confirmation protocol with each role drawing its own randomness.
pub fn zk_run<R1, R2>(
    package: &ConfirmationPackage,
    receiver: &KeyPair,
    verifier_rng: &mut R1,
    prover_rng: &mut R2,
    params: &GroupParams,
) -> ZkTranscript
where
    R1: RngCore + CryptoRng,
    R2: RngCore + CryptoRng,
{
    let verifier = ConfirmationVerifier::sample(params, package, &receiver.y, verifier_rng);
    let alpha = random_below_p(params, prover_rng);
    let mut prover = ConfirmationProver::new(params, &receiver.x, &package.u_s, alpha);
    run_moves(&verifier, &mut prover)
}
