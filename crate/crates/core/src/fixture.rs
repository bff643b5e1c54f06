//! The seven-member toy worked example (`p = 47`, `q = 23`, `g = 25`).
//!
//! The example fixes every random choice and posits the challenge value
//! instead of hashing, so everything here is deterministic. Member identities
//! `u_i` are not given; the example instead states each member's share
//! value `f(u_i)` and each signer's modified shadow `MS_i`. The Lagrange
//! weights used for replay are derived from those as `λ_i = MS_i · l_i^{-1}`.

use num_bigint::BigUint;

use crate::dealer::{dealer_setup_fixture, DealerFixture, DealerPublicBoard, DealerSecrets};
use crate::error::Result;
use crate::group::{mod_inv, GroupParams, HashMode, KeyPair, CHALLENGE_TAG};
use crate::receiver::ZkRandomness;
use crate::shamir::{LagrangeWeights, MemberId};
use crate::signing::NonceSecret;

pub const P: u64 = 47;
pub const Q: u64 = 23;
pub const G: u64 = 25;
pub const THRESHOLD: usize = 5;
pub const CHALLENGE: u64 = 9;

pub const COEFFICIENTS: [u64; 5] = [13, 0, 0, 0, 18];
pub const MASKING_KEY: u64 = 14;
pub const MEMBER_SECRETS: [u64; 7] = [13, 18, 19, 20, 17, 22, 15];
pub const MEMBER_NONCES: [u64; 7] = [8, 22, 10, 17, 14, 16, 21];
pub const SHARE_VALUES: [u64; 7] = [2, 21, 16, 3, 14, 14, 22];

pub const SIGNERS: [u64; 5] = [2, 4, 5, 6, 7];
/// `(K_{i_1}, K_{i_2})` per signer.
pub const SIGNER_NONCES: [(u64, u64); 5] = [(18, 17), (17, 19), (14, 13), (19, 21), (16, 18)];
/// Stated modified shadows, signer order.
pub const MODIFIED_SHADOWS: [u64; 5] = [10, 16, 6, 5, 5];

pub const RECEIVER_SECRET: u64 = 9;
pub const ZK_U: u64 = 9;
pub const ZK_V: u64 = 11;
pub const ZK_ALPHA: u64 = 37;

pub const MESSAGE: &[u8] = b"m";

/// Published intermediate values, for comparison tables and tests.
pub mod expected {
    pub const GROUP_PUBLIC_KEY: u64 = 16;
    pub const W: u64 = 2;
    pub const MEMBER_PUBLIC_KEYS: [u64; 7] = [16, 4, 6, 9, 34, 32, 36];
    pub const MASKED_SHARES: [u64; 7] = [10, 20, 3, 20, 5, 7, 20];
    pub const M: [u64; 7] = [3, 9, 21, 9, 12, 27, 9];
    pub const N: [u64; 7] = [17, 32, 3, 34, 24, 7, 37];
    pub const V: [u64; 7] = [41, 29, 1, 19, 38, 14, 44];
    pub const RECEIVER_PUBLIC_KEY: u64 = 2;
    /// `(u_i, v_i, w_i)` commitments, signer order.
    pub const COMMITMENTS: [(u64, u64, u64); 5] =
        [(18, 4, 3), (8, 34, 8), (3, 24, 7), (14, 6, 25), (12, 7, 34)];
    pub const U_S: u64 = 8;
    pub const V_S: u64 = 36;
    pub const W_S: u64 = 14;
    pub const LAMBDAS: [u64; 5] = [12, 10, 15, 4, 6];
    pub const PARTIALS: [u64; 5] = [16, 0, 22, 18, 15];
    pub const S_S: u64 = 2;
    pub const E: u64 = 18;
    pub const R_R: u64 = 36;
    pub const MU: u64 = 16;
    pub const ZK_W: u64 = 25;
    pub const ZK_BETA: u64 = 36;
    pub const ZK_GAMMA: u64 = 9;
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn uid(v: u64) -> MemberId {
    MemberId::new(v).expect("fixture ids are nonzero")
}

/// Handle bundling the example's parameters and fixed choices.
#[derive(Clone, Debug)]
pub struct WorkedExample {
    pub params: GroupParams,
}

impl Default for WorkedExample {
    fn default() -> Self {
        Self::new()
    }
}

impl WorkedExample {
    pub fn new() -> Self {
        WorkedExample {
            params: GroupParams::from_u64(P, Q, G, HashMode::fixture([(CHALLENGE_TAG, CHALLENGE)])),
        }
    }

    /// Members are labelled 1..=7 in table order.
    pub fn member_ids(&self) -> Vec<MemberId> {
        (1..=MEMBER_SECRETS.len() as u64).map(uid).collect()
    }

    pub fn member_keys(&self) -> Vec<(MemberId, KeyPair)> {
        self.member_ids()
            .into_iter()
            .zip(MEMBER_SECRETS)
            .map(|(id, x)| {
                (
                    id,
                    KeyPair::from_secret(&self.params, big(x)).expect("fixture key in range"),
                )
            })
            .collect()
    }

    pub fn member_key(&self, id: MemberId) -> Option<KeyPair> {
        self.member_keys()
            .into_iter()
            .find(|(m, _)| *m == id)
            .map(|(_, kp)| kp)
    }

    pub fn dealer_fixture(&self) -> DealerFixture {
        DealerFixture {
            coefficients: COEFFICIENTS.iter().map(|&c| big(c)).collect(),
            masking_key: big(MASKING_KEY),
            nonces: MEMBER_NONCES.iter().map(|&k| big(k)).collect(),
            share_values: Some(SHARE_VALUES.iter().map(|&f| big(f)).collect()),
        }
    }

    pub fn dealer(&self) -> Result<(DealerPublicBoard, DealerSecrets)> {
        let members: Vec<_> = self
            .member_keys()
            .into_iter()
            .map(|(id, kp)| (id, kp.y))
            .collect();
        dealer_setup_fixture(&self.params, THRESHOLD, &members, &self.dealer_fixture())
    }

    pub fn signers(&self) -> Vec<MemberId> {
        SIGNERS.iter().map(|&u| uid(u)).collect()
    }

    pub fn signer_nonce(&self, id: MemberId) -> Option<NonceSecret> {
        let pos = SIGNERS.iter().position(|&u| u == id.get())?;
        let (k1, k2) = SIGNER_NONCES[pos];
        NonceSecret::from_values(&self.params, big(k1), big(k2)).ok()
    }

    pub fn receiver(&self) -> KeyPair {
        KeyPair::from_secret(&self.params, big(RECEIVER_SECRET)).expect("fixture key in range")
    }

    /// `λ_i = MS_i · l_i^{-1} mod q` from the stated shadows and the masked
    /// shares in the dealer table.
    pub fn derived_lambdas(&self) -> Vec<(MemberId, BigUint)> {
        let q = &self.params.q;
        SIGNERS
            .iter()
            .zip(MODIFIED_SHADOWS)
            .map(|(&u, ms)| {
                let l = expected::MASKED_SHARES[(u - 1) as usize];
                let inv = mod_inv(&big(l), q).expect("masked shares are nonzero");
                (uid(u), big(ms) * inv % q)
            })
            .collect()
    }

    pub fn weights(&self) -> LagrangeWeights {
        LagrangeWeights::Fixed(self.derived_lambdas().into_iter().collect())
    }

    pub fn zk_randomness(&self) -> ZkRandomness {
        ZkRandomness {
            u: big(ZK_U),
            v: big(ZK_V),
            alpha: big(ZK_ALPHA),
        }
    }

    pub fn message(&self) -> Vec<u8> {
        MESSAGE.to_vec()
    }
}
