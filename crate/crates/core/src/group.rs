//! Arithmetic in the order-`q` subgroup of `Z_p*`.
//!
//! Every protocol value is either a scalar (an exponent, reduced mod `q`) or a
//! group element (a residue in `[1, p-1]`). Both are plain [`BigUint`]s; the
//! functions here keep the two worlds apart by always naming the modulus.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Call tag used for the signing challenge `R_S`.
pub const CHALLENGE_TAG: &str = "challenge";

/// Domain tag used by real-mode hashing unless the caller picks another.
pub const DEFAULT_DOMAIN: &str = "dtms-v1";

/// Attempt bound used by [`generate_params`].
pub const DEFAULT_GENERATION_ATTEMPTS: usize = 100_000;

const R_TRIES_PER_Q: usize = 256;

/// How the scheme's hash function `h` is realised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HashMode {
    /// SHA-256 over a framed encoding of the inputs, reduced mod `q`.
    Real { domain: String },
    /// Table lookup keyed by call tag. Used to replay worked examples that
    /// posit a challenge value instead of computing one.
    Fixture(BTreeMap<String, BigUint>),
}

impl HashMode {
    pub fn real() -> Self {
        HashMode::Real {
            domain: DEFAULT_DOMAIN.to_string(),
        }
    }

    pub fn fixture<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        HashMode::Fixture(
            entries
                .into_iter()
                .map(|(k, v)| (k.into(), BigUint::from(v)))
                .collect(),
        )
    }
}

/// Public group description `(p, q, g)` plus the hash mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    pub p: BigUint,
    pub q: BigUint,
    pub g: BigUint,
    pub hash: HashMode,
}

/// One failed invariant reported by [`validate_params`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamViolation {
    PNotPrime,
    QNotPrime,
    QDoesNotDivide,
    GeneratorOutOfRange,
    GeneratorIsIdentity,
    GeneratorOrder,
    NotStandardSize,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParamViolation::PNotPrime => "p prime",
            ParamViolation::QNotPrime => "q prime",
            ParamViolation::QDoesNotDivide => "q divides p−1",
            ParamViolation::GeneratorOutOfRange => "1 < g < p",
            ParamViolation::GeneratorIsIdentity => "g ≠ 1",
            ParamViolation::GeneratorOrder => "g^q ≡ 1 (mod p)",
            ParamViolation::NotStandardSize => "standard size (p 512-bit, q 160-bit)",
        };
        f.write_str(s)
    }
}

/// Result of [`validate_params`]: empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamReport {
    pub violations: Vec<ParamViolation>,
}

impl ParamReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, v: ParamViolation) -> bool {
        self.violations.contains(&v)
    }
}

impl fmt::Display for ParamReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "violated: {}", parts.join("; "))
    }
}

/// Size class of a parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeClass {
    Toy,
    /// `2^511 < p < 2^512` and `2^159 < q < 2^160`.
    Standard,
}

impl GroupParams {
    pub fn new(p: BigUint, q: BigUint, g: BigUint, hash: HashMode) -> Self {
        GroupParams { p, q, g, hash }
    }

    pub fn from_u64(p: u64, q: u64, g: u64, hash: HashMode) -> Self {
        GroupParams::new(p.into(), q.into(), g.into(), hash)
    }

    /// Constructs and validates in one go.
    pub fn checked(p: BigUint, q: BigUint, g: BigUint, hash: HashMode) -> Result<Self> {
        let params = GroupParams::new(p, q, g, hash);
        let report = validate_params(&params);
        if report.is_ok() {
            Ok(params)
        } else {
            Err(Error::InvalidParams(report.to_string()))
        }
    }

    pub fn with_hash(mut self, hash: HashMode) -> Self {
        self.hash = hash;
        self
    }

    pub fn size_class(&self) -> SizeClass {
        if self.p.bits() == 512 && self.q.bits() == 160 {
            SizeClass::Standard
        } else {
            SizeClass::Toy
        }
    }

    /// `base^e mod p` for a non-negative exponent.
    pub fn pow(&self, base: &BigUint, e: &BigUint) -> BigUint {
        base.modpow(e, &self.p)
    }

    /// `g^e mod p`.
    pub fn pow_g(&self, e: &BigUint) -> BigUint {
        self.g.modpow(e, &self.p)
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    pub fn product<'a, I>(&self, elems: I) -> BigUint
    where
        I: IntoIterator<Item = &'a BigUint>,
    {
        elems
            .into_iter()
            .fold(BigUint::one(), |acc, e| (acc * e) % &self.p)
    }

    pub fn scalar(&self, v: &BigUint) -> BigUint {
        v % &self.q
    }

    pub fn scalar_add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.q
    }

    pub fn scalar_mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.q
    }

    /// True for residues in `[1, p-1]`.
    pub fn is_element(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.p
    }

    /// True when `x` lies in the order-`q` subgroup generated by `g`.
    pub fn in_subgroup(&self, x: &BigUint) -> bool {
        self.is_element(x) && self.pow(x, &self.q).is_one()
    }

    pub fn check_element(&self, x: &BigUint, what: &str) -> Result<()> {
        if self.is_element(x) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!(
                "{what} = {x} not in [1, p-1]"
            )))
        }
    }

    pub fn check_scalar(&self, x: &BigUint, what: &str) -> Result<()> {
        if x.is_zero() || x >= &self.q {
            Err(Error::InvalidScalar(format!(
                "{what} = {x} not in [1, q-1]"
            )))
        } else {
            Ok(())
        }
    }
}

/// `base^exponent mod modulus`, with negative exponents taken through the
/// modular inverse of `base`.
pub fn mod_exp(base: &BigUint, exponent: &BigInt, modulus: &BigUint) -> Result<BigUint> {
    let magnitude = exponent.magnitude();
    match exponent.sign() {
        Sign::Minus => {
            let inv = mod_inv(base, modulus)?;
            Ok(inv.modpow(magnitude, modulus))
        }
        _ => Ok(base.modpow(magnitude, modulus)),
    }
}

/// Inverse of `a` modulo `modulus` via the extended Euclidean algorithm.
pub fn mod_inv(a: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    let m = BigInt::from(modulus.clone());
    let a = BigInt::from(a % modulus);
    if a.is_zero() {
        return Err(Error::NonInvertible);
    }
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return Err(Error::NonInvertible);
    }
    Ok(egcd.x.mod_floor(&m).magnitude().clone())
}

/// `g^{-e} mod p`.
pub fn pow_g_neg(params: &GroupParams, e: &BigUint) -> BigUint {
    // g has order q, so g^{-e} = g^{q - (e mod q)}.
    let e = e % &params.q;
    params.pow_g(&((&params.q - e) % &params.q))
}

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

const MILLER_RABIN_ROUNDS: usize = 32;

/// Miller–Rabin with the first twelve primes as fixed bases (deterministic
/// below 3.3·10^24) plus pseudo-random bases derived from `n` itself.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };

    for &b in SMALL_PRIMES.iter().take(12) {
        if witness(&BigUint::from(b)) {
            return false;
        }
    }

    let digest = Sha256::digest(n.to_bytes_be());
    let mut rng = ChaCha20Rng::from_seed(digest.into());
    for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        if witness(&a) {
            return false;
        }
    }
    true
}

/// Uniform integer with exactly `bits` bits.
fn random_exact_bits<R: RngCore>(bits: u64, rng: &mut R) -> BigUint {
    let low = BigUint::one() << (bits - 1);
    let high = BigUint::one() << bits;
    rng.gen_biguint_range(&low, &high)
}

/// Samples a Schnorr group: prime `q` of `q_bits` bits, prime `p = 2rq + 1` of
/// `p_bits` bits, and `g = k^((p-1)/q) mod p` for random `k` with `g > 1`.
pub fn generate_params<R: RngCore + CryptoRng>(
    q_bits: u64,
    p_bits: u64,
    rng: &mut R,
) -> Result<GroupParams> {
    generate_params_bounded(q_bits, p_bits, DEFAULT_GENERATION_ATTEMPTS, rng)
}

pub fn generate_params_bounded<R: RngCore + CryptoRng>(
    q_bits: u64,
    p_bits: u64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<GroupParams> {
    if q_bits < 4 || p_bits <= q_bits {
        return Err(Error::InvalidParams(format!(
            "need q_bits >= 4 and p_bits > q_bits (got {q_bits}, {p_bits})"
        )));
    }
    let exhausted = || Error::ParamGeneration {
        attempts: max_attempts,
    };
    let mut attempts = 0usize;
    let p_low = BigUint::one() << (p_bits - 1);
    let p_high = BigUint::one() << p_bits;

    'outer: loop {
        let q = loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(exhausted());
            }
            let c = random_exact_bits(q_bits, rng) | BigUint::one();
            if c.bits() == q_bits && is_probable_prime(&c) {
                break c;
            }
        };

        // p = 2rq + 1 must land in [2^(p_bits-1), 2^p_bits).
        let two_q = &q << 1;
        let r_low = (&p_low - 1u32).div_ceil(&two_q).max(BigUint::one());
        let r_high = (&p_high - 2u32) / &two_q;
        if r_low > r_high {
            continue 'outer;
        }

        // Small r ranges may hold no prime at all; move on to a fresh q.
        let mut p = None;
        for _ in 0..R_TRIES_PER_Q {
            attempts += 1;
            if attempts > max_attempts {
                return Err(exhausted());
            }
            let r = rng.gen_biguint_range(&r_low, &(&r_high + 1u32));
            let cand = &two_q * r + 1u32;
            if cand.bits() == p_bits && is_probable_prime(&cand) {
                p = Some(cand);
                break;
            }
        }
        let Some(p) = p else {
            continue 'outer;
        };

        let cofactor = (&p - 1u32) / &q;
        let two = BigUint::from(2u32);
        loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(exhausted());
            }
            let k = rng.gen_biguint_range(&two, &(&p - 1u32));
            let g = k.modpow(&cofactor, &p);
            if g > BigUint::one() {
                return Ok(GroupParams::new(p, q, g, HashMode::real()));
            }
        }
    }
}

/// Checks every structural invariant of `params` and reports each failure.
pub fn validate_params(params: &GroupParams) -> ParamReport {
    let mut violations = Vec::new();
    let GroupParams { p, q, g, .. } = params;

    if !is_probable_prime(p) {
        violations.push(ParamViolation::PNotPrime);
    }
    if !is_probable_prime(q) {
        violations.push(ParamViolation::QNotPrime);
    }
    if p.is_zero() || q.is_zero() || !((p - 1u32) % q).is_zero() {
        violations.push(ParamViolation::QDoesNotDivide);
    }
    if g.is_zero() || g >= p {
        violations.push(ParamViolation::GeneratorOutOfRange);
    } else if g.is_one() {
        violations.push(ParamViolation::GeneratorIsIdentity);
    } else if !g.modpow(q, p).is_one() {
        violations.push(ParamViolation::GeneratorOrder);
    }
    ParamReport { violations }
}

/// [`validate_params`] plus the 512/160-bit size requirement.
pub fn validate_standard_params(params: &GroupParams) -> ParamReport {
    let mut report = validate_params(params);
    if params.size_class() != SizeClass::Standard {
        report.violations.push(ParamViolation::NotStandardSize);
    }
    report
}

/// Uniform scalar in `[1, q-1]` by rejection sampling.
pub fn random_scalar<R: RngCore + CryptoRng>(params: &GroupParams, rng: &mut R) -> BigUint {
    let bits = params.q.bits();
    loop {
        let c = rng.gen_biguint(bits);
        if !c.is_zero() && c < params.q {
            return c;
        }
    }
}

/// Uniform integer in `[1, p-1]`; used where the confirmation protocol draws
/// its randomness from `Z_p`.
pub fn random_below_p<R: RngCore + CryptoRng>(params: &GroupParams, rng: &mut R) -> BigUint {
    rng.gen_biguint_range(&BigUint::one(), &params.p)
}

/// A private/public key pair `(x, y = g^x)`.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub x: BigUint,
    pub y: BigUint,
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("x", &"<redacted>")
            .field("y", &self.y)
            .finish()
    }
}

impl KeyPair {
    pub fn from_secret(params: &GroupParams, x: BigUint) -> Result<Self> {
        params.check_scalar(&x, "private key")?;
        let y = params.pow_g(&x);
        Ok(KeyPair { x, y })
    }

    pub fn generate<R: RngCore + CryptoRng>(params: &GroupParams, rng: &mut R) -> Self {
        let x = random_scalar(params, rng);
        let y = params.pow_g(&x);
        KeyPair { x, y }
    }

    pub fn is_consistent(&self, params: &GroupParams) -> bool {
        params.pow_g(&self.x) == self.y
    }
}

pub fn keypair_gen<R: RngCore + CryptoRng>(params: &GroupParams, rng: &mut R) -> KeyPair {
    KeyPair::generate(params, rng)
}

/// Canonical integer encoding: lowercase big-endian hex, no leading zeros.
pub fn to_hex(x: &BigUint) -> String {
    x.to_str_radix(16)
}

pub fn from_hex(s: &str) -> Option<BigUint> {
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
    {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 16)
}

/// The scheme's hash `h`, mapped into `Z_q`.
///
/// Real mode hashes `domain ‖ 0x00 ‖ call_tag ‖ 0x00 ‖ hex(e_1) ‖ 0x00 ‖ … ‖
/// hex(e_k) ‖ 0x00 ‖ message` with SHA-256 and reduces mod `q`. Fixture mode
/// returns the table entry for `call_tag` and ignores the inputs.
pub fn hash_to_zq(
    call_tag: &str,
    elements: &[&BigUint],
    message: &[u8],
    params: &GroupParams,
) -> Result<BigUint> {
    match &params.hash {
        HashMode::Fixture(table) => table
            .get(call_tag)
            .map(|v| v % &params.q)
            .ok_or_else(|| Error::FixtureMiss(call_tag.to_string())),
        HashMode::Real { domain } => {
            let mut h = Sha256::new();
            h.update(domain.as_bytes());
            h.update([0u8]);
            h.update(call_tag.as_bytes());
            h.update([0u8]);
            for e in elements {
                h.update(to_hex(e).as_bytes());
                h.update([0u8]);
            }
            h.update(message);
            Ok(BigUint::from_bytes_be(&h.finalize()) % &params.q)
        }
    }
}
