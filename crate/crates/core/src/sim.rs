//! Deterministic in-process simulation of a full signing session.
//!
//! Every role (dealer, members, combiner, receiver, third party and at most
//! one adversary) is a logical process. Messages travel through a scheduler
//! that delivers each round's traffic in an order drawn from the seed, and
//! every delivery is logged with a digest of its payload. The same
//! [`SimConfig`] always yields a byte-identical [`SimTranscript`].
//!
//! Each role draws from its own rng, derived from the seed and the role's
//! label, so adding traffic for one role never perturbs another's draws.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::combiner::{Combiner, GroupSignature};
use crate::dealer::{dealer_setup, DealerPublicBoard, DealerSecrets};
use crate::error::{Error, Result};
use crate::fixture::{self, WorkedExample};
use crate::group::{
    generate_params, hash_to_zq, random_below_p, random_scalar, to_hex, GroupParams, HashMode,
    KeyPair, CHALLENGE_TAG,
};
use crate::receiver::{
    build_confirmation_package, compute_e, recover_commitment, verify_group_signature,
    ConfirmationPackage, ConfirmationProver, ConfirmationVerifier, ThirdParty, ZkVerdict,
};
use crate::records::Record;
use crate::shamir::{check_member_ids, LagrangeWeights, MemberId};
use crate::signing::{
    aggregate_commitments, modify_shadow, partial_sign, recover_share, CommitmentTriple,
    NonceSecret, PartialSignature, RecoveredShare, SessionAggregates, SignerContext,
};

/// Hex digits kept from each payload's SHA-256.
pub const DIGEST_HEX_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamsSource {
    /// The seven-member worked example, with all of its fixed inputs.
    Worked,
    Fixed(GroupParams),
    Generated {
        q_bits: u64,
        p_bits: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Honest,
    /// An outsider takes a member's place without knowing its share.
    Impersonate,
    /// A partial signature is altered in transit to the combiner.
    TamperPartial,
    /// An outsider submits a group signature built from public values only.
    ForgeSignature,
    /// A threshold of members pool their opened shares.
    ColludeReconstruct,
    /// Someone other than the designated receiver tries to verify.
    WrongReceiver,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Honest,
        Scenario::Impersonate,
        Scenario::TamperPartial,
        Scenario::ForgeSignature,
        Scenario::ColludeReconstruct,
        Scenario::WrongReceiver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Honest => "honest",
            Scenario::Impersonate => "impersonate",
            Scenario::TamperPartial => "tamper_partial",
            Scenario::ForgeSignature => "forge_signature",
            Scenario::ColludeReconstruct => "collude_reconstruct",
            Scenario::WrongReceiver => "wrong_receiver",
        }
    }

    pub fn is_adversarial(self) -> bool {
        self != Scenario::Honest
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub params: ParamsSource,
    pub t: usize,
    pub n: usize,
    /// Signing subset. `None` draws `t` members from the seed.
    pub subset: Option<Vec<MemberId>>,
    pub message: Vec<u8>,
    pub seed: u64,
    pub scenario: Scenario,
    /// Victim of `impersonate` and `tamper_partial`. Defaults to the second
    /// signer (the first when the subset is a singleton).
    pub target: Option<MemberId>,
    /// Combiner recomputes the challenge from privately received `B_i`.
    pub dc_recompute: bool,
}

impl SimConfig {
    /// The worked example: members 1..=7, signers {2,4,5,6,7}, fixed
    /// nonces, hash fixture and injected Lagrange weights.
    pub fn worked(scenario: Scenario, seed: u64) -> Self {
        SimConfig {
            params: ParamsSource::Worked,
            t: fixture::THRESHOLD,
            n: fixture::MEMBER_SECRETS.len(),
            subset: Some(fixture::SIGNERS.iter().map(|&u| member(u)).collect()),
            message: fixture::MESSAGE.to_vec(),
            seed,
            scenario,
            target: None,
            dc_recompute: true,
        }
    }

    /// `(47, 23, 25)` with the real hash, 3-of-5.
    pub fn toy(scenario: Scenario, seed: u64) -> Self {
        SimConfig {
            params: ParamsSource::Fixed(GroupParams::from_u64(47, 23, 25, HashMode::real())),
            t: 3,
            n: 5,
            subset: None,
            message: b"toy session".to_vec(),
            seed,
            scenario,
            target: None,
            dc_recompute: true,
        }
    }

    /// Fresh parameters drawn from the seed.
    pub fn generated(
        q_bits: u64,
        p_bits: u64,
        t: usize,
        n: usize,
        scenario: Scenario,
        seed: u64,
    ) -> Self {
        SimConfig {
            params: ParamsSource::Generated { q_bits, p_bits },
            t,
            n,
            subset: None,
            message: b"generated session".to_vec(),
            seed,
            scenario,
            target: None,
            dc_recompute: true,
        }
    }
}

fn member(u: u64) -> MemberId {
    MemberId::new(u).expect("nonzero literal id")
}

/// A logical process in the session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Dealer,
    /// Any group member, signing or not.
    Member(MemberId),
    Combiner,
    Receiver,
    ThirdParty,
    Adversary,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Dealer => f.write_str("SDC"),
            Role::Member(uid) => write!(f, "S{uid}"),
            Role::Combiner => f.write_str("DC"),
            Role::Receiver => f.write_str("R"),
            Role::ThirdParty => f.write_str("C"),
            Role::Adversary => f.write_str("ADV"),
        }
    }
}

/// Where a message goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    /// Readable by every role.
    Broadcast,
    /// Confidential channel to one member.
    Private(MemberId),
    /// Point-to-point to a non-member role.
    Direct(Role),
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::Broadcast => f.write_str("BROADCAST"),
            Route::Private(uid) => write!(f, "PRIVATE({uid})"),
            Route::Direct(role) => role.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    MemberKey,
    ReceiverKey,
    Board,
    MaskedShare,
    CommitA,
    CommitB,
    CommitC,
    Partial,
    Signature,
    Package,
    ZkW,
    ZkResponse,
    ZkOpen,
    ZkAlpha,
    PooledShare,
}

impl MessageKind {
    pub fn name(self) -> &'static str {
        match self {
            MessageKind::MemberKey => "member-key",
            MessageKind::ReceiverKey => "receiver-key",
            MessageKind::Board => "board",
            MessageKind::MaskedShare => "masked-share",
            MessageKind::CommitA => "commit-a",
            MessageKind::CommitB => "commit-b",
            MessageKind::CommitC => "commit-c",
            MessageKind::Partial => "partial",
            MessageKind::Signature => "signature",
            MessageKind::Package => "package",
            MessageKind::ZkW => "zk-w",
            MessageKind::ZkResponse => "zk-response",
            MessageKind::ZkOpen => "zk-open",
            MessageKind::ZkAlpha => "zk-alpha",
            MessageKind::PooledShare => "pooled-share",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Payload {
    MemberKey(MemberId, BigUint),
    ReceiverKey(BigUint),
    Board(Box<DealerPublicBoard>),
    MaskedShare { v: BigUint, w: BigUint },
    CommitA(MemberId, BigUint),
    CommitB(MemberId, BigUint),
    CommitC(MemberId, BigUint),
    Partial(PartialSignature),
    Signature(GroupSignature),
    Package(ConfirmationPackage),
    ZkW(BigUint),
    ZkResponse { beta: BigUint, gamma: BigUint },
    ZkOpen { u: BigUint, v: BigUint },
    ZkAlpha(BigUint),
    PooledShare(MemberId, BigUint),
}

impl Payload {
    fn kind(&self) -> MessageKind {
        match self {
            Payload::MemberKey(..) => MessageKind::MemberKey,
            Payload::ReceiverKey(_) => MessageKind::ReceiverKey,
            Payload::Board(_) => MessageKind::Board,
            Payload::MaskedShare { .. } => MessageKind::MaskedShare,
            Payload::CommitA(..) => MessageKind::CommitA,
            Payload::CommitB(..) => MessageKind::CommitB,
            Payload::CommitC(..) => MessageKind::CommitC,
            Payload::Partial(_) => MessageKind::Partial,
            Payload::Signature(_) => MessageKind::Signature,
            Payload::Package(_) => MessageKind::Package,
            Payload::ZkW(_) => MessageKind::ZkW,
            Payload::ZkResponse { .. } => MessageKind::ZkResponse,
            Payload::ZkOpen { .. } => MessageKind::ZkOpen,
            Payload::ZkAlpha(_) => MessageKind::ZkAlpha,
            Payload::PooledShare(..) => MessageKind::PooledShare,
        }
    }

    fn canonical(&self) -> String {
        let hexes =
            |vals: &[&BigUint]| vals.iter().map(|v| to_hex(v)).collect::<Vec<_>>().join(",");
        match self {
            Payload::MemberKey(uid, y) => format!("{uid}:{}", to_hex(y)),
            Payload::ReceiverKey(y) | Payload::ZkW(y) | Payload::ZkAlpha(y) => to_hex(y),
            Payload::Board(board) => board.to_text(),
            Payload::MaskedShare { v, w } => hexes(&[v, w]),
            Payload::CommitA(uid, x) | Payload::CommitB(uid, x) | Payload::CommitC(uid, x) => {
                format!("{uid}:{}", to_hex(x))
            }
            Payload::PooledShare(uid, x) => format!("{uid}:{}", to_hex(x)),
            Payload::Partial(ps) => ps.to_text(),
            Payload::Signature(sig) => sig.to_text(),
            Payload::Package(pkg) => pkg.to_text(),
            Payload::ZkResponse { beta, gamma } => hexes(&[beta, gamma]),
            Payload::ZkOpen { u, v } => hexes(&[u, v]),
        }
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind().name().as_bytes());
        h.update([0u8]);
        h.update(self.canonical().as_bytes());
        let mut out = hex::encode(h.finalize());
        out.truncate(DIGEST_HEX_LEN);
        out
    }
}

#[derive(Clone, Debug)]
struct Envelope {
    from: Role,
    to: Route,
    payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub step: usize,
    pub from: Role,
    pub to: Route,
    pub kind: MessageKind,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject(String),
}

impl Outcome {
    pub fn is_accept(&self) -> bool {
        *self == Outcome::Accept
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accept => f.write_str("accept"),
            Outcome::Reject(reason) => write!(f, "reject | {reason}"),
        }
    }
}

/// Result of one session. Public values observed along the way are kept in
/// `values`; `checks` holds the linkage invariants the observer verified with
/// access to every role's state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTranscript {
    pub scenario: Scenario,
    pub signers: Vec<MemberId>,
    pub dc_recompute: bool,
    pub entries: Vec<TranscriptEntry>,
    pub values: Vec<(String, BigUint)>,
    pub checks: Vec<(String, bool)>,
    pub outcome: Outcome,
}

impl SimTranscript {
    pub fn value(&self, name: &str) -> Option<&BigUint> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, ok)| *ok)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    /// `step N | from | to | kind | digest` lines, then values and checks,
    /// then the outcome.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "step {} | {} | {} | {} | {}\n",
                e.step, e.from, e.to, e.kind, e.digest
            ));
        }
        for (name, v) in &self.values {
            out.push_str(&format!("value | {name} | {}\n", to_hex(v)));
        }
        for (name, ok) in &self.checks {
            out.push_str(&format!(
                "check | {name} | {}\n",
                if *ok { "ok" } else { "FAIL" }
            ));
        }
        out.push_str(&format!("outcome | {}\n", self.outcome));
        out
    }
}

/// Collects a round's sends and delivers them in a seed-shuffled order.
struct Network {
    rng: ChaCha20Rng,
    outbox: Vec<Envelope>,
    bulletin: Vec<Envelope>,
    inboxes: BTreeMap<Role, Vec<Envelope>>,
    entries: Vec<TranscriptEntry>,
}

impl Network {
    fn new(rng: ChaCha20Rng) -> Self {
        Network {
            rng,
            outbox: Vec::new(),
            bulletin: Vec::new(),
            inboxes: BTreeMap::new(),
            entries: Vec::new(),
        }
    }

    fn send(&mut self, from: Role, to: Route, payload: Payload) {
        self.outbox.push(Envelope { from, to, payload });
    }

    fn deliver(&mut self) {
        let mut batch = std::mem::take(&mut self.outbox);
        batch.shuffle(&mut self.rng);
        for env in batch {
            self.entries.push(TranscriptEntry {
                step: self.entries.len() + 1,
                from: env.from,
                to: env.to,
                kind: env.payload.kind(),
                digest: env.payload.digest(),
            });
            match env.to {
                Route::Broadcast => self.bulletin.push(env),
                Route::Private(uid) => self.inboxes.entry(Role::Member(uid)).or_default().push(env),
                Route::Direct(role) => self.inboxes.entry(role).or_default().push(env),
            }
        }
    }

    fn inbox(&self, role: Role) -> impl Iterator<Item = &Payload> {
        self.inboxes
            .get(&role)
            .into_iter()
            .flatten()
            .map(|e| &e.payload)
    }

    fn board(&self) -> impl Iterator<Item = &Payload> {
        self.bulletin.iter().map(|e| &e.payload)
    }
}

/// Independent rng for one role, derived from the seed and a label.
pub fn role_rng(seed: u64, label: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"dtms-sim\0");
    h.update(seed.to_be_bytes());
    h.update([0u8]);
    h.update(label.as_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Fixed inputs that replace random draws in worked-example mode.
struct Fixed {
    example: WorkedExample,
}

struct Setup {
    params: GroupParams,
    subset: Vec<MemberId>,
    target: MemberId,
    keys: BTreeMap<MemberId, KeyPair>,
    receiver: KeyPair,
    weights: LagrangeWeights,
    fixed: Option<Fixed>,
}

fn prepare(config: &SimConfig) -> Result<Setup> {
    let (params, fixed) = match &config.params {
        ParamsSource::Worked => {
            let example = WorkedExample::new();
            (example.params.clone(), Some(Fixed { example }))
        }
        ParamsSource::Fixed(p) => (p.clone(), None),
        ParamsSource::Generated { q_bits, p_bits } => {
            let mut rng = role_rng(config.seed, "params");
            (
                generate_params(*q_bits, *p_bits, &mut rng)?.with_hash(HashMode::real()),
                None,
            )
        }
    };
    if config.t == 0 || config.t > config.n {
        return Err(Error::InvalidThreshold {
            t: config.t,
            n: config.n,
        });
    }

    let ids: Vec<MemberId> = (1..=config.n as u64).map(member).collect();
    check_member_ids(&ids, &params.q)?;

    let subset = match &config.subset {
        Some(s) => {
            let mut s = s.clone();
            s.sort();
            s
        }
        None => {
            let mut rng = role_rng(config.seed, "subset");
            let mut s: Vec<MemberId> = ids.choose_multiple(&mut rng, config.t).copied().collect();
            s.sort();
            s
        }
    };
    check_member_ids(&subset, &params.q)?;
    if let Some(bad) = subset.iter().find(|id| !ids.contains(id)) {
        return Err(Error::UnknownMember(*bad));
    }
    if subset.len() < config.t {
        return Err(Error::SubsetTooSmall {
            have: subset.len(),
            need: config.t,
        });
    }
    let target = match config.target {
        Some(t) if subset.contains(&t) => t,
        Some(t) => return Err(Error::NotInSubset(t)),
        None => subset[subset.len().min(2) - 1],
    };

    let (keys, receiver, weights) = match &fixed {
        Some(f) => {
            if config.t != fixture::THRESHOLD
                || config.n != fixture::MEMBER_SECRETS.len()
                || subset != f.example.signers()
            {
                return Err(Error::Config(
                    "the worked example fixes t = 5, n = 7 and signers 2,4,5,6,7".into(),
                ));
            }
            (
                f.example.member_keys().into_iter().collect(),
                f.example.receiver(),
                f.example.weights(),
            )
        }
        None => {
            let mut rng = role_rng(config.seed, "member-keys");
            let keys = ids
                .iter()
                .map(|&id| (id, KeyPair::generate(&params, &mut rng)))
                .collect();
            let receiver = KeyPair::generate(&params, &mut role_rng(config.seed, "receiver"));
            (keys, receiver, LagrangeWeights::Computed)
        }
    };
    Ok(Setup {
        params,
        subset,
        target,
        keys,
        receiver,
        weights,
        fixed,
    })
}

/// Honest member state across the signing rounds.
struct SignerState {
    uid: MemberId,
    share: RecoveredShare,
    nonce: Option<NonceSecret>,
    triple: CommitmentTriple,
    context: Option<SignerContext>,
}

/// Runs one session to completion.
pub fn run_session(config: &SimConfig) -> Result<SimTranscript> {
    let setup = prepare(config)?;
    Session::new(config, setup).run()
}

/// True iff re-running `config` reproduces `transcript` byte for byte.
pub fn replay(transcript: &SimTranscript, config: &SimConfig) -> bool {
    match run_session(config) {
        Ok(again) => again.export() == transcript.export(),
        Err(_) => false,
    }
}

struct Session<'a> {
    config: &'a SimConfig,
    s: Setup,
    net: Network,
    values: Vec<(String, BigUint)>,
    checks: Vec<(String, bool)>,
}

enum Flow<T> {
    Continue(T),
    Stop(Outcome),
}

macro_rules! proceed {
    ($e:expr) => {
        match $e {
            Flow::Continue(v) => v,
            Flow::Stop(outcome) => return Ok(outcome),
        }
    };
}

impl<'a> Session<'a> {
    fn new(config: &'a SimConfig, s: Setup) -> Self {
        Session {
            config,
            net: Network::new(role_rng(config.seed, "scheduler")),
            s,
            values: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn rng(&self, label: &str) -> ChaCha20Rng {
        role_rng(self.config.seed, label)
    }

    fn value(&mut self, name: &str, v: &BigUint) {
        self.values.push((name.to_string(), v.clone()));
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    fn run(mut self) -> Result<SimTranscript> {
        let outcome = self.play()?;
        Ok(SimTranscript {
            scenario: self.config.scenario,
            signers: self.s.subset.clone(),
            dc_recompute: self.config.dc_recompute,
            entries: self.net.entries,
            values: self.values,
            checks: self.checks,
            outcome,
        })
    }

    fn play(&mut self) -> Result<Outcome> {
        let (board, secrets) = self.distribute()?;
        match self.config.scenario {
            Scenario::ForgeSignature => return self.forge(&board),
            Scenario::ColludeReconstruct => return self.collude(&board, &secrets),
            _ => {}
        }

        let impostor = self.config.scenario == Scenario::Impersonate;
        let mut signers = Vec::new();
        for &uid in &self.s.subset.clone() {
            if impostor && uid == self.s.target {
                continue;
            }
            signers.push(self.open_share(uid, &board)?);
        }
        let forged = if impostor {
            Some(self.impostor_share(&board)?)
        } else {
            None
        };

        self.commit_round(&mut signers, forged.as_ref());
        let aggregates = proceed!(self.aggregate_round(&mut signers, forged.as_ref())?);
        self.sign_round(signers, forged, &aggregates)?;

        let sig = proceed!(self.combine_round(&board, &aggregates)?);
        self.value("S_S", &sig.s_s);
        self.value("U_S", &sig.u_s);
        self.value("W_S", &sig.w_s);

        if self.config.scenario == Scenario::WrongReceiver {
            return self.wrong_receiver(&board, &sig);
        }
        self.verify_and_confirm(&board, &secrets, &sig, &aggregates)
    }

    fn distribute(&mut self) -> Result<(DealerPublicBoard, DealerSecrets)> {
        for (&uid, kp) in &self.s.keys {
            self.net.send(
                Role::Member(uid),
                Route::Direct(Role::Dealer),
                Payload::MemberKey(uid, kp.y.clone()),
            );
        }
        self.net.send(
            Role::Receiver,
            Route::Broadcast,
            Payload::ReceiverKey(self.s.receiver.y.clone()),
        );
        self.net.deliver();

        let mut directory: Vec<(MemberId, BigUint)> = self
            .net
            .inbox(Role::Dealer)
            .filter_map(|p| match p {
                Payload::MemberKey(uid, y) => Some((*uid, y.clone())),
                _ => None,
            })
            .collect();
        directory.sort();
        let (board, secrets) = match &self.s.fixed {
            Some(f) => f.example.dealer()?,
            None => dealer_setup(
                &self.s.params,
                self.config.t,
                &directory,
                &mut self.rng("dealer"),
            )?,
        };

        self.net.send(
            Role::Dealer,
            Route::Broadcast,
            Payload::Board(Box::new(board.clone())),
        );
        for rec in &board.members {
            self.net.send(
                Role::Dealer,
                Route::Private(rec.uid),
                Payload::MaskedShare {
                    v: rec.v.clone(),
                    w: board.w.clone(),
                },
            );
        }
        self.net.deliver();
        self.value("y_S", &board.group_public_key);
        Ok((board, secrets))
    }

    fn receiver_key(&self) -> Result<BigUint> {
        self.net
            .board()
            .find_map(|p| match p {
                Payload::ReceiverKey(y) => Some(y.clone()),
                _ => None,
            })
            .ok_or_else(|| Error::Invariant("receiver key was never broadcast".into()))
    }

    fn open_share(&mut self, uid: MemberId, board: &DealerPublicBoard) -> Result<SignerState> {
        let (v, w) = self
            .net
            .inbox(Role::Member(uid))
            .find_map(|p| match p {
                Payload::MaskedShare { v, w } => Some((v.clone(), w.clone())),
                _ => None,
            })
            .ok_or(Error::MissingCommitment(uid))?;
        let mut record = board.member(uid)?.clone();
        record.v = v;
        let key = &self.s.keys[&uid];
        let share = recover_share(&record, &w, &key.x, &self.s.params)?;

        let nonce = match &self.s.fixed {
            Some(f) => f
                .example
                .signer_nonce(uid)
                .ok_or_else(|| Error::Config(format!("no fixed nonce for member {uid}")))?,
            None => NonceSecret::generate(&self.s.params, &mut self.rng(&format!("signer/{uid}"))),
        };
        let triple = nonce.commit(&self.s.params, &self.receiver_key()?);
        Ok(SignerState {
            uid,
            share,
            nonce: Some(nonce),
            triple,
            context: None,
        })
    }

    /// The impostor opens the victim's public `v_i` with its own key, which
    /// yields an unrelated value in place of `l_i`.
    fn impostor_share(&mut self, board: &DealerPublicBoard) -> Result<SignerState> {
        let params = &self.s.params;
        let uid = self.s.target;
        let mut rng = self.rng("adversary");
        let own = KeyPair::generate(params, &mut rng);
        let record = board.member(uid)?;
        let guess = params.mul(&record.v, &params.pow(&board.w, &own.x)) % &params.q;
        let guess = if guess.is_zero() {
            BigUint::one()
        } else {
            guess
        };
        let nonce = NonceSecret::generate(params, &mut rng);
        let triple = nonce.commit(params, &self.receiver_key()?);
        Ok(SignerState {
            uid,
            share: RecoveredShare { uid, value: guess },
            nonce: Some(nonce),
            triple,
            context: None,
        })
    }

    fn commit_round(&mut self, signers: &mut [SignerState], forged: Option<&SignerState>) {
        let subset = self.s.subset.clone();
        let honest = signers.iter().map(|s| (Role::Member(s.uid), s));
        let all: Vec<(Role, &SignerState)> =
            honest.chain(forged.map(|s| (Role::Adversary, s))).collect();
        for (from, st) in all {
            let t = &st.triple;
            self.net.send(
                from,
                Route::Broadcast,
                Payload::CommitA(st.uid, t.a.clone()),
            );
            self.net.send(
                from,
                Route::Broadcast,
                Payload::CommitC(st.uid, t.c.clone()),
            );
            for &peer in subset.iter().filter(|&&p| p != st.uid) {
                self.net.send(
                    from,
                    Route::Private(peer),
                    Payload::CommitB(st.uid, t.b.clone()),
                );
            }
            if self.config.dc_recompute {
                self.net.send(
                    from,
                    Route::Direct(Role::Combiner),
                    Payload::CommitB(st.uid, t.b.clone()),
                );
            }
        }
        self.net.deliver();
    }

    fn broadcast_commitments(&self, uid: MemberId) -> (Option<BigUint>, Option<BigUint>) {
        let mut a = None;
        let mut c = None;
        for p in self.net.board() {
            match p {
                Payload::CommitA(id, x) if *id == uid => a = Some(x.clone()),
                Payload::CommitC(id, x) if *id == uid => c = Some(x.clone()),
                _ => {}
            }
        }
        (a, c)
    }

    /// Triples as seen by `reader`: `A`, `C` from the broadcast, `B` from its
    /// private inbox (its own `B` from `own`).
    fn collect_triples(
        &self,
        reader: Role,
        own: Option<&SignerState>,
    ) -> Result<Vec<(MemberId, CommitmentTriple)>> {
        let mut out = Vec::new();
        for &uid in &self.s.subset {
            let (a, c) = self.broadcast_commitments(uid);
            let b = match own {
                Some(st) if st.uid == uid => Some(st.triple.b.clone()),
                _ => self.net.inbox(reader).find_map(|p| match p {
                    Payload::CommitB(id, b) if *id == uid => Some(b.clone()),
                    _ => None,
                }),
            };
            match (a, b, c) {
                (Some(a), Some(b), Some(c)) => out.push((uid, CommitmentTriple { a, b, c })),
                _ => return Err(Error::MissingCommitment(uid)),
            }
        }
        Ok(out)
    }

    fn aggregate_round(
        &mut self,
        signers: &mut [SignerState],
        forged: Option<&SignerState>,
    ) -> Result<Flow<SessionAggregates>> {
        let params = self.s.params.clone();
        let mut views = Vec::new();
        for st in signers.iter() {
            let triples = self.collect_triples(Role::Member(st.uid), Some(st))?;
            views.push(aggregate_commitments(
                &triples,
                self.config.t,
                &self.config.message,
                &params,
            )?);
        }
        if let Some(st) = forged {
            // The impostor reads the victim's private inbox.
            let triples = self.collect_triples(Role::Member(st.uid), Some(st))?;
            views.push(aggregate_commitments(
                &triples,
                self.config.t,
                &self.config.message,
                &params,
            )?);
        }
        let agg = views[0].clone();
        if views.iter().any(|v| *v != agg) {
            return Ok(Flow::Stop(Outcome::Reject(
                "signers disagree on the session aggregates".into(),
            )));
        }
        self.value("V_S", &agg.v_s);
        self.value("R_S", &agg.challenge);
        for st in signers.iter_mut() {
            st.context = Some(modify_shadow(
                &st.share,
                &agg.signers,
                &self.s.weights,
                &params,
            )?);
        }
        Ok(Flow::Continue(agg))
    }

    fn sign_round(
        &mut self,
        signers: Vec<SignerState>,
        forged: Option<SignerState>,
        agg: &SessionAggregates,
    ) -> Result<()> {
        let params = self.s.params.clone();
        let tamper = self.config.scenario == Scenario::TamperPartial;
        let mut shadows = Vec::new();
        for mut st in signers {
            let ctx = st.context.take().expect("context set during aggregation");
            let nonce = st.nonce.take().expect("nonce used once");
            shadows.push(ctx.modified_shadow.clone());
            let ps = partial_sign(&params, nonce, &ctx, &agg.challenge)?;
            let to = if tamper && st.uid == self.s.target {
                Role::Adversary
            } else {
                Role::Combiner
            };
            self.net.send(
                Role::Member(st.uid),
                Route::Direct(to),
                Payload::Partial(ps),
            );
        }
        if let Some(mut st) = forged {
            let ctx = modify_shadow(&st.share, &agg.signers, &self.s.weights, &params)?;
            let ps = partial_sign(
                &params,
                st.nonce.take().expect("fresh nonce"),
                &ctx,
                &agg.challenge,
            )?;
            self.net.send(
                Role::Adversary,
                Route::Direct(Role::Combiner),
                Payload::Partial(ps),
            );
        }
        self.net.deliver();

        if tamper {
            let intercepted = self.net.inbox(Role::Adversary).find_map(|p| match p {
                Payload::Partial(ps) => Some(ps.clone()),
                _ => None,
            });
            let mut ps = intercepted.ok_or(Error::MissingCommitment(self.s.target))?;
            ps.s = params.scalar_add(&ps.s, &BigUint::one());
            self.net.send(
                Role::Adversary,
                Route::Direct(Role::Combiner),
                Payload::Partial(ps),
            );
            self.net.deliver();
        }

        if self.config.scenario == Scenario::Honest {
            let sum = shadows
                .iter()
                .fold(BigUint::zero(), |acc, ms| params.scalar_add(&acc, ms));
            self.value("sum_MS", &sum);
        }
        Ok(())
    }

    fn combine_round(
        &mut self,
        board: &DealerPublicBoard,
        agg: &SessionAggregates,
    ) -> Result<Flow<GroupSignature>> {
        let params = self.s.params.clone();
        let partials: Vec<PartialSignature> = self
            .net
            .inbox(Role::Combiner)
            .filter_map(|p| match p {
                Payload::Partial(ps) => Some(ps.clone()),
                _ => None,
            })
            .collect();
        let mut commitments = Vec::new();
        for &uid in &self.s.subset {
            let (a, c) = self.broadcast_commitments(uid);
            match (a, c) {
                (Some(a), Some(c)) => commitments.push((a, c)),
                _ => return Err(Error::MissingCommitment(uid)),
            }
        }
        let u_s = params.product(commitments.iter().map(|(a, _)| a));
        let w_s = params.product(commitments.iter().map(|(_, c)| c));

        let (v_s, challenge) = if self.config.dc_recompute {
            let triples = self.collect_triples(Role::Combiner, None)?;
            for ps in &partials {
                let sent = triples
                    .iter()
                    .find(|(id, _)| *id == ps.uid)
                    .map(|(_, t)| &t.b);
                if sent != Some(&ps.b) {
                    return Ok(Flow::Stop(Outcome::Reject(format!(
                        "combiner: B in partial from member {} differs from its commitment",
                        ps.uid
                    ))));
                }
            }
            let v_s = params.product(triples.iter().map(|(_, t)| &t.b));
            let challenge = hash_to_zq(CHALLENGE_TAG, &[&v_s], &self.config.message, &params)?;
            (v_s, challenge)
        } else {
            let v_s = params.product(partials.iter().map(|p| &p.b));
            let challenge = partials
                .first()
                .map(|p| p.challenge.clone())
                .unwrap_or_default();
            (v_s, challenge)
        };
        let view = SessionAggregates {
            u_s,
            v_s,
            w_s,
            challenge,
            signers: self.s.subset.clone(),
        };
        if view.u_s != agg.u_s || view.w_s != agg.w_s {
            return Err(Error::Invariant(
                "combiner and signers see different broadcasts".into(),
            ));
        }

        let dc = Combiner::new(params, board.clone())
            .with_weights(self.s.weights.clone())
            .recompute_challenge(self.config.dc_recompute);
        match dc.combine(&partials, &view, &self.config.message) {
            Ok(sig) => {
                self.net.send(
                    Role::Combiner,
                    Route::Direct(Role::Receiver),
                    Payload::Signature(sig.clone()),
                );
                if self.config.scenario == Scenario::WrongReceiver {
                    self.net.send(
                        Role::Combiner,
                        Route::Direct(Role::Adversary),
                        Payload::Signature(sig.clone()),
                    );
                }
                self.net.deliver();
                Ok(Flow::Continue(sig))
            }
            Err(Error::PartialRejected(ids)) => {
                let ids: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
                Ok(Flow::Stop(Outcome::Reject(format!(
                    "combiner rejected partial from member {}",
                    ids.join(", ")
                ))))
            }
            Err(e) => Ok(Flow::Stop(Outcome::Reject(format!("combiner: {e}")))),
        }
    }

    fn verify_and_confirm(
        &mut self,
        board: &DealerPublicBoard,
        secrets: &DealerSecrets,
        sig: &GroupSignature,
        agg: &SessionAggregates,
    ) -> Result<Outcome> {
        let params = self.s.params.clone();
        let weights = self.s.weights.clone();
        let receiver = self.s.receiver.clone();

        let e = compute_e(&sig.signers, board, &weights, &params)?;
        let r_r = recover_commitment(&sig.w_s, &sig.u_s, &receiver.x, &params);
        self.value("E", &e);
        self.value("R_R", &r_r);
        if self.config.scenario == Scenario::Honest {
            self.linkage_checks(board, secrets, &e, &r_r, agg)?;
        }

        if !verify_group_signature(sig, board, &receiver, &weights, &params) {
            return Ok(Outcome::Reject(
                "receiver: group signature does not verify".into(),
            ));
        }
        let package = build_confirmation_package(sig, board, &receiver, &weights, &params)?;
        self.value("mu", &package.mu);
        self.net.send(
            Role::Receiver,
            Route::Direct(Role::ThirdParty),
            Payload::Package(package.clone()),
        );
        self.net.deliver();

        let third = ThirdParty::new(params.clone(), board.group_public_key.clone())
            .recompute_e_from(board.clone(), sig.signers.clone(), weights);
        let congruence = third.check(&package);

        let verdict = self.confirmation(&package)?;
        self.check("third-party congruence", congruence);
        self.check("confirmation protocol", verdict.is_accept());
        if !congruence {
            return Ok(Outcome::Reject(
                "third party: package congruence fails".into(),
            ));
        }
        if let ZkVerdict::Reject(check) = verdict {
            return Ok(Outcome::Reject(format!(
                "confirmation protocol failed the {check} check"
            )));
        }
        if !self.checks.iter().all(|(_, ok)| *ok) {
            return Ok(Outcome::Reject("a linkage invariant failed".into()));
        }
        Ok(Outcome::Accept)
    }

    /// Observer-side invariants that need several roles' private state.
    fn linkage_checks(
        &mut self,
        board: &DealerPublicBoard,
        secrets: &DealerSecrets,
        e: &BigUint,
        r_r: &BigUint,
        agg: &SessionAggregates,
    ) -> Result<()> {
        let params = self.s.params.clone();
        self.check("R_R = V_S", *r_r == agg.v_s);

        let sum_ms = self
            .values
            .iter()
            .find(|(k, _)| k == "sum_MS")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Invariant("modified shadows were not recorded".into()))?;
        let e_y = params.mul(e, &board.group_public_key);
        self.check("g^sum_MS = E*y_S", params.pow_g(&sum_ms) == e_y);

        let (expected, mask) =
            masked_reconstruction(&agg.signers, secrets, &self.s.weights, &params)?;
        self.check("sum_MS = f(0) + sum K_i*lambda_i", sum_ms == expected);
        self.check(
            "sum_MS differs from f(0) when the mask is nonzero",
            mask.is_zero() || sum_ms != *secrets.group_secret(),
        );
        Ok(())
    }

    fn confirmation(&mut self, package: &ConfirmationPackage) -> Result<ZkVerdict> {
        let params = self.s.params.clone();
        let receiver = self.s.receiver.clone();
        let (verifier, alpha) = match &self.s.fixed {
            Some(f) => {
                let r = f.example.zk_randomness();
                (
                    ConfirmationVerifier::new(&params, package, &receiver.y, r.u, r.v),
                    r.alpha,
                )
            }
            None => {
                let verifier = ConfirmationVerifier::sample(
                    &params,
                    package,
                    &receiver.y,
                    &mut self.rng("third-party"),
                );
                let alpha = random_below_p(&params, &mut self.rng("receiver-zk"));
                (verifier, alpha)
            }
        };
        let mut prover = ConfirmationProver::new(&params, &receiver.x, &package.u_s, alpha);

        let w = verifier.challenge();
        self.net.send(
            Role::ThirdParty,
            Route::Direct(Role::Receiver),
            Payload::ZkW(w.clone()),
        );
        self.net.deliver();
        let (beta, gamma) = prover.respond(&w);
        self.net.send(
            Role::Receiver,
            Route::Direct(Role::ThirdParty),
            Payload::ZkResponse {
                beta: beta.clone(),
                gamma: gamma.clone(),
            },
        );
        self.net.deliver();
        let (u, v) = verifier.open();
        self.net.send(
            Role::ThirdParty,
            Route::Direct(Role::Receiver),
            Payload::ZkOpen {
                u: u.clone(),
                v: v.clone(),
            },
        );
        self.net.deliver();
        let alpha = match prover.reveal(&u, &v) {
            Ok(alpha) => alpha,
            Err(check) => return Ok(ZkVerdict::Reject(check)),
        };
        self.net.send(
            Role::Receiver,
            Route::Direct(Role::ThirdParty),
            Payload::ZkAlpha(alpha.clone()),
        );
        self.net.deliver();
        Ok(verifier.finish(&beta, &gamma, &alpha))
    }

    fn wrong_receiver(
        &mut self,
        board: &DealerPublicBoard,
        sig: &GroupSignature,
    ) -> Result<Outcome> {
        let params = &self.s.params;
        let mut rng = self.rng("adversary");
        let outsider = loop {
            let kp = KeyPair::generate(params, &mut rng);
            if kp.x != self.s.receiver.x {
                break kp;
            }
        };
        let designated =
            verify_group_signature(sig, board, &self.s.receiver, &self.s.weights, params);
        let outsider_ok = verify_group_signature(sig, board, &outsider, &self.s.weights, params);
        self.check("designated receiver accepts", designated);
        Ok(if outsider_ok {
            Outcome::Accept
        } else {
            Outcome::Reject("verification under a non-designated key fails".into())
        })
    }

    fn forge(&mut self, board: &DealerPublicBoard) -> Result<Outcome> {
        let params = self.s.params.clone();
        let sig = random_forgery(
            &params,
            &self.s.subset,
            &self.config.message,
            &mut self.rng("adversary"),
        );
        self.net.send(
            Role::Adversary,
            Route::Direct(Role::Receiver),
            Payload::Signature(sig.clone()),
        );
        self.net.deliver();
        self.value("S_S", &sig.s_s);
        self.value("U_S", &sig.u_s);
        self.value("W_S", &sig.w_s);
        if verify_group_signature(&sig, board, &self.s.receiver, &self.s.weights, &params) {
            Ok(Outcome::Accept)
        } else {
            Ok(Outcome::Reject(
                "receiver: forged signature fails the congruence".into(),
            ))
        }
    }

    fn collude(&mut self, board: &DealerPublicBoard, secrets: &DealerSecrets) -> Result<Outcome> {
        let params = self.s.params.clone();
        for &uid in &self.s.subset.clone() {
            let st = self.open_share(uid, board)?;
            self.net.send(
                Role::Member(uid),
                Route::Direct(Role::Adversary),
                Payload::PooledShare(uid, st.share.value),
            );
        }
        self.net.deliver();

        let pooled: Vec<(MemberId, BigUint)> = self
            .net
            .inbox(Role::Adversary)
            .filter_map(|p| match p {
                Payload::PooledShare(uid, l) => Some((*uid, l.clone())),
                _ => None,
            })
            .collect();
        let mut reconstruction = BigUint::zero();
        for (uid, l) in &pooled {
            let lambda = self
                .s
                .weights
                .coefficient(*uid, &self.s.subset, &params.q)?;
            reconstruction = params.scalar_add(&reconstruction, &params.scalar_mul(l, &lambda));
        }
        self.value("reconstruction", &reconstruction);

        let e = compute_e(&self.s.subset, board, &self.s.weights, &params)?;
        self.value("E", &e);
        let linked = params.pow_g(&reconstruction) == params.mul(&e, &board.group_public_key);
        let (expected, _) =
            masked_reconstruction(&self.s.subset, secrets, &self.s.weights, &params)?;
        self.check("g^reconstruction = E*y_S", linked);
        self.check(
            "reconstruction = f(0) + sum K_i*lambda_i",
            reconstruction == expected,
        );
        if !linked || reconstruction != expected {
            return Err(Error::Invariant(
                "pooled reconstruction is not f(0) + sum K_i*lambda_i".into(),
            ));
        }
        Ok(if reconstruction == *secrets.group_secret() {
            Outcome::Accept
        } else {
            Outcome::Reject("pooled shares yield f(0) + sum K_i*lambda_i, not f(0)".into())
        })
    }
}

/// `(f(0) + Σ K_i λ_i, Σ K_i λ_i)` from the dealer's retained secrets.
///
/// `f(0)` is the dealer's own share total `Σ f(u_i) λ_i`, which equals the
/// polynomial's constant term whenever the shares lie on the polynomial.
fn masked_reconstruction(
    subset: &[MemberId],
    secrets: &DealerSecrets,
    weights: &LagrangeWeights,
    params: &GroupParams,
) -> Result<(BigUint, BigUint)> {
    let mut mask = BigUint::zero();
    let mut base = BigUint::zero();
    for &uid in subset {
        let lambda = weights.coefficient(uid, subset, &params.q)?;
        let k = secrets.nonces.get(&uid).ok_or(Error::UnknownMember(uid))?;
        let f = secrets.shares.get(&uid).ok_or(Error::UnknownMember(uid))?;
        mask = params.scalar_add(&mask, &params.scalar_mul(k, &lambda));
        base = params.scalar_add(&base, &params.scalar_mul(f, &lambda));
    }
    Ok((params.scalar_add(&base, &mask), mask))
}

/// A signature from public values only: `U_S`, `W_S` uniform in the subgroup
/// and `S_S` uniform in `Z_q`. The receiver's `R_R` is then uniform too.
pub fn random_forgery<R: RngCore + CryptoRng>(
    params: &GroupParams,
    signers: &[MemberId],
    message: &[u8],
    rng: &mut R,
) -> GroupSignature {
    let u_s = params.pow_g(&random_scalar(params, rng));
    let w_s = params.pow_g(&random_scalar(params, rng));
    let s_s = random_scalar(params, rng);
    let mut signers = signers.to_vec();
    signers.sort();
    GroupSignature {
        s_s,
        u_s,
        w_s,
        message: message.to_vec(),
        signers,
    }
}

/// Counts how many of `trials` random forgeries the receiver accepts.
#[allow(clippy::too_many_arguments)]
pub fn forge_attempts<R: RngCore + CryptoRng>(
    params: &GroupParams,
    board: &DealerPublicBoard,
    receiver: &KeyPair,
    signers: &[MemberId],
    weights: &LagrangeWeights,
    message: &[u8],
    trials: usize,
    rng: &mut R,
) -> usize {
    (0..trials)
        .filter(|_| {
            let sig = random_forgery(params, signers, message, rng);
            verify_group_signature(&sig, board, receiver, weights, params)
        })
        .count()
}

/// Checks where commitments travelled: `A_i` and `C_i` only on the
/// broadcast, `B_i` only privately between subset members or directly to the
/// combiner when it recomputes the challenge.
pub fn check_channel_discipline(transcript: &SimTranscript) -> std::result::Result<(), String> {
    let in_subset = |uid: &MemberId| transcript.signers.contains(uid);
    for e in &transcript.entries {
        let ok = match e.kind {
            MessageKind::CommitA | MessageKind::CommitC => e.to == Route::Broadcast,
            MessageKind::CommitB => match e.to {
                Route::Private(uid) => {
                    in_subset(&uid)
                        && match e.from {
                            Role::Member(from) => in_subset(&from) && from != uid,
                            Role::Adversary => true,
                            _ => false,
                        }
                }
                Route::Direct(Role::Combiner) => transcript.dc_recompute,
                _ => false,
            },
            MessageKind::MaskedShare => matches!(e.to, Route::Private(_)),
            _ => true,
        };
        if !ok {
            return Err(format!(
                "step {}: {} from {} to {}",
                e.step, e.kind, e.from, e.to
            ));
        }
    }
    Ok(())
}
