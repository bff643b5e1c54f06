//! Line-oriented file format shared by the library and the CLI.
//!
//! ```text
//! %DTMS v1 sig
//! ss = 2
//! us = 8
//! ws = e
//! signers = 2,4,5,6,7
//! msg = 6d
//! ```
//!
//! Integers are canonical lowercase hex without leading zeros, lists are
//! comma-separated, messages are hex-encoded bytes. Keys are unique within a
//! record and emitted in a fixed order per record type.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::combiner::GroupSignature;
use crate::dealer::{DealerPublicBoard, MemberRecord};
use crate::group::{from_hex, to_hex, GroupParams, HashMode, KeyPair};
use crate::receiver::{ConfirmationPackage, ZkCheck, ZkTranscript, ZkVerdict};
use crate::shamir::MemberId;
use crate::signing::{PartialSignature, SessionAggregates};

pub const HEADER_PREFIX: &str = "%DTMS v1 ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("missing or malformed header (expected \"%DTMS v1 <type>\")")]
    BadHeader,
    #[error("unknown record type {0:?}")]
    UnknownKind(String),
    #[error("expected a {expected} record, found {found}")]
    WrongKind {
        expected: RecordKind,
        found: RecordKind,
    },
    #[error("line {0}: expected \"key = value\"")]
    MalformedLine(usize),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("missing field {0:?}")]
    MissingField(String),
    #[error("unexpected field {0:?}")]
    UnexpectedField(String),
    #[error("field {key:?} has invalid value {value:?}")]
    BadValue { key: String, value: String },
}

pub type RecordResult<T> = std::result::Result<T, RecordError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Params,
    Keypair,
    Members,
    Board,
    Partial,
    Session,
    Sig,
    Package,
    Transcript,
}

impl RecordKind {
    pub const ALL: [RecordKind; 9] = [
        RecordKind::Params,
        RecordKind::Keypair,
        RecordKind::Members,
        RecordKind::Board,
        RecordKind::Partial,
        RecordKind::Session,
        RecordKind::Sig,
        RecordKind::Package,
        RecordKind::Transcript,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Params => "params",
            RecordKind::Keypair => "keypair",
            RecordKind::Members => "members",
            RecordKind::Board => "board",
            RecordKind::Partial => "partial",
            RecordKind::Session => "session",
            RecordKind::Sig => "sig",
            RecordKind::Package => "package",
            RecordKind::Transcript => "transcript",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordKind {
    type Err = RecordError;

    fn from_str(s: &str) -> RecordResult<Self> {
        RecordKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| RecordError::UnknownKind(s.to_string()))
    }
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'.')
}

/// A parsed record: type plus ordered `key = value` fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileRecord {
    pub kind: RecordKind,
    fields: Vec<(String, String)>,
}

impl FileRecord {
    pub fn new(kind: RecordKind) -> Self {
        FileRecord {
            kind,
            fields: Vec::new(),
        }
    }

    /// Appends a field. Panics on a duplicate or malformed key, which is a
    /// programming error on the emitting side.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        let key = key.into();
        assert!(valid_key(&key), "invalid record key {key:?}");
        assert!(self.get(&key).is_none(), "duplicate record key {key:?}");
        self.fields.push((key, value.into()));
        self
    }

    pub fn push_int(&mut self, key: &str, value: &BigUint) -> &mut Self {
        self.push(key, to_hex(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn require(&self, key: &str) -> RecordResult<&str> {
        self.get(key)
            .ok_or_else(|| RecordError::MissingField(key.to_string()))
    }

    pub fn int(&self, key: &str) -> RecordResult<BigUint> {
        let raw = self.require(key)?;
        from_hex(raw).ok_or_else(|| bad(key, raw))
    }

    pub fn member_id(&self, key: &str) -> RecordResult<MemberId> {
        let raw = self.require(key)?;
        parse_member_id(raw).ok_or_else(|| bad(key, raw))
    }

    pub fn bytes(&self, key: &str) -> RecordResult<Vec<u8>> {
        let raw = self.require(key)?;
        decode_bytes(raw).ok_or_else(|| bad(key, raw))
    }

    pub fn int_list(&self, key: &str) -> RecordResult<Vec<BigUint>> {
        let raw = self.require(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| from_hex(s).ok_or_else(|| bad(key, raw)))
            .collect()
    }

    pub fn member_list(&self, key: &str) -> RecordResult<Vec<MemberId>> {
        let raw = self.require(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| parse_member_id(s).ok_or_else(|| bad(key, raw)))
            .collect()
    }

    /// Fails on any field outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> RecordResult<()> {
        match self
            .fields
            .iter()
            .find(|(k, _)| !allowed.contains(&k.as_str()))
        {
            Some((k, _)) => Err(RecordError::UnexpectedField(k.clone())),
            None => Ok(()),
        }
    }

    pub fn expect_kind(&self, kind: RecordKind) -> RecordResult<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(RecordError::WrongKind {
                expected: kind,
                found: self.kind,
            })
        }
    }

    pub fn emit(&self) -> String {
        let mut out = format!("{HEADER_PREFIX}{}\n", self.kind);
        for (k, v) in &self.fields {
            if v.is_empty() {
                out.push_str(&format!("{k} =\n"));
            } else {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    pub fn parse(text: &str) -> RecordResult<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(RecordError::BadHeader)?;
        let kind = header
            .strip_prefix(HEADER_PREFIX)
            .ok_or(RecordError::BadHeader)?
            .trim()
            .parse::<RecordKind>()?;
        let mut record = FileRecord::new(kind);
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(RecordError::MalformedLine(idx + 2))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(RecordError::MalformedLine(idx + 2));
            }
            if record.get(k).is_some() {
                return Err(RecordError::DuplicateKey(k.to_string()));
            }
            record.fields.push((k.to_string(), v.to_string()));
        }
        Ok(record)
    }
}

fn bad(key: &str, value: &str) -> RecordError {
    RecordError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

fn parse_member_id(s: &str) -> Option<MemberId> {
    let v = from_hex(s)?;
    MemberId::new(u64::try_from(&v).ok()?).ok()
}

fn member_hex(id: MemberId) -> String {
    format!("{:x}", id.get())
}

fn join_members(ids: &[MemberId]) -> String {
    ids.iter()
        .map(|&id| member_hex(id))
        .collect::<Vec<_>>()
        .join(",")
}

fn join_ints<'a, I: IntoIterator<Item = &'a BigUint>>(vals: I) -> String {
    vals.into_iter().map(to_hex).collect::<Vec<_>>().join(",")
}

/// Lowercase hex of raw bytes.
pub fn encode_bytes(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

pub fn decode_bytes(s: &str) -> Option<Vec<u8>> {
    if s.bytes().any(|b| b.is_ascii_uppercase()) {
        return None;
    }
    hex::decode(s).ok()
}

/// Types with a `%DTMS v1` record representation.
pub trait Record: Sized {
    const KIND: RecordKind;

    fn to_record(&self) -> FileRecord;

    fn from_fields(record: &FileRecord) -> RecordResult<Self>;

    fn from_record(record: &FileRecord) -> RecordResult<Self> {
        record.expect_kind(Self::KIND)?;
        Self::from_fields(record)
    }

    fn to_text(&self) -> String {
        self.to_record().emit()
    }

    fn from_text(text: &str) -> RecordResult<Self> {
        Self::from_record(&FileRecord::parse(text)?)
    }
}

impl Record for GroupParams {
    const KIND: RecordKind = RecordKind::Params;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        r.push_int("p", &self.p)
            .push_int("q", &self.q)
            .push_int("g", &self.g);
        match &self.hash {
            HashMode::Real { domain } => {
                r.push("hash", "sha256");
                r.push("domain", encode_bytes(domain.as_bytes()));
            }
            HashMode::Fixture(table) => {
                r.push("hash", "fixture");
                for (tag, v) in table {
                    r.push_int(&format!("fixture.{tag}"), v);
                }
            }
        }
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        let hash = match r.require("hash")? {
            "sha256" => {
                r.only(&["p", "q", "g", "hash", "domain"])?;
                let raw = r.bytes("domain")?;
                let domain = String::from_utf8(raw)
                    .map_err(|_| bad("domain", r.get("domain").unwrap_or("")))?;
                HashMode::Real { domain }
            }
            "fixture" => {
                let mut table = std::collections::BTreeMap::new();
                for (k, _) in r.fields() {
                    match k.strip_prefix("fixture.") {
                        Some(tag) => {
                            table.insert(tag.to_string(), r.int(k)?);
                        }
                        None if ["p", "q", "g", "hash"].contains(&k.as_str()) => {}
                        None => return Err(RecordError::UnexpectedField(k.clone())),
                    }
                }
                HashMode::Fixture(table)
            }
            other => return Err(bad("hash", other)),
        };
        Ok(GroupParams::new(
            r.int("p")?,
            r.int("q")?,
            r.int("g")?,
            hash,
        ))
    }
}

/// A key pair, optionally tagged with the member id it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberKey {
    pub uid: Option<MemberId>,
    pub keypair: KeyPair,
}

impl Record for MemberKey {
    const KIND: RecordKind = RecordKind::Keypair;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        if let Some(uid) = self.uid {
            r.push("uid", member_hex(uid));
        }
        r.push_int("x", &self.keypair.x)
            .push_int("y", &self.keypair.y);
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        r.only(&["uid", "x", "y"])?;
        let uid = match r.get("uid") {
            Some(_) => Some(r.member_id("uid")?),
            None => None,
        };
        Ok(MemberKey {
            uid,
            keypair: KeyPair {
                x: r.int("x")?,
                y: r.int("y")?,
            },
        })
    }
}

/// Public directory of member ids and keys, the dealer's input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberDirectory(pub Vec<(MemberId, BigUint)>);

impl Record for MemberDirectory {
    const KIND: RecordKind = RecordKind::Members;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        r.push("n", format!("{:x}", self.0.len()));
        for (k, (uid, y)) in self.0.iter().enumerate() {
            r.push(
                format!("member{}", k + 1),
                format!("{},{}", member_hex(*uid), to_hex(y)),
            );
        }
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        let n = count_field(r, "n")?;
        let mut allowed = vec!["n".to_string()];
        let mut members = Vec::with_capacity(n);
        for k in 1..=n {
            let key = format!("member{k}");
            let (uid, rest) = split_member(r, &key, 1)?;
            members.push((uid, rest[0].clone()));
            allowed.push(key);
        }
        r.only(&allowed.iter().map(String::as_str).collect::<Vec<_>>())?;
        Ok(MemberDirectory(members))
    }
}

fn count_field(r: &FileRecord, key: &str) -> RecordResult<usize> {
    let v = r.int(key)?;
    usize::try_from(&v).map_err(|_| bad(key, r.get(key).unwrap_or("")))
}

/// Splits `uid,a,b,...` into the id and exactly `count` integers.
fn split_member(r: &FileRecord, key: &str, count: usize) -> RecordResult<(MemberId, Vec<BigUint>)> {
    let raw = r.require(key)?;
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != count + 1 {
        return Err(bad(key, raw));
    }
    let uid = parse_member_id(parts[0]).ok_or_else(|| bad(key, raw))?;
    let vals = parts[1..]
        .iter()
        .map(|s| from_hex(s).ok_or_else(|| bad(key, raw)))
        .collect::<RecordResult<Vec<_>>>()?;
    Ok((uid, vals))
}

impl Record for DealerPublicBoard {
    const KIND: RecordKind = RecordKind::Board;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        r.push_int("y_s", &self.group_public_key)
            .push_int("w", &self.w)
            .push("t", format!("{:x}", self.threshold))
            .push("n", format!("{:x}", self.members.len()));
        for (k, m) in self.members.iter().enumerate() {
            r.push(
                format!("member{}", k + 1),
                format!(
                    "{},{}",
                    member_hex(m.uid),
                    join_ints([&m.public_key, &m.m, &m.n, &m.v])
                ),
            );
        }
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        let n = count_field(r, "n")?;
        let threshold = count_field(r, "t")?;
        let mut allowed: Vec<String> = ["y_s", "w", "t", "n"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut members = Vec::with_capacity(n);
        for k in 1..=n {
            let key = format!("member{k}");
            let (uid, vals) = split_member(r, &key, 4)?;
            let mut vals = vals.into_iter();
            members.push(MemberRecord {
                uid,
                public_key: vals.next().unwrap_or_default(),
                m: vals.next().unwrap_or_default(),
                n: vals.next().unwrap_or_default(),
                v: vals.next().unwrap_or_default(),
            });
            allowed.push(key);
        }
        r.only(&allowed.iter().map(String::as_str).collect::<Vec<_>>())?;
        Ok(DealerPublicBoard {
            group_public_key: r.int("y_s")?,
            w: r.int("w")?,
            threshold,
            members,
        })
    }
}

impl Record for PartialSignature {
    const KIND: RecordKind = RecordKind::Partial;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        r.push("uid", member_hex(self.uid))
            .push_int("s", &self.s)
            .push_int("b", &self.b)
            .push_int("rs", &self.challenge);
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        r.only(&["uid", "s", "b", "rs"])?;
        Ok(PartialSignature {
            uid: r.member_id("uid")?,
            s: r.int("s")?,
            b: r.int("b")?,
            challenge: r.int("rs")?,
        })
    }
}

/// Session aggregates plus the message they were computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionRecord {
    pub aggregates: SessionAggregates,
    pub message: Vec<u8>,
}

impl Record for SessionRecord {
    const KIND: RecordKind = RecordKind::Session;

    fn to_record(&self) -> FileRecord {
        let a = &self.aggregates;
        let mut r = FileRecord::new(Self::KIND);
        r.push_int("us", &a.u_s)
            .push_int("vs", &a.v_s)
            .push_int("ws", &a.w_s)
            .push_int("rs", &a.challenge)
            .push("signers", join_members(&a.signers))
            .push("msg", encode_bytes(&self.message));
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        r.only(&["us", "vs", "ws", "rs", "signers", "msg"])?;
        Ok(SessionRecord {
            aggregates: SessionAggregates {
                u_s: r.int("us")?,
                v_s: r.int("vs")?,
                w_s: r.int("ws")?,
                challenge: r.int("rs")?,
                signers: r.member_list("signers")?,
            },
            message: r.bytes("msg")?,
        })
    }
}

impl Record for GroupSignature {
    const KIND: RecordKind = RecordKind::Sig;

    fn to_record(&self) -> FileRecord {
        let mut signers = self.signers.clone();
        signers.sort();
        let mut r = FileRecord::new(Self::KIND);
        r.push_int("ss", &self.s_s)
            .push_int("us", &self.u_s)
            .push_int("ws", &self.w_s)
            .push("signers", join_members(&signers))
            .push("msg", encode_bytes(&self.message));
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        r.only(&["ss", "us", "ws", "signers", "msg"])?;
        Ok(GroupSignature {
            s_s: r.int("ss")?,
            u_s: r.int("us")?,
            w_s: r.int("ws")?,
            signers: r.member_list("signers")?,
            message: r.bytes("msg")?,
        })
    }
}

impl Record for ConfirmationPackage {
    const KIND: RecordKind = RecordKind::Package;

    fn to_record(&self) -> FileRecord {
        let mut r = FileRecord::new(Self::KIND);
        r.push_int("rr", &self.r_r)
            .push_int("e", &self.e)
            .push_int("ss", &self.s_s)
            .push_int("us", &self.u_s)
            .push("msg", encode_bytes(&self.message))
            .push_int("mu", &self.mu);
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        r.only(&["rr", "e", "ss", "us", "msg", "mu"])?;
        Ok(ConfirmationPackage {
            r_r: r.int("rr")?,
            e: r.int("e")?,
            s_s: r.int("ss")?,
            u_s: r.int("us")?,
            message: r.bytes("msg")?,
            mu: r.int("mu")?,
        })
    }
}

fn verdict_str(v: ZkVerdict) -> String {
    match v {
        ZkVerdict::Accept => "accept".to_string(),
        ZkVerdict::Reject(check) => format!("reject:{check}"),
    }
}

fn parse_verdict(s: &str) -> Option<ZkVerdict> {
    match s {
        "accept" => Some(ZkVerdict::Accept),
        "reject:opening" => Some(ZkVerdict::Reject(ZkCheck::Opening)),
        "reject:beta" => Some(ZkVerdict::Reject(ZkCheck::Beta)),
        "reject:gamma" => Some(ZkVerdict::Reject(ZkCheck::Gamma)),
        _ => None,
    }
}

/// Confirmation transcript: moves in protocol order as `role,field,value`,
/// then the verdict.
impl Record for ZkTranscript {
    const KIND: RecordKind = RecordKind::Transcript;

    fn to_record(&self) -> FileRecord {
        let mut moves: Vec<(&str, &str, &BigUint)> = vec![
            ("c", "w", &self.w),
            ("r", "beta", &self.beta),
            ("r", "gamma", &self.gamma),
            ("c", "u", &self.u),
            ("c", "v", &self.v),
        ];
        if let Some(alpha) = &self.alpha {
            moves.push(("r", "alpha", alpha));
        }
        let mut r = FileRecord::new(Self::KIND);
        for (k, (role, field, value)) in moves.into_iter().enumerate() {
            r.push(
                format!("move{}", k + 1),
                format!("{role},{field},{}", to_hex(value)),
            );
        }
        r.push("verdict", verdict_str(self.verdict));
        r
    }

    fn from_fields(r: &FileRecord) -> RecordResult<Self> {
        const EXPECTED: [(&str, &str); 6] = [
            ("c", "w"),
            ("r", "beta"),
            ("r", "gamma"),
            ("c", "u"),
            ("c", "v"),
            ("r", "alpha"),
        ];
        let mut values = Vec::new();
        let mut allowed = vec!["verdict".to_string()];
        for (k, (role, field)) in EXPECTED.iter().enumerate() {
            let key = format!("move{}", k + 1);
            let Some(raw) = r.get(&key) else {
                if k == 5 {
                    break;
                }
                return Err(RecordError::MissingField(key));
            };
            let parts: Vec<&str> = raw.split(',').collect();
            if parts.len() != 3 || parts[0] != *role || parts[1] != *field {
                return Err(bad(&key, raw));
            }
            values.push(from_hex(parts[2]).ok_or_else(|| bad(&key, raw))?);
            allowed.push(key);
        }
        r.only(&allowed.iter().map(String::as_str).collect::<Vec<_>>())?;
        let raw = r.require("verdict")?;
        let verdict = parse_verdict(raw).ok_or_else(|| bad("verdict", raw))?;
        let alpha = values.get(5).cloned();
        let mut it = values.into_iter();
        let mut next = || it.next().unwrap_or_default();
        Ok(ZkTranscript {
            w: next(),
            beta: next(),
            gamma: next(),
            u: next(),
            v: next(),
            alpha,
            verdict,
        })
    }
}
