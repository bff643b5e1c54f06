//! `dtms`: command-line front end for directed threshold multi-signatures.
//!
//! Exit codes: 0 accept, 1 reject, 2 usage or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use dtms::combiner::Combiner;
use dtms::dealer::{check_board_against_secrets, dealer_setup};
use dtms::error::Error;
use dtms::fixture::{self, expected, WorkedExample};
use dtms::group::{
    from_hex, generate_params, to_hex, validate_params, validate_standard_params, GroupParams,
    HashMode, KeyPair, SizeClass, DEFAULT_DOMAIN,
};
use dtms::receiver::{
    build_confirmation_package, compute_e, recover_commitment, verify_group_signature, zk_run,
    zk_run_with, ThirdParty,
};
use dtms::records::{decode_bytes, MemberDirectory, MemberKey, Record, SessionRecord};
use dtms::shamir::{LagrangeWeights, MemberId};
use dtms::signing::{
    aggregate_commitments, modify_shadow, partial_sign, recover_share, NonceSecret,
};
use dtms::sim::{self, role_rng, Scenario, SimConfig};
use dtms::{DealerPublicBoard, GroupSignature, PartialSignature};

/// Name of the built-in worked example accepted by `--fixture`.
const PAPER_FIXTURE: &str = "paper5";

#[derive(Parser)]
#[command(
    name = "dtms",
    version,
    about = "Directed (t,n)-threshold multi-signatures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or fix group parameters (p, q, g).
    GenParams(GenParams),
    /// Generate a key pair in a parameter set.
    GenKeypair(GenKeypair),
    /// Collect member key files into the dealer's member directory.
    Members(Members),
    /// Run the share distribution center and write the public board.
    DealerSetup(DealerSetup),
    /// Produce partial signatures for a signing subset.
    Sign(Sign),
    /// Check partial signatures and combine them into a group signature.
    Combine(Combine),
    /// Verify a group signature as the designated receiver.
    Verify(Verify),
    /// Build a confirmation package and run the confirmation protocol.
    Confirm(Confirm),
    /// Replay the seven-member worked example and print a check table.
    DemoPaper,
    /// Run a simulated session, honest or under attack.
    Simulate(Simulate),
}

#[derive(Args)]
struct GenParams {
    #[arg(long)]
    q_bits: Option<u64>,
    #[arg(long)]
    p_bits: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed decimal triple `p,q,g`.
    #[arg(long, conflicts_with_all = ["q_bits", "p_bits", "seed"])]
    fixed: Option<String>,
    /// Worked-example parameters with the fixed challenge table.
    #[arg(long, conflicts_with_all = ["q_bits", "p_bits", "seed", "fixed"])]
    fixture: Option<String>,
    /// Domain tag for the SHA-256 challenge hash.
    #[arg(long, default_value = DEFAULT_DOMAIN)]
    domain: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenKeypair {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Member id (decimal) to tag the key with.
    #[arg(long)]
    uid: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Members {
    /// Key files carrying a member id; only the public half is copied.
    #[arg(long = "key", required = true)]
    keys: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DealerSetup {
    #[arg(long, required_unless_present = "fixture")]
    params: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    t: Option<usize>,
    #[arg(long, required_unless_present = "fixture")]
    members: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    seed: Option<u64>,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MessageArg {
    /// UTF-8 message.
    #[arg(long, conflicts_with = "message_hex")]
    message: Option<String>,
    /// Message as lowercase hex bytes.
    #[arg(long)]
    message_hex: Option<String>,
}

impl MessageArg {
    fn bytes(&self) -> anyhow::Result<Vec<u8>> {
        match (&self.message, &self.message_hex) {
            (Some(m), None) => Ok(m.as_bytes().to_vec()),
            (None, Some(h)) => {
                decode_bytes(h).ok_or_else(|| anyhow!("--message-hex is not lowercase hex"))
            }
            _ => bail!("one of --message or --message-hex is required"),
        }
    }
}

#[derive(Args)]
struct Sign {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    board: PathBuf,
    /// Key file of one signer; repeat once per signer.
    #[arg(long = "member-secret", required = true)]
    member_secrets: Vec<PathBuf>,
    /// Decimal member ids, comma-separated.
    #[arg(long)]
    subset: String,
    /// Receiver's public key, lowercase hex.
    #[arg(long)]
    receiver_pub: String,
    #[command(flatten)]
    message: MessageArg,
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    seed: Option<u64>,
    /// Use the worked example's nonces and Lagrange weights.
    #[arg(long)]
    fixture: Option<String>,
    /// Directory for `partial-<uid>.txt` files and `session.txt`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Combine {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    board: PathBuf,
    #[arg(long)]
    session: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    partials: Vec<PathBuf>,
    /// Trust the challenge carried by the partials instead of recomputing it.
    #[arg(long)]
    trust_challenge: bool,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Verify {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    board: PathBuf,
    #[arg(long)]
    sig: PathBuf,
    /// Receiver key file.
    #[arg(long)]
    receiver_secret: PathBuf,
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct Confirm {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    board: PathBuf,
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    receiver_secret: PathBuf,
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    seed: Option<u64>,
    /// Use the worked example's weights and protocol randomness.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    out_package: PathBuf,
    #[arg(long)]
    out_transcript: PathBuf,
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    seed: u64,
    /// `worked`, `toy` (p = 47) or `generated`.
    #[arg(long, default_value = "toy")]
    mode: String,
    #[arg(long, default_value_t = 16)]
    q_bits: u64,
    #[arg(long, default_value_t = 24)]
    p_bits: u64,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Victim member id for impersonate and tamper_partial.
    #[arg(long)]
    target: Option<u64>,
    /// Write the transcript here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Verdict {
    Accept,
    Reject(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Verdict::Accept) => ExitCode::SUCCESS,
        Ok(Verdict::Reject(reason)) => {
            eprintln!("REJECT: {reason}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Verdict> {
    match command {
        Command::GenParams(a) => gen_params(a),
        Command::GenKeypair(a) => gen_keypair(a),
        Command::Members(a) => members(a),
        Command::DealerSetup(a) => cmd_dealer_setup(a),
        Command::Sign(a) => sign(a),
        Command::Combine(a) => combine(a),
        Command::Verify(a) => verify(a),
        Command::Confirm(a) => confirm(a),
        Command::DemoPaper => demo_paper(),
        Command::Simulate(a) => simulate(a),
    }
}

fn read<T: Record>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    T::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write<T: Record>(path: &Path, value: &T) -> anyhow::Result<()> {
    fs::write(path, value.to_text()).with_context(|| format!("writing {}", path.display()))
}

fn check_fixture(name: &Option<String>) -> anyhow::Result<bool> {
    match name.as_deref() {
        None => Ok(false),
        Some(PAPER_FIXTURE) => Ok(true),
        Some(other) => bail!("unknown fixture {other:?} (only {PAPER_FIXTURE:?} exists)"),
    }
}

fn weights_for(fixture: bool) -> LagrangeWeights {
    if fixture {
        WorkedExample::new().weights()
    } else {
        LagrangeWeights::Computed
    }
}

fn load_params(path: &Path) -> anyhow::Result<GroupParams> {
    let params: GroupParams = read(path)?;
    let report = validate_params(&params);
    if !report.is_ok() {
        bail!("{}: {report}", path.display());
    }
    Ok(params)
}

fn parse_ids(list: &str) -> anyhow::Result<Vec<MemberId>> {
    list.split(',')
        .map(|s| {
            let v: u64 = s
                .trim()
                .parse()
                .with_context(|| format!("bad member id {s:?}"))?;
            Ok(MemberId::new(v)?)
        })
        .collect()
}

fn gen_params(a: GenParams) -> anyhow::Result<Verdict> {
    let params = if check_fixture(&a.fixture)? {
        WorkedExample::new().params
    } else if let Some(triple) = &a.fixed {
        let parts: Vec<u64> = triple
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .context("--fixed expects three decimal integers p,q,g")?;
        let [p, q, g] = parts[..] else {
            bail!("--fixed expects exactly three values");
        };
        GroupParams::checked(
            p.into(),
            q.into(),
            g.into(),
            HashMode::Real { domain: a.domain },
        )?
    } else {
        let (Some(q_bits), Some(p_bits), Some(seed)) = (a.q_bits, a.p_bits, a.seed) else {
            bail!("give --q-bits, --p-bits and --seed, or --fixed, or --fixture");
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        generate_params(q_bits, p_bits, &mut rng)?.with_hash(HashMode::Real { domain: a.domain })
    };
    if params.size_class() == SizeClass::Standard {
        let report = validate_standard_params(&params);
        if !report.is_ok() {
            bail!("{report}");
        }
    }
    write(&a.out, &params)?;
    println!("p = {}\nq = {}\ng = {}", params.p, params.q, params.g);
    Ok(Verdict::Accept)
}

fn gen_keypair(a: GenKeypair) -> anyhow::Result<Verdict> {
    let params = load_params(&a.params)?;
    let keypair = KeyPair::generate(&params, &mut ChaCha20Rng::seed_from_u64(a.seed));
    let uid = a.uid.map(MemberId::new).transpose()?;
    println!("y (hex) = {}", to_hex(&keypair.y));
    write(&a.out, &MemberKey { uid, keypair })?;
    Ok(Verdict::Accept)
}

fn members(a: Members) -> anyhow::Result<Verdict> {
    let mut entries = Vec::new();
    for path in &a.keys {
        let key: MemberKey = read(path)?;
        let uid = key
            .uid
            .ok_or_else(|| anyhow!("{} has no member id", path.display()))?;
        entries.push((uid, key.keypair.y));
    }
    entries.sort();
    write(&a.out, &MemberDirectory(entries))?;
    Ok(Verdict::Accept)
}

fn cmd_dealer_setup(a: DealerSetup) -> anyhow::Result<Verdict> {
    let (params, board, secrets) = if check_fixture(&a.fixture)? {
        let ex = WorkedExample::new();
        let (board, secrets) = ex.dealer()?;
        (ex.params, board, secrets)
    } else {
        let params = load_params(a.params.as_deref().expect("required by clap"))?;
        let directory: MemberDirectory = read(a.members.as_deref().expect("required by clap"))?;
        let mut rng = ChaCha20Rng::seed_from_u64(a.seed.expect("required by clap"));
        let (board, secrets) = dealer_setup(
            &params,
            a.t.expect("required by clap"),
            &directory.0,
            &mut rng,
        )?;
        (params, board, secrets)
    };
    check_board_against_secrets(&params, &board, &secrets)?;
    write(&a.out, &board)?;
    println!(
        "y_S = {}\nW = {}\nmembers = {}",
        board.group_public_key,
        board.w,
        board.group_size()
    );
    Ok(Verdict::Accept)
}

fn sign(a: Sign) -> anyhow::Result<Verdict> {
    let fixture = check_fixture(&a.fixture)?;
    let params = load_params(&a.params)?;
    let board: DealerPublicBoard = read(&a.board)?;
    board.check_public(&params)?;
    let subset = parse_ids(&a.subset)?;
    let receiver_pub =
        from_hex(&a.receiver_pub).ok_or_else(|| anyhow!("--receiver-pub is not canonical hex"))?;
    params.check_element(&receiver_pub, "receiver public key")?;
    let message = a.message.bytes()?;
    let weights = weights_for(fixture);
    let example = WorkedExample::new();

    let mut keys = Vec::new();
    for path in &a.member_secrets {
        let key: MemberKey = read(path)?;
        let uid = key
            .uid
            .ok_or_else(|| anyhow!("{} has no member id", path.display()))?;
        keys.push((uid, key.keypair));
    }
    keys.sort_by_key(|(uid, _)| *uid);
    let mut key_ids: Vec<MemberId> = keys.iter().map(|(u, _)| *u).collect();
    let mut wanted = subset.clone();
    key_ids.dedup();
    wanted.sort();
    if key_ids != wanted {
        bail!("--member-secret files must cover exactly the --subset members");
    }

    let mut rng = a.seed.map(ChaCha20Rng::seed_from_u64);
    let mut signers = Vec::new();
    for (uid, kp) in &keys {
        let record = board.member(*uid)?;
        let share = recover_share(record, &board.w, &kp.x, &params)?;
        let nonce = match &mut rng {
            Some(rng) => NonceSecret::generate(&params, rng),
            None => example
                .signer_nonce(*uid)
                .ok_or_else(|| anyhow!("the worked example has no nonce for member {uid}"))?,
        };
        let triple = nonce.commit(&params, &receiver_pub);
        signers.push((share, nonce, triple));
    }
    let commitments: Vec<_> = signers.iter().map(|(s, _, t)| (s.uid, t.clone())).collect();
    let aggregates = aggregate_commitments(&commitments, board.threshold, &message, &params)?;

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for (share, nonce, _) in signers {
        let ctx = modify_shadow(&share, &aggregates.signers, &weights, &params)?;
        let ps = partial_sign(&params, nonce, &ctx, &aggregates.challenge)?;
        write(&a.out_dir.join(format!("partial-{}.txt", ps.uid)), &ps)?;
        println!("member {}: s = {}", ps.uid, ps.s);
    }
    let session = SessionRecord {
        aggregates,
        message,
    };
    write(&a.out_dir.join("session.txt"), &session)?;
    Ok(Verdict::Accept)
}

fn combine(a: Combine) -> anyhow::Result<Verdict> {
    let fixture = check_fixture(&a.fixture)?;
    let params = load_params(&a.params)?;
    let board: DealerPublicBoard = read(&a.board)?;
    let session: SessionRecord = read(&a.session)?;
    let partials = a
        .partials
        .iter()
        .map(|p| read::<PartialSignature>(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let dc = Combiner::new(params, board)
        .with_weights(weights_for(fixture))
        .recompute_challenge(!a.trust_challenge);
    match dc.combine(&partials, &session.aggregates, &session.message) {
        Ok(sig) => {
            write(&a.out, &sig)?;
            println!("S_S = {}", sig.s_s);
            Ok(Verdict::Accept)
        }
        Err(e @ (Error::PartialRejected(_) | Error::ChallengeMismatch)) => {
            Ok(Verdict::Reject(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(a: Verify) -> anyhow::Result<Verdict> {
    let fixture = check_fixture(&a.fixture)?;
    let params = load_params(&a.params)?;
    let board: DealerPublicBoard = read(&a.board)?;
    let sig: GroupSignature = read(&a.sig)?;
    let receiver: MemberKey = read(&a.receiver_secret)?;
    if !receiver.keypair.is_consistent(&params) {
        bail!("receiver key file is inconsistent (y ≠ g^x)");
    }
    if verify_group_signature(
        &sig,
        &board,
        &receiver.keypair,
        &weights_for(fixture),
        &params,
    ) {
        println!("ACCEPT");
        Ok(Verdict::Accept)
    } else {
        println!("REJECT");
        Ok(Verdict::Reject(
            "group signature does not verify for this receiver".into(),
        ))
    }
}

fn confirm(a: Confirm) -> anyhow::Result<Verdict> {
    let fixture = check_fixture(&a.fixture)?;
    let params = load_params(&a.params)?;
    let board: DealerPublicBoard = read(&a.board)?;
    let sig: GroupSignature = read(&a.sig)?;
    let receiver: MemberKey = read(&a.receiver_secret)?;
    let receiver = receiver.keypair;
    let weights = weights_for(fixture);

    let package = match build_confirmation_package(&sig, &board, &receiver, &weights, &params) {
        Ok(p) => p,
        Err(Error::SignatureInvalid) => {
            return Ok(Verdict::Reject(
                "group signature does not verify for this receiver".into(),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    write(&a.out_package, &package)?;
    let congruence = ThirdParty::new(params.clone(), board.group_public_key.clone())
        .recompute_e_from(board.clone(), sig.signers.clone(), weights)
        .check(&package);

    let transcript = match a.seed {
        Some(seed) => zk_run(
            &package,
            &receiver,
            &mut role_rng(seed, "third-party"),
            &mut role_rng(seed, "receiver-zk"),
            &params,
        ),
        None => zk_run_with(
            &package,
            &receiver,
            &WorkedExample::new().zk_randomness(),
            &params,
        ),
    };
    write(&a.out_transcript, &transcript)?;
    println!(
        "third-party congruence: {}",
        if congruence { "ok" } else { "FAIL" }
    );
    println!("confirmation protocol: {:?}", transcript.verdict);
    match (congruence, transcript.verdict.is_accept()) {
        (true, true) => Ok(Verdict::Accept),
        (false, _) => Ok(Verdict::Reject(
            "third party's congruence check fails".into(),
        )),
        (_, false) => Ok(Verdict::Reject("confirmation protocol rejected".into())),
    }
}

/// One line of the demo's check table.
struct Row {
    name: String,
    expected: String,
    got: String,
}

impl Row {
    fn ok(&self) -> bool {
        self.expected == self.got
    }
}

struct Table(Vec<Row>);

impl Table {
    fn num(&mut self, name: impl Into<String>, expected: u64, got: &BigUint) {
        self.0.push(Row {
            name: name.into(),
            expected: expected.to_string(),
            got: got.to_string(),
        });
    }

    fn text(&mut self, name: impl Into<String>, expected: &str, got: &str) {
        self.0.push(Row {
            name: name.into(),
            expected: expected.to_string(),
            got: got.to_string(),
        });
    }

    fn print(&self) -> bool {
        let width = self.0.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.0 {
            let mark = if r.ok() { "ok" } else { "MISMATCH" };
            println!(
                "{:width$}  expected {:>6}  got {:>6}  {mark}",
                r.name, r.expected, r.got
            );
        }
        self.0.iter().all(Row::ok)
    }
}

fn demo_paper() -> anyhow::Result<Verdict> {
    let ex = WorkedExample::new();
    let params = &ex.params;
    let mut table = Table(Vec::new());
    println!(
        "group: p = {}, q = {}, g = {}, challenge fixed to {}",
        params.p,
        params.q,
        params.g,
        fixture::CHALLENGE
    );

    let (board, secrets) = ex.dealer()?;
    check_board_against_secrets(params, &board, &secrets)?;
    table.num("y_S", expected::GROUP_PUBLIC_KEY, &board.group_public_key);
    table.num("W", expected::W, &board.w);
    for (k, rec) in board.members.iter().enumerate() {
        let l = &secrets.masked_shares[&rec.uid];
        table.num(format!("l_{}", rec.uid), expected::MASKED_SHARES[k], l);
        table.num(format!("m_{}", rec.uid), expected::M[k], &rec.m);
        table.num(format!("n_{}", rec.uid), expected::N[k], &rec.n);
        table.num(format!("v_{}", rec.uid), expected::V[k], &rec.v);
    }

    let receiver = ex.receiver();
    let signers = ex.signers();
    let mut commitments = Vec::new();
    let mut nonces = Vec::new();
    for (k, &uid) in signers.iter().enumerate() {
        let nonce = ex.signer_nonce(uid).expect("fixture signer");
        let t = nonce.commit(params, &receiver.y);
        let (a, b, c) = expected::COMMITMENTS[k];
        table.num(format!("A_{uid}"), a, &t.a);
        table.num(format!("B_{uid}"), b, &t.b);
        table.num(format!("C_{uid}"), c, &t.c);
        commitments.push((uid, t));
        nonces.push(nonce);
    }
    let agg = aggregate_commitments(&commitments, board.threshold, &ex.message(), params)?;
    table.num("U_S", expected::U_S, &agg.u_s);
    table.num("V_S", expected::V_S, &agg.v_s);
    table.num("W_S", expected::W_S, &agg.w_s);
    table.num("R_S", fixture::CHALLENGE, &agg.challenge);

    println!("Lagrange weights injected as lambda_i = MS_i * l_i^-1 mod q:");
    for ((uid, lambda), ms) in ex.derived_lambdas().iter().zip(fixture::MODIFIED_SHADOWS) {
        let l = &secrets.masked_shares[uid];
        println!("  lambda_{uid} = {ms} * {l}^-1 mod {} = {lambda}", params.q);
    }
    let weights = ex.weights();
    let mut partials = Vec::new();
    for (k, (&uid, nonce)) in signers.iter().zip(nonces).enumerate() {
        let share = recover_share(
            board.member(uid)?,
            &board.w,
            &ex.member_key(uid).expect("member").x,
            params,
        )?;
        let ctx = modify_shadow(&share, &signers, &weights, params)?;
        table.num(format!("lambda_{uid}"), expected::LAMBDAS[k], &ctx.lambda);
        table.num(
            format!("MS_{uid}"),
            fixture::MODIFIED_SHADOWS[k],
            &ctx.modified_shadow,
        );
        let ps = partial_sign(params, nonce, &ctx, &agg.challenge)?;
        table.num(format!("s_{uid}"), expected::PARTIALS[k], &ps.s);
        partials.push(ps);
    }

    let dc = Combiner::new(params.clone(), board.clone()).with_weights(weights.clone());
    let sig = dc.combine(&partials, &agg, &ex.message())?;
    table.num("S_S", expected::S_S, &sig.s_s);
    table.num("payload U_S", expected::U_S, &sig.u_s);
    table.num("payload W_S", expected::W_S, &sig.w_s);

    let e = compute_e(&sig.signers, &board, &weights, params)?;
    let r_r = recover_commitment(&sig.w_s, &sig.u_s, &receiver.x, params);
    table.num("E", expected::E, &e);
    table.num("R_R", expected::R_R, &r_r);
    let lhs = params.pow_g(&sig.s_s);
    let rhs = params.mul(
        &r_r,
        &params.pow(&params.mul(&e, &board.group_public_key), &agg.challenge),
    );
    table.num("g^S_S", 14, &lhs);
    table.num("R_R*(E*y_S)^R_S", 14, &rhs);
    let accepted = verify_group_signature(&sig, &board, &receiver, &weights, params);
    table.text(
        "verdict",
        "ACCEPT",
        if accepted { "ACCEPT" } else { "REJECT" },
    );

    let package = build_confirmation_package(&sig, &board, &receiver, &weights, params)?;
    table.num("mu", expected::MU, &package.mu);
    let zk = zk_run_with(&package, &receiver, &ex.zk_randomness(), params);
    table.num("w", expected::ZK_W, &zk.w);
    table.num("beta", expected::ZK_BETA, &zk.beta);
    table.num("gamma", expected::ZK_GAMMA, &zk.gamma);
    table.text(
        "confirmation",
        "ACCEPT",
        if zk.verdict.is_accept() {
            "ACCEPT"
        } else {
            "REJECT"
        },
    );

    if table.print() {
        println!("all values match");
        Ok(Verdict::Accept)
    } else {
        Ok(Verdict::Reject("worked example values differ".into()))
    }
}

fn simulate(a: Simulate) -> anyhow::Result<Verdict> {
    let scenario: Scenario = a.scenario.parse()?;
    let mut config = match a.mode.as_str() {
        "worked" => SimConfig::worked(scenario, a.seed),
        "toy" => SimConfig::toy(scenario, a.seed),
        "generated" => SimConfig::generated(a.q_bits, a.p_bits, 3, 5, scenario, a.seed),
        other => bail!("unknown --mode {other:?} (worked, toy, generated)"),
    };
    if let Some(t) = a.t {
        config.t = t;
    }
    if let Some(n) = a.n {
        config.n = n;
    }
    config.target = a.target.map(MemberId::new).transpose()?;
    let transcript = sim::run_session(&config)?;
    let text = transcript.export();
    match &a.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(match transcript.outcome {
        sim::Outcome::Accept => Verdict::Accept,
        sim::Outcome::Reject(reason) => Verdict::Reject(reason),
    })
}
