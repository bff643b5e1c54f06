//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails the
//! test if any criterion failed.
//!
//! Expected values here are literals or come from small oracles written in
//! this file (plain `u64` arithmetic), never from the library's own tables.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use dtms::combiner::Combiner;
use dtms::dealer::check_board_against_secrets;
use dtms::fixture::WorkedExample;
use dtms::group::{generate_params, GroupParams, HashMode, KeyPair};
use dtms::receiver::{
    build_confirmation_package, compute_e, recover_commitment, third_party_check,
    verify_group_signature, zk_run, zk_run_with, ZkVerdict,
};
use dtms::records::{MemberDirectory, MemberKey, Record, SessionRecord};
use dtms::shamir::{reconstruct_at_zero, MemberId, SecretPolynomial};
use dtms::signing::{aggregate_commitments, modify_shadow, partial_sign, recover_share};
use dtms::sim::{
    check_channel_discipline, forge_attempts, replay, role_rng, run_session, Scenario, SimConfig,
};
use dtms::{ConfirmationPackage, GroupSignature, PartialSignature, ZkTranscript};

/// Golden criteria must each finish within this budget.
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
/// Honest completeness, all sessions together.
const COMPLETENESS_BUDGET: Duration = Duration::from_secs(60);
const TOY_SESSIONS: u64 = 100;
const STANDARD_SESSIONS: u64 = 3;
/// Bit sizes of the random toy groups.
const TOY_Q_BITS: u64 = 16;
const TOY_P_BITS: u64 = 24;
/// At most this many 4-of-7 subsets may hit the secret by chance.
const CHANCE_HITS_ALLOWED: usize = 2;
const ADVERSARIAL_RUNS: u64 = 100;
const FORGE_TRIALS: usize = 1000;
const REPLAY_SEEDS: u64 = 20;

type Outcome = Result<String, String>;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn uid(v: u64) -> MemberId {
    MemberId::new(v).unwrap()
}

fn small(x: &BigUint) -> u64 {
    u64::try_from(x).expect("toy value fits in u64")
}

fn smalls(xs: &[&BigUint]) -> Vec<u64> {
    xs.iter().map(|x| small(x)).collect()
}

/// `base^e mod m` by square-and-multiply over `u64`.
fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b) = (1u64, base % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(name: &str, got: T, want: T) -> Result<(), String> {
    ensure(got == want, || {
        format!("{name}: got {got:?}, want {want:?}")
    })
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took <= budget, || {
        format!("took {took:?}, budget {budget:?}")
    })?;
    Ok(format!("{detail} ({} ms)", took.as_millis()))
}

fn dealer_golden() -> Outcome {
    let ex = WorkedExample::new();
    let (board, secrets) = ex.dealer().map_err(|e| e.to_string())?;
    check_board_against_secrets(&ex.params, &board, &secrets).map_err(|e| e.to_string())?;
    expect_eq("y_S", small(&board.group_public_key), 16)?;
    expect_eq("W", small(&board.w), 2)?;
    let ls: Vec<u64> = secrets.masked_shares.values().map(small).collect();
    expect_eq("l", ls, vec![10, 20, 3, 20, 5, 7, 20])?;
    let m: Vec<u64> = board.members.iter().map(|r| small(&r.m)).collect();
    let n: Vec<u64> = board.members.iter().map(|r| small(&r.n)).collect();
    let v: Vec<u64> = board.members.iter().map(|r| small(&r.v)).collect();
    expect_eq("m", m, vec![3, 9, 21, 9, 12, 27, 9])?;
    expect_eq("n", n, vec![17, 32, 3, 34, 24, 7, 37])?;
    expect_eq("v", v, vec![41, 29, 1, 19, 38, 14, 44])?;
    Ok("y_S, W and all 7 member rows bit-exact".into())
}

type Criterion = (&'static str, fn() -> Outcome);

struct SignedExample {
    ex: WorkedExample,
    board: dtms::DealerPublicBoard,
    partials: Vec<PartialSignature>,
    aggregates: dtms::SessionAggregates,
}

type SigningRows = (SignedExample, Vec<(u64, u64, u64)>, Vec<u64>, Vec<u64>);

fn sign_example() -> Result<SigningRows, String> {
    let ex = WorkedExample::new();
    let params = ex.params.clone();
    let (board, _) = ex.dealer().map_err(|e| e.to_string())?;
    let receiver = ex.receiver();
    let signers = ex.signers();
    let mut triples = Vec::new();
    let mut nonces = Vec::new();
    for &id in &signers {
        let nonce = ex.signer_nonce(id).ok_or("missing nonce")?;
        triples.push((id, nonce.commit(&params, &receiver.y)));
        nonces.push(nonce);
    }
    let aggregates =
        aggregate_commitments(&triples, 5, b"m", &params).map_err(|e| e.to_string())?;
    let weights = ex.weights();
    let (mut lambdas, mut shadows, mut partials) = (Vec::new(), Vec::new(), Vec::new());
    for (&id, nonce) in signers.iter().zip(nonces) {
        let key = ex.member_key(id).ok_or("missing key")?;
        let share = recover_share(
            board.member(id).map_err(|e| e.to_string())?,
            &board.w,
            &key.x,
            &params,
        )
        .map_err(|e| e.to_string())?;
        let ctx = modify_shadow(&share, &signers, &weights, &params).map_err(|e| e.to_string())?;
        lambdas.push(small(&ctx.lambda));
        shadows.push(small(&ctx.modified_shadow));
        partials.push(
            partial_sign(&params, nonce, &ctx, &aggregates.challenge).map_err(|e| e.to_string())?,
        );
    }
    let commitments = triples
        .iter()
        .map(|(_, t)| (small(&t.a), small(&t.b), small(&t.c)))
        .collect();
    Ok((
        SignedExample {
            ex,
            board,
            partials,
            aggregates,
        },
        commitments,
        lambdas,
        shadows,
    ))
}

fn signing_golden() -> Outcome {
    let (signed, commitments, lambdas, shadows) = sign_example()?;
    // A_i = g^{-k2}, B_i = g^{k1}, C_i = g^{k1} y_R^{k2}, recomputed over u64.
    let nonces = [(18, 17), (17, 19), (14, 13), (19, 21), (16, 18)];
    let oracle: Vec<(u64, u64, u64)> = nonces
        .iter()
        .map(|&(k1, k2)| {
            let b = pow_mod(25, k1, 47);
            (pow_mod(25, 23 - k2, 47), b, b * pow_mod(2, k2, 47) % 47)
        })
        .collect();
    expect_eq("commitments vs oracle", commitments.clone(), oracle)?;
    expect_eq(
        "commitments",
        commitments,
        vec![(18, 4, 3), (8, 34, 8), (3, 24, 7), (14, 6, 25), (12, 7, 34)],
    )?;
    let a = &signed.aggregates;
    expect_eq(
        "(U_S, V_S, W_S)",
        smalls(&[&a.u_s, &a.v_s, &a.w_s]),
        vec![8, 36, 14],
    )?;
    expect_eq("R_S", small(&a.challenge), 9)?;
    expect_eq("lambda", lambdas, vec![12, 10, 15, 4, 6])?;
    expect_eq("MS", shadows, vec![10, 16, 6, 5, 5])?;
    let s: Vec<u64> = signed.partials.iter().map(|p| small(&p.s)).collect();
    expect_eq("s", s, vec![16, 0, 22, 18, 15])?;
    Ok("15 commitments, aggregates, R_S, lambda, MS and s bit-exact".into())
}

fn combine_verify_golden() -> Outcome {
    let (signed, ..) = sign_example()?;
    let ex = &signed.ex;
    let params = &ex.params;
    ensure(
        pow_mod(25, 16, 47) == 4 * pow_mod(pow_mod(9, 12, 47), 9, 47) % 47,
        || "oracle: 25^16 ≢ 4·(9^12)^9".into(),
    )?;
    let dc = Combiner::new(params.clone(), signed.board.clone()).with_weights(ex.weights());
    let ok2 = dc
        .verify_partial(&signed.partials[0], &signed.aggregates.signers)
        .map_err(|e| e.to_string())?;
    ensure(ok2, || "partial of signer 2 rejected".into())?;
    let sig = dc
        .combine(&signed.partials, &signed.aggregates, b"m")
        .map_err(|e| e.to_string())?;
    expect_eq("S_S", small(&sig.s_s), 2)?;
    let e =
        compute_e(&sig.signers, &signed.board, &ex.weights(), params).map_err(|e| e.to_string())?;
    expect_eq("E", small(&e), 18)?;
    let receiver = ex.receiver();
    let r_r = recover_commitment(&sig.w_s, &sig.u_s, &receiver.x, params);
    expect_eq("R_R", small(&r_r), 36)?;
    let lhs = pow_mod(25, 2, 47);
    let rhs = 36 * pow_mod(18 * 16 % 47, 9, 47) % 47;
    expect_eq("oracle congruence", (lhs, rhs), (14, 14))?;
    ensure(
        verify_group_signature(&sig, &signed.board, &receiver, &ex.weights(), params),
        || "receiver rejects".into(),
    )?;
    Ok("signer-2 check, S_S = 2, E = 18, R_R = 36, 14 ≡ 14".into())
}

fn confirmation_golden() -> Outcome {
    let (signed, ..) = sign_example()?;
    let ex = &signed.ex;
    let params = &ex.params;
    let dc = Combiner::new(params.clone(), signed.board.clone()).with_weights(ex.weights());
    let sig = dc
        .combine(&signed.partials, &signed.aggregates, b"m")
        .map_err(|e| e.to_string())?;
    let receiver = ex.receiver();
    let pkg = build_confirmation_package(&sig, &signed.board, &receiver, &ex.weights(), params)
        .map_err(|e| e.to_string())?;
    expect_eq("mu", small(&pkg.mu), pow_mod(8, 9, 47))?;
    expect_eq(
        "package",
        (
            smalls(&[&pkg.r_r, &pkg.e, &pkg.s_s, &pkg.u_s]),
            pkg.message.clone(),
            small(&pkg.mu),
        ),
        (vec![36, 18, 2, 8], b"m".to_vec(), 16),
    )?;
    ensure(
        third_party_check(&pkg, &signed.board.group_public_key, params),
        || "third-party congruence fails".into(),
    )?;
    let zk = zk_run_with(&pkg, &receiver, &ex.zk_randomness(), params);
    expect_eq("w", small(&zk.w), 25)?;
    expect_eq("beta", small(&zk.beta), 36)?;
    expect_eq("gamma", small(&zk.gamma), 9)?;
    expect_eq("verdict", zk.verdict, ZkVerdict::Accept)?;
    // C's two checks, over u64 with exponent v + alpha = 48.
    expect_eq(
        "beta oracle",
        pow_mod(8, 9, 47) * pow_mod(25, 48, 47) % 47,
        36,
    )?;
    expect_eq(
        "gamma oracle",
        pow_mod(16, 9, 47) * pow_mod(2, 48, 47) % 47,
        9,
    )?;
    Ok("mu = 16, package {36,18,2,8,m,16}, w = 25, beta = 36, gamma = 9, accept".into())
}

fn honest_completeness() -> Outcome {
    let mut fails = Vec::new();
    let mut run = |label: &str, cfg: SimConfig| match run_session(&cfg) {
        Ok(t) if t.outcome.is_accept() => {}
        Ok(t) => fails.push(format!("{label} seed {}: {}", cfg.seed, t.outcome)),
        Err(e) => fails.push(format!("{label} seed {}: {e}", cfg.seed)),
    };
    for seed in 0..TOY_SESSIONS {
        run("p=47", SimConfig::toy(Scenario::Honest, seed));
        run(
            "16-bit q",
            SimConfig::generated(TOY_Q_BITS, TOY_P_BITS, 3, 5, Scenario::Honest, seed),
        );
    }
    for seed in 0..STANDARD_SESSIONS {
        run(
            "512/160",
            SimConfig::generated(160, 512, 3, 5, Scenario::Honest, seed),
        );
    }
    ensure(fails.is_empty(), || fails.join("; "))?;
    Ok(format!(
        "{TOY_SESSIONS} at p=47, {TOY_SESSIONS} with random {TOY_Q_BITS}-bit q, {STANDARD_SESSIONS} at 512/160 all accept"
    ))
}

/// Constant term of the interpolating polynomial, by Lagrange over `u64`.
fn interpolate_zero(points: &[(u64, u64)], q: u64) -> u64 {
    let mut acc = 0;
    for &(xi, yi) in points {
        let (mut num, mut den) = (1, 1);
        for &(xj, _) in points {
            if xj != xi {
                num = num * (q - xj % q) % q;
                den = den * ((xi + q - xj) % q) % q;
            }
        }
        acc = (acc + yi * num % q * pow_mod(den, q - 2, q)) % q;
    }
    acc
}

fn subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|i| m & (1 << (i - 1)) != 0).collect())
        .collect()
}

fn shamir_equivalence() -> Outcome {
    let q = 23u64;
    let poly = SecretPolynomial::from_coefficients([13, 0, 0, 0, 18].map(big).to_vec(), &big(q))
        .map_err(|e| e.to_string())?;
    let f = |x: u64| (13 + 18 * pow_mod(x, 4, q)) % q;
    let check = |set: &[u64]| -> Result<u64, String> {
        let shares: Vec<_> = set
            .iter()
            .map(|&i| (uid(i), poly.eval_at(uid(i), &big(q))))
            .collect();
        let lib = small(&reconstruct_at_zero(&shares, &big(q)).map_err(|e| e.to_string())?);
        let points: Vec<_> = set.iter().map(|&i| (i, f(i))).collect();
        let oracle = interpolate_zero(&points, q);
        expect_eq(&format!("subset {set:?}"), lib, oracle)?;
        Ok(lib)
    };
    let fives = subsets(7, 5);
    for s in &fives {
        expect_eq(&format!("5-subset {s:?}"), check(s)?, 13)?;
    }
    let fours = subsets(7, 4);
    let mut hits = 0;
    for s in &fours {
        if check(s)? == 13 {
            hits += 1;
        }
    }
    ensure(hits <= CHANCE_HITS_ALLOWED, || {
        format!("{hits} of 35 4-subsets hit 13")
    })?;
    Ok(format!(
        "uids 1..7: {}/21 five-subsets give 13, {hits}/{} four-subsets do",
        fives.len(),
        fours.len()
    ))
}

fn adversarial_rejection() -> Outcome {
    let scenarios = [
        Scenario::Impersonate,
        Scenario::TamperPartial,
        Scenario::ForgeSignature,
        Scenario::WrongReceiver,
    ];
    let mut report = Vec::new();
    for sc in scenarios {
        let mut rejected = 0;
        for seed in 0..ADVERSARIAL_RUNS {
            let cfg = SimConfig::generated(TOY_Q_BITS, TOY_P_BITS, 3, 5, sc, seed);
            let t = run_session(&cfg).map_err(|e| format!("{sc} seed {seed}: {e}"))?;
            if !t.outcome.is_accept() {
                rejected += 1;
            }
        }
        ensure(rejected == ADVERSARIAL_RUNS, || {
            format!("{sc}: {rejected}/{ADVERSARIAL_RUNS} rejected")
        })?;
        report.push(format!("{sc} {rejected}/{ADVERSARIAL_RUNS}"));
    }

    // Forgery rate on a random toy group: allowed up to the 1/q expectation.
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let params = generate_params(TOY_Q_BITS, TOY_P_BITS, &mut rng).map_err(|e| e.to_string())?;
    let ids: Vec<MemberId> = (1..=5).map(uid).collect();
    let members: Vec<_> = ids
        .iter()
        .map(|&id| (id, KeyPair::generate(&params, &mut rng).y))
        .collect();
    let (board, _) =
        dtms::dealer_setup(&params, 3, &members, &mut rng).map_err(|e| e.to_string())?;
    let receiver = KeyPair::generate(&params, &mut rng);
    let hits = forge_attempts(
        &params,
        &board,
        &receiver,
        &ids[..3],
        &dtms::LagrangeWeights::Computed,
        b"forged",
        FORGE_TRIALS,
        &mut role_rng(7, "forger"),
    );
    let q = small(&params.q) as usize;
    let allowed = FORGE_TRIALS.div_ceil(q);
    ensure(hits <= allowed, || {
        format!("forgeries: {hits}/{FORGE_TRIALS} accepted, allowed {allowed}")
    })?;
    report.push(format!(
        "forgeries {hits}/{FORGE_TRIALS} accepted (q = {q}, allowed {allowed})"
    ));
    Ok(report.join(", "))
}

fn linkage_invariants() -> Outcome {
    const NAMES: [&str; 4] = [
        "R_R = V_S",
        "g^sum_MS = E*y_S",
        "sum_MS = f(0) + sum K_i*lambda_i",
        "sum_MS differs from f(0) when the mask is nonzero",
    ];
    let mut sessions = 0;
    let mut configs = vec![SimConfig::worked(Scenario::Honest, 0)];
    for seed in 0..TOY_SESSIONS {
        configs.push(SimConfig::toy(Scenario::Honest, seed));
        configs.push(SimConfig::generated(
            TOY_Q_BITS,
            TOY_P_BITS,
            3,
            5,
            Scenario::Honest,
            seed,
        ));
    }
    for cfg in &configs {
        let t = run_session(cfg).map_err(|e| e.to_string())?;
        for name in NAMES {
            expect_eq(
                &format!("seed {} {name}", cfg.seed),
                t.check(name),
                Some(true),
            )?;
        }
        expect_eq("R_R vs V_S values", t.value("R_R"), t.value("V_S"))?;
        sessions += 1;
    }

    let worked = run_session(&SimConfig::worked(Scenario::ColludeReconstruct, 0))
        .map_err(|e| e.to_string())?;
    expect_eq(
        "worked reconstruction",
        worked.value("reconstruction").map(small),
        Some(19),
    )?;
    expect_eq("25^19 vs 18*16", pow_mod(25, 19, 47), 18 * 16 % 47)?;
    let mut differs = 0;
    for seed in 0..TOY_SESSIONS {
        let cfg = SimConfig::generated(
            TOY_Q_BITS,
            TOY_P_BITS,
            3,
            5,
            Scenario::ColludeReconstruct,
            seed,
        );
        let t = run_session(&cfg).map_err(|e| e.to_string())?;
        ensure(t.all_checks_pass(), || {
            format!("collusion seed {seed}: {:?}", t.checks)
        })?;
        if !t.outcome.is_accept() {
            differs += 1;
        }
    }
    ensure(differs == TOY_SESSIONS, || {
        format!("pooled shares gave f(0) in {} runs", TOY_SESSIONS - differs)
    })?;
    Ok(format!(
        "{sessions} honest sessions hold all 4 links; worked pool = 19 ≠ 13; {differs}/{TOY_SESSIONS} collusions miss f(0)"
    ))
}

fn round_trip<T: Record + PartialEq + std::fmt::Debug>(
    name: &str,
    value: &T,
) -> Result<(), String> {
    let text = value.to_text();
    let parsed = T::from_text(&text).map_err(|e| format!("{name}: {e}"))?;
    expect_eq(&format!("{name} value"), &parsed, value)?;
    expect_eq(&format!("{name} text"), parsed.to_text(), text)
}

fn determinism_round_trip() -> Outcome {
    let mut replays = 0;
    for seed in 0..REPLAY_SEEDS {
        for sc in Scenario::ALL {
            for cfg in [SimConfig::toy(sc, seed), SimConfig::worked(sc, seed)] {
                let t = run_session(&cfg).map_err(|e| e.to_string())?;
                ensure(replay(&t, &cfg), || {
                    format!("{sc} seed {seed} does not replay")
                })?;
                check_channel_discipline(&t).map_err(|e| format!("{sc} seed {seed}: {e}"))?;
                replays += 1;
            }
        }
        let t = run_session(&SimConfig::toy(Scenario::Honest, seed)).map_err(|e| e.to_string())?;
        ensure(
            !replay(&t, &SimConfig::toy(Scenario::Honest, seed + 1)),
            || format!("seeds {seed} and {} give identical transcripts", seed + 1),
        )?;
    }

    let (signed, ..) = sign_example()?;
    let ex = &signed.ex;
    let params = &ex.params;
    let dc = Combiner::new(params.clone(), signed.board.clone()).with_weights(ex.weights());
    let sig: GroupSignature = dc
        .combine(&signed.partials, &signed.aggregates, b"m")
        .map_err(|e| e.to_string())?;
    let receiver = ex.receiver();
    let pkg: ConfirmationPackage =
        build_confirmation_package(&sig, &signed.board, &receiver, &ex.weights(), params)
            .map_err(|e| e.to_string())?;
    let accepted: ZkTranscript = zk_run_with(&pkg, &receiver, &ex.zk_randomness(), params);
    let impostor = KeyPair::from_secret(params, big(5)).map_err(|e| e.to_string())?;
    let rejected: ZkTranscript = zk_run(
        &pkg,
        &impostor,
        &mut role_rng(1, "c"),
        &mut role_rng(1, "r"),
        params,
    );
    ensure(!rejected.verdict.is_accept(), || {
        "impostor confirmation accepted".into()
    })?;

    round_trip("params (fixture hash)", params)?;
    round_trip(
        "params (sha256)",
        &GroupParams::from_u64(47, 23, 25, HashMode::real()),
    )?;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    round_trip(
        "params (512-bit)",
        &generate_params(160, 512, &mut rng).map_err(|e| e.to_string())?,
    )?;
    round_trip(
        "keypair",
        &MemberKey {
            uid: Some(uid(2)),
            keypair: ex.member_key(uid(2)).unwrap(),
        },
    )?;
    round_trip(
        "keypair (untagged)",
        &MemberKey {
            uid: None,
            keypair: receiver.clone(),
        },
    )?;
    let directory = MemberDirectory(
        ex.member_keys()
            .into_iter()
            .map(|(id, kp)| (id, kp.y))
            .collect(),
    );
    round_trip("members", &directory)?;
    round_trip("board", &signed.board)?;
    for ps in &signed.partials {
        round_trip("partial", ps)?;
    }
    round_trip(
        "session",
        &SessionRecord {
            aggregates: signed.aggregates.clone(),
            message: b"m".to_vec(),
        },
    )?;
    round_trip("sig", &sig)?;
    round_trip("package", &pkg)?;
    round_trip("transcript (accept)", &accepted)?;
    round_trip("transcript (reject)", &rejected)?;
    Ok(format!(
        "{replays} transcripts replay byte-identically, seed+1 differs in {REPLAY_SEEDS}/{REPLAY_SEEDS}, 14 records round-trip"
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 dealer golden", || timed(GOLDEN_BUDGET, dealer_golden)),
        ("2 signing golden", || timed(GOLDEN_BUDGET, signing_golden)),
        ("3 combine/verify golden", || {
            timed(GOLDEN_BUDGET, combine_verify_golden)
        }),
        ("4 confirmation golden", || {
            timed(GOLDEN_BUDGET, confirmation_golden)
        }),
        ("5 honest completeness", || {
            timed(COMPLETENESS_BUDGET, honest_completeness)
        }),
        ("6 shamir oracle equivalence", shamir_equivalence),
        ("7 adversarial rejection", adversarial_rejection),
        ("8 linkage invariants", linkage_invariants),
        ("9 determinism and round-trip", determinism_round_trip),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {name}: PASS | {detail}"),
            Err(why) => {
                println!("criterion {name}: FAIL | {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
