use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dtms::fixture::{MEMBER_SECRETS, RECEIVER_SECRET, SIGNERS};
use dtms::group::{validate_params, GroupParams, HashMode, KeyPair};
use dtms::records::{MemberKey, Record};
use dtms::shamir::MemberId;
use dtms::DealerPublicBoard;
use num_bigint::BigUint;
use tempfile::TempDir;

fn dtms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn key_file(dir: &Path, name: &str, uid: Option<u64>, x: u64) -> PathBuf {
    let params = GroupParams::from_u64(47, 23, 25, HashMode::real());
    let keypair = KeyPair::from_secret(&params, BigUint::from(x)).unwrap();
    let key = MemberKey {
        uid: uid.map(|u| MemberId::new(u).unwrap()),
        keypair,
    };
    let path = dir.join(name);
    fs::write(&path, key.to_text()).unwrap();
    path
}

struct Worked {
    dir: TempDir,
    params: PathBuf,
    board: PathBuf,
    receiver: PathBuf,
}

fn worked_setup() -> Worked {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.txt");
    let board = dir.path().join("board.txt");
    assert_eq!(
        code(&dtms(&[
            "gen-params",
            "--fixture",
            "paper5",
            "--out",
            s(&params)
        ])),
        0
    );
    assert_eq!(
        code(&dtms(&[
            "dealer-setup",
            "--fixture",
            "paper5",
            "--out",
            s(&board)
        ])),
        0
    );
    let receiver = key_file(dir.path(), "receiver.txt", None, RECEIVER_SECRET);
    Worked {
        dir,
        params,
        board,
        receiver,
    }
}

fn worked_sign(w: &Worked) -> PathBuf {
    let out = w.dir.path().join("round");
    let mut args = vec![
        "sign".to_string(),
        "--params".into(),
        s(&w.params).into(),
        "--board".into(),
        s(&w.board).into(),
    ];
    for uid in SIGNERS {
        let x = MEMBER_SECRETS[(uid - 1) as usize];
        let path = key_file(w.dir.path(), &format!("key-{uid}.txt"), Some(uid), x);
        args.push("--member-secret".into());
        args.push(s(&path).into());
    }
    args.extend(
        [
            "--subset",
            "2,4,5,6,7",
            "--receiver-pub",
            "2",
            "--message",
            "m",
            "--fixture",
            "paper5",
            "--out-dir",
        ]
        .map(String::from),
    );
    args.push(s(&out).into());
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let res = dtms(&refs);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

fn combine_args<'a>(
    w: &'a Worked,
    session: &'a str,
    sig: &'a Path,
    partials: &'a [String],
) -> Vec<&'a str> {
    let mut args = vec![
        "combine",
        "--params",
        s(&w.params),
        "--board",
        s(&w.board),
        "--session",
        session,
        "--fixture",
        "paper5",
        "--out",
        s(sig),
        "--partials",
    ];
    args.extend(partials.iter().map(String::as_str));
    args
}

fn partial_paths(round: &Path) -> Vec<String> {
    SIGNERS
        .iter()
        .map(|u| {
            round
                .join(format!("partial-{u}.txt"))
                .to_str()
                .unwrap()
                .to_string()
        })
        .collect()
}

#[test]
fn worked_pipeline_through_files() {
    let w = worked_setup();
    let board: DealerPublicBoard =
        Record::from_text(&fs::read_to_string(&w.board).unwrap()).unwrap();
    assert_eq!(board.group_public_key, BigUint::from(16u32));
    assert_eq!(board.w, BigUint::from(2u32));
    assert_eq!(board.members.len(), 7);

    let round = worked_sign(&w);
    let sig = w.dir.path().join("sig.txt");
    let partials = partial_paths(&round);
    let session = round.join("session.txt");
    let res = dtms(&combine_args(&w, s(&session), &sig, &partials));
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(
        fs::read_to_string(&sig).unwrap(),
        "%DTMS v1 sig\nss = 2\nus = 8\nws = e\nsigners = 2,4,5,6,7\nmsg = 6d\n"
    );

    let verify = |key: &Path| {
        code(&dtms(&[
            "verify",
            "--params",
            s(&w.params),
            "--board",
            s(&w.board),
            "--sig",
            s(&sig),
            "--receiver-secret",
            s(key),
            "--fixture",
            "paper5",
        ]))
    };
    assert_eq!(verify(&w.receiver), 0);
    for x in [1, 2, 10, 22] {
        let wrong = key_file(w.dir.path(), "wrong.txt", None, x);
        assert_eq!(verify(&wrong), 1, "x = {x}");
    }

    let pkg = w.dir.path().join("package.txt");
    let transcript = w.dir.path().join("transcript.txt");
    let res = dtms(&[
        "confirm",
        "--params",
        s(&w.params),
        "--board",
        s(&w.board),
        "--sig",
        s(&sig),
        "--receiver-secret",
        s(&w.receiver),
        "--fixture",
        "paper5",
        "--out-package",
        s(&pkg),
        "--out-transcript",
        s(&transcript),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(
        fs::read_to_string(&pkg).unwrap(),
        "%DTMS v1 package\nrr = 24\ne = 12\nss = 2\nus = 8\nmsg = 6d\nmu = 10\n"
    );
    let t = fs::read_to_string(&transcript).unwrap();
    assert!(t.contains("move1 = c,w,19\n"), "{t}");
    assert!(t.ends_with("verdict = accept\n"), "{t}");
}

#[test]
fn tampered_partial_is_named() {
    let w = worked_setup();
    let round = worked_sign(&w);
    let p4 = round.join("partial-4.txt");
    let text = fs::read_to_string(&p4).unwrap();
    assert!(text.contains("s = 0\n"));
    fs::write(&p4, text.replace("s = 0\n", "s = 1\n")).unwrap();
    let sig = w.dir.path().join("sig.txt");
    let partials = partial_paths(&round);
    let session = round.join("session.txt");
    let res = dtms(&combine_args(&w, s(&session), &sig, &partials));
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("member(s) 4"));
    assert!(!sig.exists());
}

#[test]
fn demo_matches_every_value() {
    let res = dtms(&["demo-paper"]);
    assert_eq!(code(&res), 0);
    let out = String::from_utf8_lossy(&res.stdout);
    assert!(!out.contains("MISMATCH"));
    for row in ["S_S ", "U_S ", "E ", "R_R ", "verdict "] {
        assert!(
            out.lines().any(|l| l.starts_with(row) && l.ends_with("ok")),
            "{row}"
        );
    }
    assert!(out.contains("lambda_2 = 10 * 20^-1 mod 23 = 12"));
}

fn random_group(dir: &Path, seed: &str) -> (PathBuf, Vec<PathBuf>, PathBuf, String) {
    let params = dir.join("params.txt");
    assert_eq!(
        code(&dtms(&[
            "gen-params",
            "--q-bits",
            "16",
            "--p-bits",
            "32",
            "--seed",
            seed,
            "--out",
            s(&params)
        ])),
        0
    );
    let mut keys = Vec::new();
    for uid in 1..=5 {
        let path = dir.join(format!("key-{uid}.txt"));
        let seed = (100 + uid).to_string();
        let uid = uid.to_string();
        let res = dtms(&[
            "gen-keypair",
            "--params",
            s(&params),
            "--seed",
            &seed,
            "--uid",
            &uid,
            "--out",
            s(&path),
        ]);
        assert_eq!(code(&res), 0);
        keys.push(path);
    }
    let receiver = dir.join("receiver.txt");
    let res = dtms(&[
        "gen-keypair",
        "--params",
        s(&params),
        "--seed",
        "7",
        "--out",
        s(&receiver),
    ]);
    let y_line = String::from_utf8_lossy(&res.stdout).trim().to_string();
    let receiver_pub = y_line.rsplit(' ').next().unwrap().to_string();
    (params, keys, receiver, receiver_pub)
}

#[test]
fn random_pipeline_is_deterministic_and_accepts() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let (params, keys, receiver, receiver_pub) = random_group(d, "5");

    let members = d.join("members.txt");
    let mut args = vec!["members", "--out", s(&members)];
    for k in &keys {
        args.extend(["--key", s(k)]);
    }
    assert_eq!(code(&dtms(&args)), 0);
    let board = d.join("board.txt");
    let res = dtms(&[
        "dealer-setup",
        "--params",
        s(&params),
        "--t",
        "3",
        "--members",
        s(&members),
        "--seed",
        "9",
        "--out",
        s(&board),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));

    let sign = |out: &Path| {
        dtms(&[
            "sign",
            "--params",
            s(&params),
            "--board",
            s(&board),
            "--member-secret",
            s(&keys[0]),
            "--member-secret",
            s(&keys[2]),
            "--member-secret",
            s(&keys[4]),
            "--subset",
            "1,3,5",
            "--receiver-pub",
            &receiver_pub,
            "--message-hex",
            "c0ffee",
            "--seed",
            "11",
            "--out-dir",
            s(out),
        ])
    };
    let (r1, r2) = (d.join("r1"), d.join("r2"));
    assert_eq!(code(&sign(&r1)), 0);
    assert_eq!(code(&sign(&r2)), 0);
    for f in [
        "partial-1.txt",
        "partial-3.txt",
        "partial-5.txt",
        "session.txt",
    ] {
        assert_eq!(
            fs::read(r1.join(f)).unwrap(),
            fs::read(r2.join(f)).unwrap(),
            "{f}"
        );
    }

    let sig = d.join("sig.txt");
    let res = dtms(&[
        "combine",
        "--params",
        s(&params),
        "--board",
        s(&board),
        "--session",
        s(&r1.join("session.txt")),
        "--out",
        s(&sig),
        "--partials",
        s(&r1.join("partial-1.txt")),
        s(&r1.join("partial-3.txt")),
        s(&r1.join("partial-5.txt")),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let res = dtms(&[
        "verify",
        "--params",
        s(&params),
        "--board",
        s(&board),
        "--sig",
        s(&sig),
        "--receiver-secret",
        s(&receiver),
    ]);
    assert_eq!(code(&res), 0);
    let res = dtms(&[
        "verify",
        "--params",
        s(&params),
        "--board",
        s(&board),
        "--sig",
        s(&sig),
        "--receiver-secret",
        s(&keys[1]),
    ]);
    assert_eq!(code(&res), 1);

    let confirm = |tag: &str| {
        let pkg = d.join(format!("pkg-{tag}.txt"));
        let tr = d.join(format!("tr-{tag}.txt"));
        let res = dtms(&[
            "confirm",
            "--params",
            s(&params),
            "--board",
            s(&board),
            "--sig",
            s(&sig),
            "--receiver-secret",
            s(&receiver),
            "--seed",
            "3",
            "--out-package",
            s(&pkg),
            "--out-transcript",
            s(&tr),
        ]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        (fs::read(pkg).unwrap(), fs::read(tr).unwrap())
    };
    assert_eq!(confirm("a"), confirm("b"));
}

#[test]
fn single_member_board() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let params = d.join("params.txt");
    assert_eq!(
        code(&dtms(&[
            "gen-params",
            "--fixed",
            "47,23,25",
            "--out",
            s(&params)
        ])),
        0
    );
    let p: GroupParams = Record::from_text(&fs::read_to_string(&params).unwrap()).unwrap();
    assert_eq!((p.p, p.q, p.g), (47u32.into(), 23u32.into(), 25u32.into()));
    let key = key_file(d, "k.txt", Some(3), 5);
    let members = d.join("members.txt");
    assert_eq!(
        code(&dtms(&["members", "--key", s(&key), "--out", s(&members)])),
        0
    );
    let board = d.join("board.txt");
    let res = dtms(&[
        "dealer-setup",
        "--params",
        s(&params),
        "--t",
        "1",
        "--members",
        s(&members),
        "--seed",
        "1",
        "--out",
        s(&board),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let b: DealerPublicBoard = Record::from_text(&fs::read_to_string(&board).unwrap()).unwrap();
    assert_eq!(b.members.len(), 1);
    assert_eq!(b.threshold, 1);
}

#[test]
fn standard_size_params_validate() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.txt");
    let res = dtms(&[
        "gen-params",
        "--q-bits",
        "160",
        "--p-bits",
        "512",
        "--seed",
        "1",
        "--out",
        s(&params),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&params).unwrap();
    let p: GroupParams = Record::from_text(&text).unwrap();
    assert!(validate_params(&p).is_ok());
    assert_eq!(p.q.bits(), 160);
    assert_eq!(p.p.bits(), 512);
    assert_eq!(p.to_text(), text);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(code(&dtms(&["no-such-command"])), 2);
    assert_eq!(
        code(&dtms(&[
            "gen-params",
            "--fixture",
            "other",
            "--out",
            "/dev/null"
        ])),
        2
    );
    assert_eq!(
        code(&dtms(&["simulate", "--scenario", "honest", "--seed", "-1"])),
        2
    );
    assert_eq!(
        code(&dtms(&[
            "simulate",
            "--scenario",
            "nonsense",
            "--seed",
            "1"
        ])),
        2
    );

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "%DTMS v1 sig\nss = 2\nss = 3\n").unwrap();
    let w = worked_setup();
    let res = dtms(&[
        "verify",
        "--params",
        s(&w.params),
        "--board",
        s(&w.board),
        "--sig",
        s(&bad),
        "--receiver-secret",
        s(&w.receiver),
    ]);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("duplicate key"));
}

#[test]
fn simulate_exit_codes_follow_outcome() {
    let res = dtms(&["simulate", "--scenario", "honest", "--seed", "4"]);
    assert_eq!(code(&res), 0);
    let out = String::from_utf8_lossy(&res.stdout);
    assert_eq!(out.lines().last(), Some("outcome | accept"));
    assert_eq!(
        code(&dtms(&[
            "simulate",
            "--scenario",
            "forge_signature",
            "--seed",
            "4",
            "--mode",
            "generated"
        ])),
        1
    );
    let again = dtms(&["simulate", "--scenario", "honest", "--seed", "4"]);
    assert_eq!(res.stdout, again.stdout);
}
