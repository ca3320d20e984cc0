use std::io::Cursor;
use std::path::PathBuf;

use cl15_cli::{play_session, run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use cl15_core::calculus::fixture_p1;
use cl15_core::formula::Atom;
use cl15_core::games::{interpret_cirquent, EnumerationGame, Interpretation};
use cl15_core::runs::{parse_run, Player};
use cl15_core::strategy::{extract_solution, simulate, ScriptedEnv};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn path(rel: &str) -> String {
    root().join(rel).to_string_lossy().into_owned()
}

fn cl15(args: &[&str], input: &str) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cl15").chain(args.iter().copied());
    let code = run(argv, &mut Cursor::new(input.as_bytes()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_p1() {
    let (code, out, _) = cl15(&["check", &path("fixtures/p1.proof")], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, "ok (2 steps)\n"));
}

#[test]
fn check_p2() {
    let (code, out, _) = cl15(&["check", &path("fixtures/p2.proof")], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, "ok (5 steps)\n"));
}

#[test]
fn check_broken() {
    let (code, out, _) = cl15(&["check", &path("fixtures/p1-broken.proof")], "");
    assert_eq!(code, EXIT_FAIL);
    assert!(out.starts_with("step 2: "), "{out}");
}

#[test]
fn project_cell_example() {
    let (code, out, _) = cl15(&["project", "--cell", "1", "--coords", "1,2", &path("runs/example.run")], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, "T beta\nB gamma\n"));
}

#[test]
fn project_prefix_and_branch() {
    let dir = std::env::temp_dir().join(format!("cl15-project-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("g.run");
    std::fs::write(&f, "B 10.alpha\nT 111.beta\nB 1.gamma\nB 00.alpha\n").unwrap();
    let f = f.to_string_lossy().into_owned();
    let (_, out, _) = cl15(&["project", "--branch", ":1", &f], "");
    assert_eq!(out, "T beta\nB gamma\n");
    let (_, out, _) = cl15(&["project", "--prefix", "1.", &f], "");
    assert_eq!(out, "B gamma\n");
    let (_, out, _) = cl15(&["project", "--prefix", "1", &f], "");
    assert_eq!(out, "B 0.alpha\nT 11.beta\nB .gamma\n");
}

#[test]
fn project_needs_one_projector() {
    let (code, _, err) = cl15(&["project", &path("runs/example.run")], "");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("exactly one"));
}

#[test]
fn usage_errors() {
    assert_eq!(cl15(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(cl15(&["check", "/no/such/file.proof"], "").0, EXIT_USAGE);
    assert_eq!(cl15(&["demo-separation", "--k", "0"], "").0, EXIT_USAGE);
    assert_eq!(cl15(&["demo-separation", "--machine", "oracle"], "").0, EXIT_USAGE);
    assert_eq!(cl15(&["--help"], "").0, EXIT_OK);
}

#[test]
fn extract_then_simulate() {
    let dir = std::env::temp_dir().join(format!("cl15-extract-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let manifest = dir.join("p2.strategy").to_string_lossy().into_owned();
    let (code, _, _) = cl15(&["extract", &path("fixtures/p2.proof"), "--out", &manifest, "--formula-level"], "");
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.starts_with("cl15-strategy\n") && text.contains("level: formula"));
    for adversary in ["silent", "random", "structural"] {
        for seed in ["1", "2", "3"] {
            let (code, out, err) = cl15(&["simulate", &manifest, "--adversary", adversary, "--seed", seed], "");
            assert_eq!(code, EXIT_OK, "{out}{err}");
            assert!(out.contains("pass=true"));
        }
    }
}

#[test]
fn extract_rejects_broken_proof() {
    let out = std::env::temp_dir().join("cl15-never-written.strategy");
    let (code, _, _) = cl15(&["extract", &path("fixtures/p1-broken.proof"), "--out", &out.to_string_lossy()], "");
    assert_eq!(code, EXIT_FAIL);
}

#[test]
fn simulate_with_interpretation_file_and_trace() {
    let (code, out, _) = cl15(
        &["simulate", &path("fixtures/p1.proof"), "--interp", &path("fixtures/p.interp"), "--trace"],
        "",
    );
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().last().unwrap().starts_with("winner: T grants:"), "{out}");
}

#[test]
fn simulate_scripted_copy_test() {
    let dir = std::env::temp_dir().join(format!("cl15-script-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let script = dir.join("env.run");
    std::fs::write(&script, "B 1;1.2.a\n").unwrap();
    let spec = format!("script:{}", script.display());
    let (code, out, _) = cl15(
        &["simulate", &path("fixtures/p1.proof"), "--interp", &path("fixtures/p.interp"), "--adversary", &spec],
        "",
    );
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("run: <B1;1.2.a, T1;1.1.a>"), "{out}");
}

#[test]
fn demo_separation_granter() {
    let (code, out, _) = cl15(&["demo-separation", "--k", "8"], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("pairwise distinct: true"));
    assert!(out.contains("winner under that interpretation: B"));
    assert!(out.trim_end().ends_with("consistent at bound k=8"));
}

#[test]
fn demo_separation_rotating() {
    let (_, out, _) = cl15(&["demo-separation", "--machine", "rotating:2", "--k", "6"], "");
    assert!(out.contains("verdict:"));
}

#[test]
fn play_copycat_answer() {
    let (code, out, _) = cl15(
        &["play", &path("fixtures/p1.proof"), "--interp", &path("fixtures/p.interp")],
        "1;1.2.a\nquit\n",
    );
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("M:1;1.1.a"), "{out}");
    assert!(out.contains("winner: T"));
}

#[test]
fn play_quit_immediately() {
    let (code, out, _) = cl15(&["play", &path("fixtures/p1.proof"), "--seed", "4"], "quit\n");
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("final position: <>"));
}

#[test]
fn play_reprompts_on_malformed_input() {
    let (_, out, _) = cl15(
        &["play", &path("fixtures/p1.proof"), "--interp", &path("fixtures/p.interp")],
        "two words\n\n1;1.2.a\nquit\n",
    );
    assert_eq!(out.matches("malformed input").count(), 2);
    assert!(out.contains("final position: <B1;1.2.a, T1;1.1.a>"));
}

#[test]
fn play_transcript_replays_through_simulate() {
    let p = fixture_p1();
    let c = p.last().unwrap().clone();
    let interp = Interpretation::new().with(Atom::new("P").unwrap(), std::sync::Arc::new(EnumerationGame::always_top()));
    let g = interpret_cirquent(&c, &interp).unwrap();
    let mut m = extract_solution(&p, false).unwrap();
    let mut out = Vec::new();
    let input = "1;1.2.7\n1;1.1.3\n1;1.2.0\nquit\n";
    let played = play_session(m.as_mut(), &g, 50, &mut Cursor::new(input.as_bytes()), &mut out).unwrap();

    let human: Vec<_> = played.iter().filter(|lm| lm.player == Player::Bot).map(|lm| lm.mv.clone()).collect();
    let mut m = extract_solution(&p, false).unwrap();
    let replay = simulate(m.as_mut(), &mut ScriptedEnv::new(human), g.as_ref(), 50).unwrap();
    assert_eq!(replay.run, played);
    assert_eq!(played.len(), 6);
}

#[test]
fn play_writes_transcript() {
    let dir = std::env::temp_dir().join(format!("cl15-play-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let t = dir.join("t.run");
    let (_, _, _) = cl15(
        &[
            "play",
            &path("fixtures/p1.proof"),
            "--interp",
            &path("fixtures/p.interp"),
            "--transcript",
            &t.to_string_lossy(),
        ],
        "1;1.2.a\nquit\n",
    );
    let run = parse_run(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(run.len(), 2);
}
