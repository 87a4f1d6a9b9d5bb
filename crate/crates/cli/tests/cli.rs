use std::path::Path;
use std::process::{Command, Output};

fn run(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superatlas"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn freeness_dichotomy_on_small_grassmannians() {
    let ws = tempfile::tempdir().unwrap();
    let free = run(ws.path(), &["freeness", "--space", "grass:1,0,2,2"]);
    assert_eq!(code(&free), 0);
    assert!(stdout(&free).contains("Free") && stdout(&free).contains("θ ="));
    let fixed = run(ws.path(), &["freeness", "--space", "grass:1,1,2,2"]);
    assert_eq!(code(&fixed), 1);
    assert!(stdout(&fixed).contains("NotFree") && stdout(&fixed).contains("vanishes at"));
}

#[test]
fn verdict_after_catalog_load_cites_r3() {
    let ws = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(ws.path(), &["catalog", "load"])), 0);
    let v = run(ws.path(), &["verdict", "G(1|1,2|2)", "not-Pi-projective"]);
    assert_eq!(code(&v), 0);
    let text = stdout(&v);
    assert!(text.contains("derived by R3"), "{text}");
    assert!(text.contains("ASSERTED"), "{text}");
    assert!(text.contains("computed"), "{text}");
}

#[test]
fn undetermined_and_refuted_verdicts() {
    let ws = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(ws.path(), &["verdict", "G(1|1,2|2)", "not-Pi-projective"])), 2);
    assert_eq!(code(&run(ws.path(), &["catalog", "load"])), 0);
    assert_eq!(code(&run(ws.path(), &["verdict", "G(1|1,2|2)", "Pi-projective"])), 1);
}

#[test]
fn facts_add_close_and_clash() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    assert_eq!(code(&run(p, &["facts", "add", "X", "non-projective", "--cite", "X is not projective"])), 0);
    assert_eq!(code(&run(p, &["facts", "add", "X", "H1-O-minus-zero", "--cite", "H¹(X,O)⁻ = 0"])), 0);
    assert_eq!(code(&run(p, &["facts", "close"])), 0);
    let shown = stdout(&run(p, &["facts", "show"]));
    assert!(shown.contains("not-Pi-projective(X)"), "{shown}");
    let clash = run(p, &["facts", "add", "X", "projective", "--cite", "contradiction"]);
    assert_eq!(code(&clash), 1);
}

#[test]
fn exit_codes_for_undecided_and_bad_input() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    assert_eq!(code(&run(p, &["freeness", "--even", "x", "--odd", "th", "--image", "th=1+x^2"])), 2);
    assert_eq!(code(&run(p, &["cech", "proj:1,0", "O(-2)", "0"])), 2);
    assert_eq!(code(&run(p, &["no-such-verb"])), 3);
    assert_eq!(code(&run(p, &["freeness", "--space", "grass:1,2"])), 3);
    assert_eq!(code(&run(p, &["verdict", "X", "not-a-predicate"])), 3);
    let bad = p.join("bad.json");
    std::fs::write(&bad, "{\"charts\": [").unwrap();
    let o = run(p, &["cech", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn outputs_are_deterministic() {
    let ws = tempfile::tempdir().unwrap();
    for args in [
        &["--json", "atlas", "grass", "1", "1", "2", "2"][..],
        &["cech", "pi:2", "O", "3"][..],
        &["catalog", "run"][..],
        &["--json", "quotient", "--space", "proj:1,2"][..],
    ] {
        let a = run(ws.path(), args);
        let b = run(ws.path(), args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn saved_atlas_reloads_to_the_same_hash() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    let first = stdout(&run(p, &["atlas", "quotient", "proj:2,3", "--save", "pi2"]));
    let second = stdout(&run(p, &["atlas", "show", "@pi2", "--save", "again"]));
    let hash = |s: &str| s.lines().find(|l| l.starts_with("saved atlas")).unwrap().rsplit(' ').next().unwrap().to_string();
    assert_eq!(hash(&first), hash(&second));
    let iso = run(p, &["atlas", "iso", "@pi2", "cy:2"]);
    assert_eq!(code(&iso), 0, "{}", stdout(&iso));
}

#[test]
fn field_documents_round_trip_through_the_workspace() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    let saved = run(p, &["field-check", "--even", "z", "--odd", "th", "--image", "z=th", "--save", "tdz"]);
    assert_eq!(code(&saved), 0);
    let o = run(p, &["freeness", "--field", "@tdz"]);
    assert_eq!(code(&o), 1);
    let not_homological = run(p, &["field-check", "--even", "x", "--odd", "th,ph", "--image", "th=1+th*ph"]);
    assert_eq!(code(&not_homological), 1);
}

#[test]
fn bundle_verbs_report_curvature_and_descent() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    let c = stdout(&run(p, &["curvature", "--space", "proj:1,2", "--degree", "-1"]));
    assert!(c.contains("curvature = -1 (constant)") || c.contains("curvature = 1 (constant)"), "{c}");
    assert_eq!(code(&run(p, &["descend", "--space", "proj:1,2", "--degree", "2"])), 1);
    assert_eq!(code(&run(p, &["descend", "--space", "proj:1,2*proj:1,2", "--degree", "1,-1"])), 0);
    assert_eq!(code(&run(p, &["descend", "--space", "proj:1,2", "--degree", "0"])), 0);
}

#[test]
fn cohomology_and_oracle_verbs() {
    let ws = tempfile::tempdir().unwrap();
    let p = ws.path();
    let o = run(p, &["--json", "oracle", "cech-p1", "-2"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["value"], serde_json::json!([0, 1]));
    let w = stdout(&run(p, &["oracle", "witness", "proj:1,2", "--bound", "1"]));
    assert!(w.contains("-eta0"), "{w}");
    assert_eq!(code(&run(p, &["h1report", "3"])), 0);
    let b = stdout(&run(p, &["--json", "bott", "2", "1", "0"]));
    assert!(b.contains("\"degree\":1"), "{b}");
    let inv = stdout(&run(p, &["cech", "pi:2", "O", "4"]));
    assert!(inv.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["1", "0", "1"]), "{inv}");
    let g = stdout(&run(p, &["gq1", "--odd", "a,b", "1;a", "1;b"]));
    assert!(g.contains("c(p(x), p(y)) = 1 + a*b"), "{g}");
}
