use std::fs;

use liftlab_cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use liftlab_core::cover::TkFamily;
use liftlab_core::slack::slack_perm;
use liftlab_core::RatMatrix;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["liftlab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn factorize_perm_verifies() {
    let (code, out, _) = call(&["factorize", "--polytope", "perm", "--n", "4", "--gen", "quadratic", "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify: equal"));
    assert!(out.contains("factorization size 12"));
}

#[test]
fn factorize_spt_and_match_verify() {
    for args in [
        ["factorize", "--polytope", "spt", "--n", "4", "--verify"],
        ["factorize", "--polytope", "match", "--n", "4", "--verify"],
    ] {
        let (code, out, err) = call(&args);
        assert_eq!(code, EXIT_OK, "{out}{err}");
    }
}

#[test]
fn broken_network_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.net");
    // quadratic(4) without (1,3)
    fs::write(&path, "4 5\n1 4\n1 2\n2 4\n2 3\n3 4\n").unwrap();
    let (code, out, _) = call(&["sortnet", "check", "--file", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("not a sorting network"));
    let good = dir.path().join("good.net");
    let (code, _, _) = call(&["sortnet", "generate", "--kind", "batcher", "--n", "6", "--out", good.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = call(&["sortnet", "check", "--file", good.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn minimality_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.net");
    fs::write(&q, "4 6\n1 4\n1 3\n1 2\n2 4\n2 3\n3 4\n").unwrap();
    let (code, out, _) = call(&["sortnet", "minimality", "--file", q.to_str().unwrap(), "--mode", "exhaustive"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let dup = dir.path().join("dup.net");
    fs::write(&dup, "3 4\n1 3\n1 2\n2 3\n2 3\n").unwrap();
    let (code, out, _) = call(&["sortnet", "minimality", "--file", dup.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.starts_with("redundant"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["slack", "--polytope", "perm", "--n", "99"]).0, EXIT_USAGE);
    assert_eq!(call(&["slack", "--polytope", "perm", "--n", "4", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
    assert_eq!(call(&["slack", "--polytope", "spt"]).0, EXIT_USAGE);
    assert_eq!(call(&["sortnet", "check", "--file", "/nonexistent/x.net"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["simulate", "--protocol", "perm", "--n", "3", "--x", "{9}", "--y", "123"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown x label"));
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("factorize"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["simulate", "--protocol", "spt", "--n", "4", "--x", "{1,2}", "--y", "{{1,2},{1,3},{1,4}}", "--trials", "3000"],
        &["goemans", "verify", "--n", "3", "--samples", "50", "--seed", "11"],
        &["report", "--format", "json"],
    ];
    for args in cases {
        let first = call(args);
        let second = call(args);
        assert_eq!(first.0, EXIT_OK, "{}{}", first.1, first.2);
        assert_eq!(first, second);
    }
}

#[test]
fn seed_changes_simulation() {
    let base = ["simulate", "--protocol", "perm", "--n", "4", "--x", "{1,3}", "--y", "4321", "--trials", "2000"];
    let a = call(&[&base[..], &["--seed", "1"]].concat());
    let b = call(&[&base[..], &["--seed", "2"]].concat());
    assert_ne!(a.1, b.1);
    assert!(a.1.contains("exact    3 "));
}

#[test]
fn slack_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let (code, _, _) = call(&["slack", "--polytope", "perm", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let m = RatMatrix::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m, slack_perm(4).unwrap().matrix);
    let (_, stdout, _) = call(&["slack", "--polytope", "perm", "--n", "4"]);
    assert_eq!(RatMatrix::from_json(&stdout).unwrap(), m);
}

#[test]
fn tk_file_round_trips_and_feeds_factorize() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tk.json");
    let (code, _, _) = call(&["cover", "tk", "--n", "6", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let family = TkFamily::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((family.n, family.k), (6, 2));
    let args = ["factorize", "--polytope", "match", "--n", "6", "--tk", path.to_str().unwrap(), "--verify"];
    assert_eq!(call(&args).0, EXIT_OK);

    let partial = dir.path().join("partial.json");
    fs::write(&partial, r#"{"n":6,"k":2,"sets":[[1,2]]}"#).unwrap();
    let args = ["factorize", "--polytope", "match", "--n", "6", "--tk", partial.to_str().unwrap()];
    let (code, _, err) = call(&args);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("does not cover"));
}

#[test]
fn report_json_parses() {
    let (code, out, _) = call(&["report", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["pass"] == true));
    assert_eq!(rows[1]["factorization_size"], 12);
}

#[test]
fn verify_and_fooling() {
    assert_eq!(call(&["verify", "--protocol", "perm-two-round", "--n", "4", "--gen", "batcher"]).0, EXIT_OK);
    let (code, out, _) = call(&["fooling", "--n", "6"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("size 30"));
}
