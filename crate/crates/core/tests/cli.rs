use std::io::Write;
use std::process::{Command, Output, Stdio};

fn rankone(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("wait")
}

#[test]
fn malformed_json_is_exit_two_without_report() {
    let out = rankone(&["solve-binomial"], "{not json");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_command_rejected() {
    let out = rankone(&["frobnicate"], "{}");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn solve_then_verify() {
    let sys = r#"{"dim": 2, "equations": [{"exponents": [2, 0], "rhs": "1/2"}]}"#;
    let out = rankone(&["solve-binomial"], sys);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.ends_with('\n'));
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let job = serde_json::json!({
        "command": "solve-binomial",
        "input": serde_json::from_str::<serde_json::Value>(sys).unwrap(),
        "report": report,
    });
    let out = rankone(&["verify"], &job.to_string());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn output_is_deterministic() {
    let a = rankone(&["teichmuller"], r#"{"p": 7, "xi": 3, "prec": 12}"#);
    let b = rankone(&["teichmuller", "--seed", "9"], r#"{"p": 7, "xi": 3, "prec": 12}"#);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
