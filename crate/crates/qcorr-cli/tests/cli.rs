//! End-to-end checks of the binary: exit codes, envelope shape, known
//! values on stdout, and determinism of the JSON payload.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmpfile(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qcorr-cli-test-{name}"))
}

#[test]
fn bell_pair_prints_its_textbook_values() {
    let out = qcorr(&["pairwise", "--state", "bell"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("mutual information I = 2.000000"),
        "stdout was:\n{text}"
    );
    assert!(text.contains("J = 1.000000"), "stdout was:\n{text}");
    assert!(text.contains("D = 1.000000"), "stdout was:\n{text}");
    assert!(
        text.contains("concurrence = 1.000000"),
        "stdout was:\n{text}"
    );
}

#[test]
fn measured_flag_restricts_the_printed_rows() {
    let out = qcorr(&["pairwise", "--state", "werner:0.8", "--measured", "b"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("measure b"), "stdout was:\n{text}");
    assert!(!text.contains("measure a"), "stdout was:\n{text}");
}

#[test]
fn three_qubit_state_needs_and_honors_the_pair_flag() {
    let missing = qcorr(&["pairwise", "--state", "ghz"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--pair"));

    let out = qcorr(&["pairwise", "--state", "ghz", "--pair", "ac"]);
    assert!(out.status.success());
    // tracing out one GHZ qubit kills the entanglement of the rest
    assert!(stdout(&out).contains("concurrence = 0.000000"));
}

#[test]
fn usage_problems_exit_2() {
    let cases: &[&[&str]] = &[
        &["pairwise", "--state", "no-such-name"],
        &["pairwise", "--state", "werner:1.5"],
        &["pairwise", "--state", "bell", "--pair", "ab"],
        &["pairwise", "--state", "bell", "--measured", "z"],
        &["tripartite", "--state", "ghz", "--policy", "nonsense"],
        &["tripartite", "--state", "ghz", "--policy", "ab=b,ac=min"],
        &["tripartite", "--state", "ghz", "--convention", "other"],
        &["tripartite", "--state", "bell"],
        &["search", "--mode", "warp"],
        &["search", "--mode", "family-grid", "--steps", "1"],
        &["search", "--mode", "family-grid", "--rank", "2"],
        &["search", "--mode", "mixed-random", "--rank", "9"],
        &[
            "search",
            "--mode",
            "mixed-random",
            "--policy",
            "ab=b,ac=min,bc=b",
        ],
        &["search", "--mode", "family-random", "--objective", "weird"],
    ];
    for args in cases {
        let out = qcorr(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "expected exit 2 for {args:?}, stderr: {}",
            stderr(&out),
        );
        assert!(
            stderr(&out).starts_with("error: "),
            "stderr for {args:?}: {}",
            stderr(&out)
        );
    }
}

#[test]
fn io_problems_exit_3() {
    let out = qcorr(&["pairwise", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));

    let grid = tmpfile("unwritable/out.json");
    let out = qcorr(&[
        "search",
        "--mode",
        "family-grid",
        "--steps",
        "2",
        "--json",
        grid.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_state_files_exit_2() {
    let path = tmpfile("malformed.json");
    std::fs::write(&path, "{\"dims\": [2, 2]}").unwrap();
    let out = qcorr(&["pairwise", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    std::fs::remove_file(&path).ok();

    // a parseable file that is not a density matrix also exits 2
    let path = tmpfile("not-a-state.json");
    std::fs::write(
        &path,
        r#"{"dims": [2], "labels": ["a"], "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}"#,
    )
    .unwrap();
    let out = qcorr(&["pairwise", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    std::fs::remove_file(&path).ok();
}

#[test]
fn envelope_carries_the_run_description() {
    let path = tmpfile("envelope.json");
    let out = qcorr(&[
        "tripartite",
        "--state",
        "ghz",
        "--convention",
        "conv-singleton",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let envelope: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();

    assert_eq!(envelope["tool"], "qcorr");
    assert_eq!(envelope["base"], "bits");
    assert!(envelope["version"].is_string());
    assert!(envelope["meta"]["wall_ms"].is_number());
    let command: Vec<String> = envelope["command"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(command.iter().any(|c| c == "tripartite"));

    let payload = &envelope["payload"];
    assert_eq!(payload["labels"], serde_json::json!(["a", "b", "c"]));
    // GHZ: every pair carries one bit, the peel split is (1, 1), the
    // subtractive split under the singleton convention is (0, 2)
    assert!((payload["total_information"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((payload["def1_split"]["classical"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((payload["def2_split"]["classical"].as_f64().unwrap() - 0.0).abs() < 1e-6);
    assert!((payload["def2_split"]["quantum"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn json_to_stdout_and_to_file_agree() {
    let path = tmpfile("stdout-vs-file.json");
    let to_file = qcorr(&[
        "pairwise",
        "--state",
        "werner:0.5",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    let from_file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();

    let to_stdout = qcorr(&["pairwise", "--state", "werner:0.5", "--json", "-"]);
    assert!(to_stdout.status.success());
    let text = stdout(&to_stdout);
    let json_start = text.find("{\n").expect("envelope starts after the table");
    let from_stdout: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();

    assert_eq!(from_file["payload"], from_stdout["payload"]);
}

#[test]
fn search_payload_is_deterministic_across_runs_and_threads() {
    let mut payloads = Vec::new();
    for (threads, name) in [
        ("1", "det-a.json"),
        ("1", "det-b.json"),
        ("3", "det-c.json"),
    ] {
        let path = tmpfile(name);
        let out = qcorr(&[
            "search",
            "--mode",
            "family-random",
            "--samples",
            "25",
            "--seed",
            "11",
            "--threads",
            threads,
            "--json",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        let envelope: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        payloads.push(serde_json::to_string(&envelope["payload"]).unwrap());
        std::fs::remove_file(&path).ok();
    }
    assert_eq!(payloads[0], payloads[1], "same spec, two runs");
    assert_eq!(
        payloads[0], payloads[2],
        "same spec, different thread count"
    );
}

#[test]
fn reproduce_emits_the_quoted_value_table_and_succeeds() {
    let path = tmpfile("reproduce.json");
    let out = qcorr(&["reproduce", "--json", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("step 1 FAIL"), "stdout was:\n{text}");
    assert!(text.contains("within 0.02"), "stdout was:\n{text}");
    assert!(
        text.contains("construction invariants hold"),
        "stdout was:\n{text}"
    );

    let envelope: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(envelope["seed"], 0);
    let payload = &envelope["payload"];
    assert_eq!(payload["chain"]["overall"], false);
    assert_eq!(
        payload["chain"]["discrepancies"].as_array().unwrap().len(),
        4
    );
    assert_eq!(payload["structural_failures"].as_array().unwrap().len(), 0);
    assert!(payload["purification"]["corrected_ok"].as_bool().unwrap());
}

#[test]
fn pi_expressions_match_plain_radians() {
    let by_pi = qcorr(&[
        "pairwise",
        "--state",
        "counterexample:0.1,3pi/10,0.7,pi/5",
        "--pair",
        "ac",
    ]);
    let by_dec = qcorr(&[
        "pairwise",
        "--state",
        "counterexample:0.1,0.9424777960769379,0.7,0.6283185307179586",
        "--pair",
        "ac",
    ]);
    assert!(by_pi.status.success() && by_dec.status.success());
    assert_eq!(stdout(&by_pi), stdout(&by_dec));
}
