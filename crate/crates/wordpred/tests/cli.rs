use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn wordpred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordpred")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = wordpred(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn metric_golden_values() {
    assert_eq!(stdout(&["metric", "reduction", "219", "108"]), "49.31\n");
    assert_eq!(stdout(&["metric", "reduction", "277.2", "32.8"]), "11.83\n");
    assert_eq!(stdout(&["metric", "improvement", "6", "0"]), "100.00\n");
    assert_eq!(stdout(&["metric", "improvement", "4", "2"]), "50.00\n");
    assert_eq!(stdout(&["metric", "discovery", "0.31", "5"]), "0.8436\n");
    assert_eq!(stdout(&["metric", "savings", "100", "100"]), "0.00\n");
}

#[test]
fn metric_json_carries_full_precision() {
    let out = stdout(&["metric", "reduction", "219", "108", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metric"], "reduction");
    assert!((v["value"].as_f64().unwrap() - 10800.0 / 219.0).abs() < 1e-12);
}

#[test]
fn metric_domain_errors_exit_2() {
    for args in [
        &["metric", "reduction", "0", "1"][..],
        &["metric", "improvement", "0", "1"],
        &["metric", "discovery", "1.5", "2"],
    ] {
        let out = wordpred(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn complete_golden_output() {
    let corpus = fixture("demo.txt");
    assert_eq!(stdout(&["complete", "--corpus", &corpus, "ca"]), "1\tcat\t5\n2\tcab\t3\n3\tcar\t3\n");
    assert_eq!(
        stdout(&["complete", "--corpus", &corpus, "--page-size", "2", "--page", "1", ""]),
        "3\tcab\t3\n4\tcar\t3\n"
    );
}

#[test]
fn complete_is_byte_stable() {
    let corpus = fixture("essay.txt");
    let args = ["complete", "--corpus", &corpus, "--page-size", "50", "h"];
    let first = stdout(&args);
    assert!(!first.is_empty());
    for _ in 0..3 {
        assert_eq!(stdout(&args), first);
    }
}

#[test]
fn complete_empty_result_and_missing_file() {
    assert_eq!(stdout(&["complete", "--corpus", &fixture("demo.txt"), "zz"]), "");
    let out = wordpred(&["complete", "--corpus", "/nonexistent/corpus.txt", "ca"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/corpus.txt"));
}

#[test]
fn parse_errors_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "cat\t5\n# ok\ncar\tthree\n").unwrap();
    let out = wordpred(&["complete", "--corpus", bad.to_str().unwrap(), "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn complete_json() {
    let out = stdout(&["complete", "--corpus", &fixture("demo.txt"), "--json", "ca"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "completion");
    assert_eq!(v["candidates"][0]["word"], "cat");
    assert_eq!(v["candidates"][0]["rank"], 1);
    assert_eq!(v["total_pages"], 1);
}

#[test]
fn complete_applies_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("u.profile");
    std::fs::write(&profile, "[meta]\nusername=u\ncorpus_tag=demo\n[deltas]\ncar=3\n[custom]\ncaboose=1\n[end]\n").unwrap();
    let out = stdout(&["complete", "--corpus", &fixture("demo.txt"), "--profile", profile.to_str().unwrap(), "ca"]);
    assert_eq!(out, "1\tcar\t6\n2\tcat\t5\n3\tcab\t3\n4\tcaboose\t1\n");
}

#[test]
fn predict_uses_bigrams_then_fallback() {
    let corpus = fixture("demo.txt");
    assert_eq!(stdout(&["predict", "--corpus", &corpus, "my"]), "1\tcat\t4\n2\tcar\t1\n");
    assert_eq!(stdout(&["predict", "--corpus", &corpus, "--page-size", "2", "dog"]), "1\tmy\t9\n2\tcat\t5\n");
}

#[test]
fn page_out_of_range_exits_2() {
    let out = wordpred(&["complete", "--corpus", &fixture("demo.txt"), "--page", "3", "ca"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_abracadabra() {
    let dir = tempfile::tempdir().unwrap();
    let messages = dir.path().join("m.txt");
    std::fs::write(&messages, "abracadabra\n").unwrap();
    let out = stdout(&["simulate", "--corpus", &fixture("abracadabra.txt"), messages.to_str().unwrap()]);
    assert_eq!(
        out,
        "session\tmessage\tunaided\taided\treduced\treduction_pct_paper\tsavings_pct_standard\n\
         1\t1\t11\t2\t9\t450.00\t81.81\n\
         1\tmean\t11.00\t2.00\t9.00\t450.00\t81.81\n"
    );
}

#[test]
fn simulate_sessions_adapt() {
    let out = stdout(&[
        "simulate",
        "--corpus",
        &fixture("essay.txt"),
        "--sessions",
        "2",
        "--json",
        &fixture("messages.txt"),
    ]);
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2 * (5 + 1));
    let means: Vec<f64> = rows.iter().filter(|r| r["row"] == "mean").map(|r| r["aided"].as_f64().unwrap()).collect();
    assert_eq!(means.len(), 2);
    assert!(means[1] <= means[0]);
    for r in rows.iter().filter(|r| r["row"] == "message") {
        assert!(r["aided"].as_f64().unwrap() <= r["unaided"].as_f64().unwrap());
    }
}

#[test]
fn simulate_saves_adapted_profile() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("after.profile");
    stdout(&[
        "simulate",
        "--corpus",
        &fixture("essay.txt"),
        "--save-profile",
        saved.to_str().unwrap(),
        &fixture("messages.txt"),
    ]);
    let text = std::fs::read_to_string(&saved).unwrap();
    assert!(text.contains("father="), "{text}");
}

#[test]
fn simulate_empty_messages_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let messages = dir.path().join("m.txt");
    std::fs::write(&messages, "\n\n").unwrap();
    let out = wordpred(&["simulate", "--corpus", &fixture("demo.txt"), messages.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_lexicon_merges_and_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let extra = dir.path().join("extra.txt");
    std::fs::write(&extra, "cat\t2\nzebra\t1\n").unwrap();
    let merged = stdout(&["build-lexicon", "--corpus", &fixture("demo.txt"), "--corpus", extra.to_str().unwrap()]);
    assert!(merged.contains("cat\t7\n"));
    assert!(merged.contains("zebra\t1\n"));
    assert!(merged.contains("[bigrams]\nmy\tcar\t1\nmy\tcat\t4\n"));

    let out = dir.path().join("merged.txt");
    stdout(&["build-lexicon", "--corpus", &fixture("demo.txt"), "--output", out.to_str().unwrap()]);
    let rebuilt = stdout(&["build-lexicon", "--corpus", &format!("demo={}", out.display())]);
    assert_eq!(rebuilt, std::fs::read_to_string(&out).unwrap());
}

#[test]
fn invalid_flag_values_are_rejected() {
    let out = wordpred(&["complete", "--corpus", &fixture("demo.txt"), "--page-size", "0", "ca"]);
    assert_eq!(out.status.code(), Some(2));
}
