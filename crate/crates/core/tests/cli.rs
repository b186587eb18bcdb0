use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_besovclaw"));
    c.args(args);
    match threads {
        Some(t) => c.env("BESOVCLAW_THREADS", t),
        None => c.env_remove("BESOVCLAW_THREADS"),
    };
    c.output().expect("spawn besovclaw")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn solve_then_besov_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("solve");
    let o = run(&["solve", "--nx", "1024", "--tmax", "1.2", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("solution.json").exists());
    let manifest: serde_json::Value = serde_json::from_slice(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["schema_version"], "1.0");

    let b = tmp.path().join("besov");
    let o = run(
        &[
            "besov",
            "--in",
            out.join("solution.json").to_str().unwrap(),
            "--direction",
            "x",
            "--p",
            "3",
            "--out",
            b.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(&b, "besov.svg").starts_with(b"<svg"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = run(&["solve", "--cfl", "1.5", "--out", out], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    let o = run(&["solve", "--flux", "nonsense", "--out", out], None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"], None);
    assert_eq!(o.status.code(), Some(2));

    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "[grid]\nnx = 64\nwat = 1\n").unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = run(&["verify", "lemma-delta", "--pairs", "200", "--out", out], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let dir = tmp.path().join(format!("r{i}"));
        let o = run(
            &[
                "verify",
                "main-theorem",
                "--nx",
                "256",
                "--tmax",
                "1.2",
                "--out",
                dir.to_str().unwrap(),
            ],
            Some(threads),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((read(&dir, "verdicts.csv"), read(&dir, "verdicts.svg"), read(&dir, "ledger.json")));
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn report_merges_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let v = tmp.path().join("v");
    let o = run(&["verify", "one-entropy", "--nx", "256", "--tmax", "1.2", "--out", v.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = tmp.path().join("r");
    let o = run(
        &["report", "--in", v.join("verdicts.csv").to_str().unwrap(), "--out", r.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = String::from_utf8(read(&r, "summary.csv")).unwrap();
    assert!(summary.lines().count() >= 2);
}
