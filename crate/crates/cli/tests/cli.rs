use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nwe-disc"))
}

#[test]
fn analyze_json_is_deterministic_and_correct() {
    let run = || {
        bin()
            .args(["analyze", "--s", "0.5", "--format", "json"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let ud: f64 = text
        .split("\"ud_value\":")
        .nth(1)
        .and_then(|rest| rest.split(',').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((ud - 0.25).abs() < 1e-6, "{text}");
    assert!(text.contains("\"srm_optimal\":true"));
    assert!(text.contains("\"ud_equals_lambda_min\":true"));
    assert!(text.contains("\"locc_ud_attains\":true"));
    assert!(text.contains("\"chen_verdict\":\"not_locc_distinguishable\""));
}

#[test]
fn analyze_rejects_out_of_range_s() {
    for s in ["1.5", "0", "1", "-0.2"] {
        let out = bin().args(["analyze", "--s", s]).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "s={s}");
    }
}

#[test]
fn bad_flags_exit_two() {
    let out = bin().args(["analyze", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_expected_rows() {
    let path = std::env::temp_dir().join(format!("nwe-disc-sweep-{}.csv", std::process::id()));
    let out = bin()
        .args([
            "sweep",
            "--s-min",
            "0.1",
            "--s-max",
            "0.9",
            "--steps",
            "9",
            "--out",
        ])
        .arg(&path)
        .env("NWE_DISC_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(
        lines[0],
        "s,lambda_min,ud_value,srm_success,srm_diag_spread,mu11,mu12,mu14,schmidt_rank,chen_verdict"
    );
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10);
        let s: f64 = fields[0].parse().unwrap();
        let ud: f64 = fields[2].parse().unwrap();
        assert!((ud - (1.0 - s) * (1.0 - s)).abs() < 1e-6);
        let mu11: f64 = fields[5].parse().unwrap();
        assert!(mu11.abs() > 1e-6);
        assert_eq!(fields[9], "not_locc_distinguishable");
    }
    // Rows ascend in s.
    let ss: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(ss.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sweep_rejects_bad_range_and_unwritable_path() {
    let out = bin()
        .args(["sweep", "--s-min", "0.9", "--s-max", "0.1", "--out", "/tmp/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args([
            "sweep",
            "--s-min",
            "0.4",
            "--s-max",
            "0.6",
            "--steps",
            "2",
            "--out",
            "/nonexistent-dir/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn montecarlo_is_reproducible_with_zero_wrong_conclusives() {
    let run = || {
        bin()
            .args([
                "montecarlo", "--s", "0.5", "--trials", "20000", "--seed", "7",
            ])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("\"wrong_conclusive_count\":0"), "{text}");
    assert!(text.contains("\"exact\":2.5000000"));
}

#[test]
fn verify_fast_passes() {
    let out = bin().args(["verify", "--level", "fast"]).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("[PASS]").count(), 9);
}
