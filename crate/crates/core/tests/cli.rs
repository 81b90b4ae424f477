use std::path::Path;
use std::process::{Command, Output};

use hedgebench::environments::INSTANCE_IDS;
use hedgebench::learners::LearnerId;

fn hedgebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hedgebench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn help_matches_golden_file() {
    let out = hedgebench(&["--help"]);
    assert!(out.status.success());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/help.txt");
    let expected = std::fs::read_to_string(golden).unwrap();
    assert_eq!(
        stdout(&out),
        expected,
        "regenerate tests/golden/help.txt if the change is intended"
    );
    for id in INSTANCE_IDS {
        assert!(expected.contains(id), "{id}");
    }
    for id in LearnerId::ALL {
        assert!(expected.contains(id.as_str()), "{id}");
    }
}

#[test]
fn unknown_instance_exits_2() {
    let out = hedgebench(&[
        "run",
        "--instance",
        "nope",
        "--algorithms",
        "hedge",
        "--horizon",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("unknown instance: nope"),
        "{}",
        stderr(&out)
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn flag_errors_exit_2() {
    for args in [
        &["run", "--instance", "fig-a", "--horizon", "0"][..],
        &[
            "run",
            "--instance",
            "fig-a",
            "--horizon",
            "5",
            "--format",
            "xml",
        ],
        &[
            "run",
            "--instance",
            "fig-a",
            "--horizon",
            "5",
            "--algorithms",
            "hedge",
            "--c0",
            "adahedge=1",
        ],
        &["reproduce", "e"],
        &["bounds", "--id", "nope"],
        &["bounds", "--id", "thm1", "--M", "10"],
        &["frobnicate"],
    ] {
        assert_eq!(hedgebench(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("missing").join("out.csv");
    let out = hedgebench(&[
        "run",
        "--instance",
        "prop3",
        "--horizon",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn constant_hedge_on_two_expert_prop3() {
    let out = hedgebench(&[
        "run",
        "--instance",
        "prop3",
        "--experts",
        "2",
        "--algorithms",
        "hedge_constant",
        "--horizon",
        "4",
        "--trials",
        "1",
        "--seed",
        "0",
        "--c0",
        "hedge_constant=2.828427",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(&fields[..3], ["prop3", "hedge_constant", "4"]);
    let regret: f64 = fields[3].parse().unwrap();
    assert!((regret - 0.8506106).abs() < 1e-7, "{regret}");
}

#[test]
fn run_writes_two_learners_of_rows() {
    let out = hedgebench(&[
        "run",
        "--instance",
        "fig-a",
        "--algorithms",
        "hedge,ftl",
        "--horizon",
        "1024",
        "--trials",
        "5",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(hedgebench::harness::CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    // Checkpoints 1, 2, 4, ..., 1024.
    assert_eq!(rows.len(), 2 * 11);
    assert!(rows[..11].iter().all(|r| r.starts_with("fig-a,hedge,")));
    assert!(rows[11..].iter().all(|r| r.starts_with("fig-a,ftl,")));
    assert!(rows.iter().all(|r| r.ends_with(",5")));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "run",
        "--instance",
        "fig-c",
        "--horizon",
        "500",
        "--trials",
        "6",
        "--seed",
        "11",
        "--checkpoint-every",
        "50",
    ];
    let a = hedgebench(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_hedgebench"))
        .args(args)
        .env("HEDGEBENCH_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = hedgebench(&[
        "run",
        "--instance",
        "fig-c",
        "--horizon",
        "500",
        "--trials",
        "6",
        "--seed",
        "12",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_mirrors_csv() {
    let common = [
        "run",
        "--instance",
        "t4",
        "--horizon",
        "64",
        "--algorithms",
        "hedge,adahedge",
    ];
    let csv = stdout(&hedgebench(&common));
    let mut args = common.to_vec();
    args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&hedgebench(&args))).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    for (row, line) in rows.iter().zip(csv.lines().skip(1)) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(row["learner"], f[1]);
        assert_eq!(row["t"].as_u64().unwrap().to_string(), f[2]);
        // serde_json's default float parser is not correctly rounded.
        let (a, b) = (
            row["mean_regret"].as_f64().unwrap(),
            f[3].parse::<f64>().unwrap(),
        );
        assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "instance = \"prop3\"\nlearners = [\"ftl\", \"hedge\"]\nhorizon = 8\n\n[params]\nexperts = 2\n",
    )
    .unwrap();
    let from_file = stdout(&hedgebench(&["run", "--config", path.to_str().unwrap()]));
    assert!(from_file
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("prop3,ftl,1,"));
    assert_eq!(from_file.lines().count(), 1 + 2 * 4);
    let overridden = stdout(&hedgebench(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--horizon",
        "2",
    ]));
    assert_eq!(overridden.lines().count(), 1 + 2 * 2);
}

#[test]
fn bounds_json() {
    let out = hedgebench(&[
        "bounds", "--id", "thm5", "--M", "10", "--delta", "0.1", "--c0", "2", "--T", "100",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["direction"], "lower");
    assert!((v["value"].as_f64().unwrap() - 2.619606902939082e-4).abs() < 1e-15);

    let out = hedgebench(&[
        "bounds", "--id", "prop2", "--M", "10", "--delta", "0.1", "--T", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("T ≥ lnM/(16Δ²)"));
}

#[test]
fn reproduce_writes_panel_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = hedgebench(&[
        "reproduce",
        "d",
        "--horizon",
        "512",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("figure1_d.csv")).unwrap();
    for id in LearnerId::ALL {
        assert!(text.contains(&format!("fig-d,{id},512,")), "{id}");
    }
    // Single deterministic trial: zero spread everywhere.
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0,1")));
}
