use std::path::Path;
use std::process::{Command, Output};

use kycrec::io::file_sha256;

fn kycrec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kycrec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_run_report() {
    let dir = tempfile::tempdir().unwrap();
    let g = kycrec(&["generate", "--seed", "5", "--out", "w.jsonl"], dir.path());
    assert!(g.status.success(), "{}", stderr(&g));
    assert!(dir.path().join("w.manifest.json").is_file());

    let r = kycrec(&["run", "--world", "w.jsonl", "--out", "run"], dir.path());
    assert!(r.status.success(), "{}", stderr(&r));
    let run = dir.path().join("run");
    for f in [
        "run.manifest.json",
        "plot_data.csv",
        "logs/Baseline.lists.jsonl",
    ] {
        assert!(run.join(f).is_file(), "{f}");
    }

    let ndcg_cells: usize = [1, 3, 5]
        .iter()
        .map(|k| {
            let text =
                std::fs::read_to_string(run.join(format!("tables/ndcg_at_{k}.csv"))).unwrap();
            text.lines()
                .skip(1)
                .map(|l| {
                    l.split(',')
                        .skip(1)
                        .filter(|c| c.parse::<f64>().is_ok())
                        .count()
                })
                .sum::<usize>()
        })
        .sum();
    assert_eq!(ndcg_cells, 75);

    let rep = kycrec(&["report", "run"], dir.path());
    assert!(rep.status.success(), "{}", stderr(&rep));
    assert_eq!(stdout(&rep), stdout(&r));

    let csv = kycrec(&["report", "run", "--format", "csv"], dir.path());
    assert!(stdout(&csv).contains("# ndcg_at_3\ncategory,"));
}

#[test]
fn single_condition_leaves_gaps() {
    let dir = tempfile::tempdir().unwrap();
    assert!(kycrec(&["generate"], dir.path()).status.success());
    let r = kycrec(
        &[
            "run",
            "--conditions",
            "Baseline",
            "--k",
            "3",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", stderr(&r));
    let text = std::fs::read_to_string(dir.path().join("run/tables/ctr_at_3.csv")).unwrap();
    assert!(text.lines().next().unwrap().starts_with("category,"));
    assert!(text.contains("NA"), "{text}");
    assert!(!dir.path().join("run/tables/ctr_at_5.csv").exists());
    assert!(kycrec(&["report"], dir.path()).status.success());
}

#[test]
fn empty_run_dir_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = kycrec(&["report", "."], dir.path());
    assert_eq!(r.status.code(), Some(2));
    assert!(
        stderr(&r).contains("tables/ndcg_at_1.csv"),
        "{}",
        stderr(&r)
    );
}

#[test]
fn missing_world_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = kycrec(&["run", "--world", "nope.jsonl"], dir.path());
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("nope.jsonl"));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[world]\naccounts = -1\n").unwrap();
    let r = kycrec(&["generate", "--config", "bad.toml"], dir.path());
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("world.accounts"), "{}", stderr(&r));

    std::fs::write(dir.path().join("big.toml"), "followed = 5000\n").unwrap();
    let r = kycrec(&["generate", "--config", "big.toml"], dir.path());
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("followed"), "{}", stderr(&r));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        kycrec(&["run", "--bogus"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        kycrec(&["run", "--conditions", "Nope"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(kycrec(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn repeated_seed_gives_identical_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.jsonl", "b.jsonl"] {
        assert!(
            kycrec(&["generate", "--seed", "9", "--out", out], dir.path())
                .status
                .success()
        );
    }
    let hash = |f: &str| file_sha256(&dir.path().join(f)).unwrap();
    assert_eq!(hash("a.jsonl"), hash("b.jsonl"));
    assert!(kycrec(
        &["generate", "--seed", "10", "--out", "c.jsonl"],
        dir.path()
    )
    .status
    .success());
    assert_ne!(hash("a.jsonl"), hash("c.jsonl"));
}
