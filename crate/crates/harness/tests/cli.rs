use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE_1: &str = "a = -2.1\nb = 0.9\nc = 2.12\ntau = 1.0\nhistory = \"2 - 48*t*(1 + t)\"\n";
const EXAMPLE_2: &str =
    "a = -2.1\nb = 0.6363636363636364\nc = -2.0\ntau = 2.0\nhistory = \"1 + 3/2*(t + 2)*(0.5 + t)\"\n";

fn ndde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndde")).args(args).output().unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) -> String {
    let out = ndde(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn parse_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn zero_history_gives_zero_solution() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "zero.toml",
        "a = -1\nb = 0.5\nc = 0.3\ntau = 1\nhistory = \"0\"\nt_max = 2\ngrid_step = 0.1\n",
    );
    for method in ["mos", "pure", "original", "modified"] {
        let csv = run_ok(&["solve", "--config", p(&cfg), "--method", method]);
        let rows = parse_rows(&csv);
        assert_eq!(rows.len(), 21);
        for row in rows {
            assert_eq!(row[1].parse::<f64>().unwrap(), 0.0, "{method}");
        }
    }
}

#[test]
fn bad_config_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, "bad.toml", "a = 1\nb = 0\nc = 0\ntau = 1\nhistory = \"1\"\n");
    assert_eq!(ndde(&["solve", "--config", p(&bad)]).status.code(), Some(1));
    let missing = dir.path().join("missing.toml");
    assert_eq!(ndde(&["solve", "--config", p(&missing)]).status.code(), Some(1));
    assert_eq!(ndde(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn empty_csv_cannot_be_plotted() {
    let dir = TempDir::new().unwrap();
    let csv = write_config(&dir, "empty.csv", "");
    let out = ndde(&["plot", p(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("empty.svg").exists());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ex1.toml", EXAMPLE_1);
    let args = [
        "solve",
        "--config",
        p(&cfg),
        "--n",
        "20",
        "--t-max",
        "3",
        "--grid-step",
        "0.01",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
    let poles = ["poles", "--config", p(&cfg), "--n", "10"];
    assert_eq!(run_ok(&poles), run_ok(&poles));
}

#[test]
fn single_n_leaves_slopes_empty() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ex1.toml", EXAMPLE_1);
    let csv = run_ok(&[
        "convergence",
        "--config",
        p(&cfg),
        "--n-list",
        "10",
        "--t-max",
        "2",
        "--grid-step",
        "0.01",
    ]);
    let rows = parse_rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "10");
    assert!(rows[0][4..].iter().all(String::is_empty));

    let csv = run_ok(&[
        "convergence",
        "--config",
        p(&cfg),
        "--n-list",
        "10,20",
        "--t-max",
        "2",
        "--grid-step",
        "0.01",
    ]);
    assert!(parse_rows(&csv)
        .iter()
        .all(|r| r[4..].iter().all(|s| s.parse::<f64>().is_ok())));
}

#[test]
fn example_2_has_no_real_poles() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ex2.toml", EXAMPLE_2);
    let csv = run_ok(&["poles", "--config", p(&cfg), "--n", "8"]);
    let rows = parse_rows(&csv);
    assert!(rows.iter().all(|r| r[1] != "real"));
    assert_eq!(rows.iter().filter(|r| r[0] == "0").count(), 1);
    assert_eq!(rows.len(), 9);
}

#[test]
fn zero_history_residues_are_flagged() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "zero.toml",
        "a = -1\nb = 0.5\nc = 0.3\ntau = 1\nhistory = \"0\"\nn = 6\n",
    );
    let csv = run_ok(&["residues", "--config", p(&cfg)]);
    let rows = parse_rows(&csv);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| !r[4].is_empty()));
}

#[test]
fn modified_beats_pure_on_example_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ex1.toml", EXAMPLE_1);
    let max_error = |method: &str| {
        let out = dir.path().join(format!("{method}.csv"));
        run_ok(&[
            "solve",
            "--config",
            p(&cfg),
            "--method",
            method,
            "--n",
            "20",
            "--out",
            p(&out),
        ]);
        parse_rows(&fs::read_to_string(out).unwrap())
            .iter()
            .map(|r| r[3].parse::<f64>().unwrap())
            .fold(0.0, f64::max)
    };
    assert!(max_error("modified") < max_error("pure"));
}

#[test]
fn solve_csv_plots_to_svg() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ex1.toml", EXAMPLE_1);
    let out = dir.path().join("solve.csv");
    run_ok(&[
        "solve",
        "--config",
        p(&cfg),
        "--t-max",
        "2",
        "--grid-step",
        "0.01",
        "--out",
        p(&out),
    ]);
    run_ok(&["plot", p(&out)]);
    let svg = fs::read_to_string(dir.path().join("solve.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}
