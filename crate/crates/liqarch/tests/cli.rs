use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use liqarch::io::{self, DailyRow, FixtureTruthRow, PlantedRow};
use liqarch::pipeline::{self, REPORT_FILES};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/run.toml")
}

fn liqarch(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liqarch"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env_remove("LIQARCH_THREADS")
        .output()
        .unwrap()
}

fn with_fixture(cmd: &str, out: &Path) -> Output {
    let cfg = fixture();
    liqarch(&[cmd, "--config", cfg.to_str().unwrap()], out)
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn run_writes_every_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = with_fixture("run", tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in REPORT_FILES {
        assert!(tmp.path().join(f).is_file(), "missing {f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join(pipeline::MANIFEST)).unwrap()).unwrap();
    assert_eq!(manifest["stages"]["ingest"]["minutes.csv"], 15600);
    assert_eq!(manifest["stages"]["backtest"]["forecasts.csv"], 80);
    assert_eq!(manifest["config"]["window_len"], 60);
    assert!(manifest["config"].get("output_dir").is_none());
}

#[test]
fn standalone_chain_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("run"), tmp.path().join("chain"));
    assert!(with_fixture("run", &a).status.success());
    for stage in ["ingest", "liquidity", "fit", "backtest", "report", "portfolio"] {
        let out = with_fixture(stage, &b);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read_all(&a), read_all(&b));
}

#[test]
fn config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = liqarch(&["run", "--input", "/nonexistent/minutes.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "window_size = 100\n").unwrap();
    assert_eq!(liqarch(&["run", "--config", cfg.to_str().unwrap()], tmp.path()).status.code(), Some(1));

    let out = liqarch(&["backtest", "--window-len", "10"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(liqarch(&["run", "--no-such-flag"], tmp.path()).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = liqarch(&["liquidity"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run `ingest` first"));

    let bad = tmp.path().join("bad.csv");
    fs::write(
        &bad,
        "ticker,minute_start,close,amount\nA,2024-01-02T00:00:00Z,100,5\nA,2024-01-02T00:01:00Z,0,5\n",
    )
    .unwrap();
    let out = liqarch(&["ingest", "--input", bad.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn ingest_preserves_field_text() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.csv");
    // unsorted, with a pre-market bar and decimals that do not round-trip through f64 formatting
    fs::write(
        &input,
        "ticker,minute_start,close,amount\n\
         B,2024-01-02T14:31:00Z,10.10,1.000\n\
         A,2024-01-02T14:30:00Z,5.0,2e3\n\
         A,2024-01-02T13:00:00Z,5.5,1\n",
    )
    .unwrap();
    let out = liqarch(&["ingest", "--venue", "stock", "--input", input.to_str().unwrap()], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read_to_string(tmp.path().join(pipeline::MINUTES)).unwrap(),
        "ticker,minute_start,close,amount\nA,2024-01-02T14:30:00Z,5.0,2e3\nB,2024-01-02T14:31:00Z,10.10,1.000\n"
    );
    assert_eq!(
        fs::read_to_string(tmp.path().join(pipeline::DAY_STATUS)).unwrap(),
        "ticker,date,valid,effective_minutes,reason\n\
         A,2024-01-02,false,0,too few minutes\n\
         B,2024-01-02,false,0,too few minutes\n"
    );
}

#[test]
fn synth_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["synth", "--assets", "2", "--days", "3", "--seed", "11"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(liqarch(&args, &a).status.success());
    assert!(liqarch(&args, &b).status.success());
    assert_eq!(read_all(&a), read_all(&b));
    let bars = io::read_minute_file(&a.join(pipeline::SYNTH_MINUTES)).unwrap();
    assert_eq!(bars.len(), 2 * 3 * 1440);
    let other = tmp.path().join("c");
    assert!(liqarch(&["synth", "--assets", "2", "--days", "3", "--seed", "12"], &other).status.success());
    assert_ne!(
        fs::read(a.join(pipeline::SYNTH_MINUTES)).unwrap(),
        fs::read(other.join(pipeline::SYNTH_MINUTES)).unwrap()
    );
}

#[test]
fn synthetic_universe_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let out = liqarch(
        &["run", "--venue", "stock", "--assets", "2", "--days", "70", "--thin", "3", "--window-len", "60"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let daily: Vec<DailyRow> = io::read_table(&tmp.path().join(pipeline::DAILY_RECORDS)).unwrap();
    assert_eq!(daily.len(), 140);
    assert!(daily.iter().all(|d| d.beta_jump > 0.0 && d.beta_jump <= 10.0));
    assert!(tmp.path().join(pipeline::JUMP_TRUTH).is_file());
}

#[test]
fn planted_fixture_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let out = liqarch(&["synth", "--planted", "true", "--days", "200"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<PlantedRow> = io::read_table(&tmp.path().join(pipeline::PLANTED_RETURNS)).unwrap();
    let truth: Vec<FixtureTruthRow> = io::read_table(&tmp.path().join(pipeline::FIXTURE_TRUTH)).unwrap();
    assert_eq!((rows.len(), truth.len()), (200, 200));
    for (r, t) in rows.iter().zip(&truth) {
        assert_eq!(r.date, t.date);
        assert_eq!(r.r_liq, r.r_planted / t.planted_beta_jump);
        assert_eq!(r.r_planted, r.r_base + r.jump);
        assert_eq!(r.jump, (t.planted_beta_jump - 1.0) * t.planted_beta_diff * r.mu);
    }
}

#[test]
fn thread_env_fallback() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(with_fixture("run", &a).status.success());
    let cfg = fixture();
    let out = Command::new(env!("CARGO_BIN_EXE_liqarch"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--output-dir"])
        .arg(&b)
        .env("LIQARCH_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read_all(&a), read_all(&b));
    assert_eq!(liqarch(&["run", "--threads", "0"], tmp.path()).status.code(), Some(1));
}
