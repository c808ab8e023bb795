use std::fs;
use std::path::{Path, PathBuf};

use dqc1bench::cli::config::{ExperimentConfig, Suite};
use dqc1bench::cli::data::{read_rows, KnotRow, SweepRow, KNOTS_CSV, SWEEP_CSV};
use dqc1bench::cli::{run, run_cli, CONFIG_JSON, SUMMARY_JSON};
use dqc1bench::knots::BraidWord;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn small_knots(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(Suite::Knots);
    cfg.shots = 256;
    cfg.trials = 3;
    cfg.k_max = 3;
    cfg.compare = vec![("S23".parse().unwrap(), "S12^2".parse().unwrap())];
    cfg.out = Some(out.to_path_buf());
    cfg
}

fn cli(args: &[&str]) -> i32 {
    run_cli(std::iter::once("dqc1bench").chain(args.iter().copied()))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn identical_runs_give_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let a = run(&small_knots(&tmp.path().join("a")), true).unwrap();
    let b = run(&small_knots(&tmp.path().join("b")), true).unwrap();
    let (fa, fb) = (files(&a.dir), files(&b.dir));
    assert_eq!(fa.len(), fb.len());
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        if na != CONFIG_JSON {
            assert!(ba == bb, "{na} differs");
        }
    }
    assert!(a.dir.join("timing.json").exists());
    assert!(a.dir.join("circuits.json").exists());
}

#[test]
fn different_seeds_differ() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_knots(&tmp.path().join("a"));
    let a = run(&cfg, false).unwrap();
    cfg.seed = 1;
    cfg.out = Some(tmp.path().join("b"));
    let b = run(&cfg, false).unwrap();
    assert_ne!(fs::read(&a.csv[0]).unwrap(), fs::read(&b.csv[0]).unwrap());
}

#[test]
fn echoed_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("k");
    let code = cli(&[
        "knots",
        "--config",
        configs().join("knots_pairs.json").to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
        "--now",
        "2019-01-05",
    ]);
    assert_eq!(code, 0);
    let echoed = ExperimentConfig::load(&out.join(CONFIG_JSON)).unwrap();
    let mut expected = ExperimentConfig::load(&configs().join("knots_pairs.json")).unwrap();
    expected.seed = 9;
    expected.out = Some(out.clone());
    expected.now = Some("2019-01-05T00:00:00Z".parse().unwrap());
    assert_eq!(echoed, expected);
    assert_eq!(ExperimentConfig::from_json(&echoed.to_json()).unwrap(), echoed);
}

#[test]
fn power_preset_has_240_rows() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = ExperimentConfig::load(&configs().join("knots_powers.json")).unwrap();
    cfg.out = Some(tmp.path().join("powers"));
    let b = run(&cfg, false).unwrap();
    let rows: Vec<KnotRow> = read_rows(&b.dir.join(KNOTS_CSV)).unwrap();
    assert_eq!(rows.len(), 240);
    assert_eq!(rows.iter().filter(|r| r.word == "id").count(), 24);
}

#[test]
fn noiseless_visibility_starts_at_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let code = cli(&[
        "run",
        configs().join("visibility_noiseless.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let rows: Vec<SweepRow> = read_rows(&out.join(SWEEP_CSV)).unwrap();
    for r in rows.iter().filter(|r| r.theta == 0.0) {
        assert_eq!(r.sx_mean, 1.0);
    }
}

#[test]
fn oracle_summary_lists_exact_values() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(cli(&["oracle", "--out", out.to_str().unwrap()]), 0);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join(SUMMARY_JSON)).unwrap()).unwrap();
    let first = &summary["oracle"][0];
    assert_eq!(first["word"], "id");
    assert!((first["re"].as_f64().unwrap() - 2.618_033_988_749_895).abs() < 1e-12);
    assert_eq!(summary["oracle"].as_array().unwrap().len(), 20);
}

#[test]
fn infinite_shots_flag_selects_exact_mode() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("t");
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"suite": "trace-sweep", "noise": {"depol_1q": 1, "depol_2q": 1, "coherent_eps": 0}, "n_mixed": [3], "repetitions": [2], "grid": 5}"#).unwrap();
    assert_eq!(
        cli(&[
            "trace-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--infinite-shots",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let rows: Vec<SweepRow> = read_rows(&out.join(SWEEP_CSV)).unwrap();
    for r in rows {
        assert!((r.sx_mean - (r.theta / 2.0).cos().powi(3)).abs() < 1e-9);
        assert_eq!(r.sx_err, 0.0);
    }
}

#[test]
fn report_is_a_function_of_the_csv() {
    let tmp = TempDir::new().unwrap();
    let b = run(&small_knots(&tmp.path().join("k")), false).unwrap();
    let before: Vec<Vec<u8>> = b.svg.iter().map(|p| fs::read(p).unwrap()).collect();
    let md = fs::read(b.dir.join("report.md")).unwrap();
    for p in &b.svg {
        fs::remove_file(p).unwrap();
    }
    fs::remove_file(b.dir.join("report.md")).unwrap();
    assert_eq!(cli(&["report", b.dir.to_str().unwrap()]), 0);
    let after: Vec<Vec<u8>> = b.svg.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
    assert_eq!(md, fs::read(b.dir.join("report.md")).unwrap());
}

#[test]
fn overlay_of_two_dates() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("knots_drift.json");
    let before = tmp.path().join("before");
    let after = tmp.path().join("after");
    assert_eq!(
        cli(&["run", cfg.to_str().unwrap(), "--out", before.to_str().unwrap()]),
        0
    );
    assert_eq!(
        cli(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            after.to_str().unwrap(),
            "--now",
            "2019-02-27"
        ]),
        0
    );
    let a: Vec<KnotRow> = read_rows(&before.join(KNOTS_CSV)).unwrap();
    let b: Vec<KnotRow> = read_rows(&after.join(KNOTS_CSV)).unwrap();
    assert_ne!(a[12].re, b[12].re, "drift should change the σ12³ trials");
    let overlay = tmp.path().join("overlay");
    assert_eq!(
        cli(&[
            "report",
            before.to_str().unwrap(),
            after.to_str().unwrap(),
            "--out",
            overlay.to_str().unwrap()
        ]),
        0
    );
    let svg = fs::read_to_string(overlay.join("overlay.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(overlay.join("overlay.md").exists());
}

#[test]
fn bad_config_exits_2_naming_the_key() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"suite": "knots", "trails": 4}"#).unwrap();
    assert_eq!(cli(&["run", cfg.to_str().unwrap()]), 2);
    let e = ExperimentConfig::load(&cfg).unwrap_err();
    assert!(e.to_string().contains("trails"), "{e}");
    fs::write(&cfg, r#"{"suite": "knots", "shots": -1}"#).unwrap();
    assert!(ExperimentConfig::load(&cfg).unwrap_err().to_string().contains("shots"));
    fs::write(&cfg, r#"{"suite": "knots", "words": ["S13"]}"#).unwrap();
    assert!(ExperimentConfig::load(&cfg).unwrap_err().to_string().contains("words"));
    assert_eq!(cli(&["knots", "--config", cfg.to_str().unwrap()]), 2);
    assert_eq!(cli(&["oracle", "--now", "yesterday"]), 2);
    assert_eq!(
        cli(&["knots", "--config", configs().join("oracle.json").to_str().unwrap()]),
        2
    );
}

#[test]
fn io_failures_exit_3() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(cli(&["run", tmp.path().join("missing.json").to_str().unwrap()]), 3);
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(cli(&["report", empty.to_str().unwrap()]), 3);
    // An existing directory that is not a bundle is never replaced.
    let foreign = tmp.path().join("foreign");
    fs::create_dir(&foreign).unwrap();
    fs::write(foreign.join("keep.txt"), "x").unwrap();
    assert_eq!(cli(&["oracle", "--out", foreign.to_str().unwrap()]), 3);
    assert!(foreign.join("keep.txt").exists());
    // A previous bundle is replaced.
    let o = tmp.path().join("o");
    assert_eq!(cli(&["oracle", "--out", o.to_str().unwrap()]), 0);
    assert_eq!(cli(&["oracle", "--out", o.to_str().unwrap()]), 0);
}

#[test]
fn corrupt_csv_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let b = run(&small_knots(&tmp.path().join("k")), false).unwrap();
    fs::write(&b.csv[0], "word,k\nS12,notanumber\n").unwrap();
    assert_eq!(cli(&["report", b.dir.to_str().unwrap()]), 3);
}

#[test]
fn shipped_configs_validate() {
    for e in fs::read_dir(configs()).unwrap() {
        let p = e.unwrap().path();
        ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    let w: BraidWord = "S12^3".parse().unwrap();
    assert_eq!(w.len(), 3);
}
