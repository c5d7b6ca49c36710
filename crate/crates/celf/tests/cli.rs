use std::path::Path;
use std::process::{Command, Output};

use celf::formats::{read_event_image, read_patterns, write_lightfield, write_patterns};
use celf_core::{AperturePattern, LightField};

fn celf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_celf"))
        .args(args)
        .env_remove("CELF_DATA_DIR")
        .output()
        .expect("spawn celf")
}

fn ok(args: &[&str]) -> String {
    let out = celf(args);
    assert!(
        out.status.success(),
        "celf {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn small_dataset(dir: &Path, count: usize) {
    ok(&["make-synthetic", "--out", p(dir), "--count", &count.to_string(), "--width", "12", "--seed", "3"]);
}

#[test]
fn malformed_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.lf4");
    std::fs::write(&junk, b"not a light field").unwrap();
    let out = celf(&["simulate", "--lightfield", p(&junk), "--random", "3", "--out", p(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let missing = dir.path().join("nowhere");
    assert!(!celf(&["recover", "--events", p(&missing), "--black-index", "1", "--out", p(dir.path())]).status.success());
    assert!(!celf(&["info", p(&junk)]).status.success());
    assert!(!celf(&["train", "--data", p(&missing), "--out", p(dir.path())]).status.success());
}

#[test]
fn identical_patterns_emit_no_events() {
    let dir = tempfile::tempdir().unwrap();
    let lf = LightField::from_fn(6, 5, |x, y, u, v| ((x + 2 * y + u + v) % 7) as f64 / 7.0).unwrap();
    let lf_path = dir.path().join("lf.lf4");
    write_lightfield(&lf_path, &lf).unwrap();
    let values: Vec<f64> = (0..64).map(|i| (i % 3) as f64 / 2.0).collect();
    let pat = AperturePattern::from_slice(&values).unwrap();
    let pat_path = dir.path().join("p.ap1");
    write_patterns(&pat_path, &[pat.clone(), pat.clone(), pat]).unwrap();
    let out = dir.path().join("ev");
    for model in ["baseline", "ra"] {
        ok(&[
            "simulate", "--lightfield", p(&lf_path), "--patterns", p(&pat_path), "--model", model, "--noiseless",
            "--out", p(&out),
        ]);
        for k in 1..=2 {
            let img = read_event_image(&out.join(format!("events_{k}.ei1"))).unwrap();
            assert!(img.as_slice().iter().all(|&e| e == 0));
        }
        assert_eq!(json(&out.join("stats.json"))["events_per_pixel"], 0.0);
    }
}

#[test]
fn recover_round_trip_is_within_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 1);
    let sample = data.join("sample_0000");
    let ev = dir.path().join("ev");
    ok(&["simulate", "--lightfield", p(&sample), "--random", "5", "--black-first", "--noiseless", "--seed", "4", "--out", p(&ev)]);
    let patterns = read_patterns(&ev.join("patterns.ap1")).unwrap();
    assert!(patterns[0].is_black());
    let rec = dir.path().join("rec");
    ok(&[
        "recover", "--events", p(&ev), "--black-index", "1", "--truth", p(&sample), "--patterns",
        p(&ev.join("patterns.ap1")), "--noiseless", "--out", p(&rec),
    ]);
    let report = json(&rec.join("recover.json"));
    assert_eq!(report["frames"], 5);
    assert_eq!(report["fraction_below_tau"], 1.0);
    assert!(report["max_log_residual"].as_f64().unwrap() < 0.30);
    assert!(rec.join("recovered_5.png").is_file());
    assert_eq!(std::fs::metadata(rec.join("recovered_1.f64")).unwrap().len(), 12 * 12 * 8);
}

#[test]
fn stream_output_has_one_record_per_event() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 1);
    let ev = dir.path().join("ev");
    ok(&["simulate", "--lightfield", p(&data.join("sample_0000")), "--random", "3", "--stream", "--out", p(&ev)]);
    let stream = celf::formats::read_stream(&ev.join("events.ev1")).unwrap();
    let total: i64 = (1..=2)
        .map(|k| {
            read_event_image(&ev.join(format!("events_{k}.ei1")))
                .unwrap()
                .as_slice()
                .iter()
                .map(|e| e.abs() as i64)
                .sum::<i64>()
        })
        .sum();
    assert_eq!(stream.len() as i64, total);
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 4);
    let model = dir.path().join("model");
    let stdout = Command::new(env!("CARGO_BIN_EXE_celf"))
        .args(["train", "--out", p(&model), "-N", "3", "--epochs", "3", "--batch-size", "2", "--mode", "baseline+BF+RA"])
        .args(["--net-widths", "2,4,64", "--quiet"])
        .env("CELF_DATA_DIR", &data)
        .output()
        .unwrap();
    assert!(stdout.status.success(), "{}", String::from_utf8_lossy(&stdout.stderr));

    let history = std::fs::read_to_string(model.join("history.csv")).unwrap();
    let rows: Vec<&str> = history.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let s: Vec<f64> = rows.iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]));

    let patterns = read_patterns(&model.join("patterns.ap1")).unwrap();
    assert!(patterns[0].is_black());

    let out = dir.path().join("eval");
    let printed = ok(&["eval", "--model", p(&model), "--data", p(&data), "--all", "--out", p(&out)]);
    assert!(printed.contains("pattern 1 (transmittance 0.000, black)"));
    let report = json(&out.join("eval.json"));
    assert_eq!(report["samples"], 4);
    assert_eq!(report["black_patterns"], serde_json::json!([1]));
    assert!(report["mse"].as_f64().unwrap() > 0.0);
    assert!(out.join("recon").join("view_0_0.png").is_file());
    assert!(out.join("epi_h_truth.png").is_file());
}

#[test]
fn eval_rejects_mismatched_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 2);
    let model = dir.path().join("model");
    ok(&["train", "--data", p(&data), "--out", p(&model), "-N", "3", "--epochs", "0", "--net-widths", "2,64", "--quiet"]);
    write_patterns(&model.join("patterns.ap1"), &vec![AperturePattern::open(); 5]).unwrap();
    let out = celf(&["eval", "--model", p(&model), "--data", p(&data), "--out", p(&dir.path().join("e"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("incompatible checkpoint"));
}

#[test]
fn config_file_feeds_training() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 2);
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 3\nepochs = 1\nmode = baseline\nnet_widths = 2,64\n").unwrap();
    let model = dir.path().join("model");
    ok(&["train", "--data", p(&data), "--out", p(&model), "--config", p(&cfg), "--quiet"]);
    let saved = std::fs::read_to_string(model.join("model.cfg")).unwrap();
    assert!(saved.contains("mode = baseline\n"));
    assert!(saved.contains("N = 3\n"));
    assert_eq!(read_patterns(&model.join("patterns.ap1")).unwrap().len(), 3);

    std::fs::write(&cfg, "N = 3\nbogus = 1\n").unwrap();
    assert!(!celf(&["train", "--data", p(&data), "--out", p(&model), "--config", p(&cfg)]).status.success());
}

#[test]
fn info_describes_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    small_dataset(&data, 1);
    let text = ok(&["info", p(&data.join("sample_0000").join("lightfield.lf4"))]);
    assert!(text.contains("12"));
    let text = ok(&["info"]);
    assert!(text.contains("tau"));
}
