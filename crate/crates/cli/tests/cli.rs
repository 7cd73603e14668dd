use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aadkit::ftr::read_matrix_file;

fn aadkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aadkit")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = aadkit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = aadkit(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec!["synth", "--out", s(dir)];
    for pair in [["--trials", "6"], ["--duration", "20"], ["--electrodes", "6"], ["--features", "2"]] {
        if !extra.contains(&pair[0]) {
            args.extend_from_slice(&pair);
        }
    }
    args.extend_from_slice(extra);
    ok(&args);
    dir.join("manifest.json")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn tone_wav(path: &Path, seconds: f64) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 16_000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for i in 0..(seconds * 16_000.0) as usize {
        let t = i as f64 / 16_000.0;
        w.write_sample(((2.0 * std::f64::consts::PI * 440.0 * t).sin() * 12_000.0) as i16).unwrap();
    }
    w.finalize().unwrap();
}

#[test]
fn features_from_wav() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("a.wav");
    tone_wav(&wav, 2.0);
    let mel = dir.path().join("a.mel.ftr");
    ok(&["features", "mel", "--bands", "28", "--in", s(&wav), "--out", s(&mel)]);
    let m = read_matrix_file(&mel).unwrap();
    assert_eq!((m.n_channels(), m.sample_rate_hz()), (28, 100.0));
    assert!((199..=201).contains(&m.n_frames()));

    ok(&["features", "envelope", "--in", s(&wav)]);
    let env = read_matrix_file(dir.path().join("a.envelope.ftr")).unwrap();
    assert_eq!((env.n_channels(), env.n_frames()), (1, 200));

    let missing = dir.path().join("absent.wav");
    let err = fails(&["features", "envelope", "--in", s(&missing)]);
    assert!(err.contains("absent.wav"), "{err}");
}

#[test]
fn decode_noiseless_is_perfect_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), &["--noise", "0", "--seed", "5"]);
    let out = dir.path().join("r1");
    ok(&["decode", "--manifest", s(&manifest), "--feature", "synthetic", "--out", s(&out)]);
    let report = json(&out.join("report.json"));
    let durations = report["durations"].as_array().unwrap();
    assert_eq!(durations.len(), 5);
    assert!(durations.iter().all(|d| d["accuracy"] == 1.0));

    let again = dir.path().join("r2");
    ok(&["decode", "--manifest", s(&manifest), "--feature", "synthetic", "--out", s(&again)]);
    assert_eq!(std::fs::read(out.join("report.json")).unwrap(), std::fs::read(again.join("report.json")).unwrap());

    let only = dir.path().join("r3");
    ok(&["decode", "--manifest", s(&manifest), "--feature", "synthetic", "--windows", "4", "--out", s(&only)]);
    let report = json(&only.join("report.json"));
    assert_eq!(report["durations"].as_array().unwrap().len(), 1);
    assert_eq!(report["durations"][0]["duration_s"], 4.0);

    let err = fails(&["decode", "--manifest", s(&manifest), "--feature", "absent-name"]);
    assert!(err.contains("absent-name"), "{err}");
}

#[test]
fn synth_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(&dir.path().join("a"), &["--seed", "9"]);
    let b = synth(&dir.path().join("b"), &["--seed", "9"]);
    for name in ["manifest.json", "ground_truth.json", "trial03.neural.ftr", "trial03.talker2.synthetic.ftr"] {
        assert_eq!(
            std::fs::read(a.parent().unwrap().join(name)).unwrap(),
            std::fs::read(b.parent().unwrap().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn layer_sweep_ranks_the_cleanest_layer_first() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), &["--noise", "1", "--seed", "4", "--layers", "2,0.3,2"]);
    let out = dir.path().join("sweep");
    ok(&["layer-sweep", "--manifest", s(&manifest), "--windows", "0.5,1", "--out", s(&out)]);
    let csv = std::fs::read_to_string(out.join("layer_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("layer,duration_s,accuracy"));
    let rows: Vec<(String, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 6);
    let at_half: Vec<&(String, f64, f64)> = rows.iter().filter(|r| r.1 == 0.5).collect();
    let best = at_half.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
    assert_eq!(best.0, "layer01");

    let single = dir.path().join("single");
    ok(&["layer-sweep", "--manifest", s(&manifest), "--layers", "layer02", "--out", s(&single)]);
    let csv = std::fs::read_to_string(single.join("layer_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);

    let err = fails(&["layer-sweep", "--manifest", s(&manifest), "--prefix", "wavlm"]);
    assert!(err.contains("no layer features"), "{err}");
}

#[test]
fn switch_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), &["--noise", "0", "--seed", "6"]);
    let out = dir.path().join("sw");
    ok(&["switch", "--manifest", s(&manifest), "--feature", "synthetic", "--windows", "1,4", "--out", s(&out)]);
    let trace = std::fs::read_to_string(out.join("switch_trace_4s.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("window_center_s,ami_scaled"));
    assert_eq!(trace.lines().count(), 1 + 161);
    let pairs = std::fs::read_to_string(out.join("switch_pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 1 + 6);
    assert!(out.join("transitions.csv").is_file() && out.join("switch.json").is_file());

    let short = synth(&dir.path().join("short"), &["--duration", "15"]);
    let err = fails(&["switch", "--manifest", s(&short), "--feature", "synthetic"]);
    assert!(err.contains("no switch trials"), "{err}");
}

#[test]
fn forward_compare_maps() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), &["--noise", "1", "--seed", "8", "--layers", "0,3"]);
    let same = dir.path().join("same");
    ok(&["forward-compare", "--manifest", s(&manifest), "--feature-a", "layer00", "--feature-b", "layer00", "--out", s(&same)]);
    let map = json(&same.join("improvement.json"));
    assert!(map["map"]["delta_r"].as_array().unwrap().iter().all(|v| v == 0.0));

    let diff = dir.path().join("diff");
    ok(&["forward-compare", "--manifest", s(&manifest), "--feature-a", "layer00", "--feature-b", "layer01", "--out", s(&diff)]);
    let map = json(&diff.join("improvement.json"));
    assert!(map["map"]["frac_better_a"].as_f64().unwrap() > 0.8);
    let csv = std::fs::read_to_string(diff.join("improvement.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("electrode,delta_r,significant,p_value"));

    let out = aadkit(&["forward-compare", "--manifest", s(&manifest), "--feature-a", "layer00"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pca_fit_and_apply() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), &["--features", "4"]);
    let model = dir.path().join("pca.json");
    ok(&["pca", "fit", "--manifest", s(&manifest), "--feature", "synthetic", "--k", "2", "--out", s(&model)]);
    let input = dir.path().join("data/trial00.talker1.synthetic.ftr");
    let scores = dir.path().join("scores.ftr");
    ok(&["pca", "apply", "--model", s(&model), "--in", s(&input), "--out", s(&scores)]);
    let m = read_matrix_file(&scores).unwrap();
    assert_eq!((m.n_channels(), m.n_frames()), (2, 2000));
    let err = fails(&["pca", "fit", "--k", "2"]);
    assert!(err.contains("nothing to fit"), "{err}");
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_aadkit"))
            .env("AADKIT_THREADS", threads)
            .args(["synth", "--out", s(&dir.path().join(threads)), "--trials", "2", "--duration", "2"])
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    let bad = run("zero");
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("AADKIT_THREADS"));
}
