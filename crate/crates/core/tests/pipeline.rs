use aadkit::decoder::{Aggregation, WindowSpec};
use aadkit::linmap::CvConfig;
use aadkit::pipeline::{decode, forward_compare, switch_analysis};
use aadkit::synth::{generate, SynthConfig};
use aadkit::Error;

fn small(seed: u64, noise: f64) -> SynthConfig {
    SynthConfig {
        seed,
        n_trials: 6,
        trial_s: 20.0,
        n_electrodes: 6,
        n_feature_channels: 2,
        noise_std: noise,
        ..SynthConfig::default()
    }
}

#[test]
fn decode_report_covers_all_windows() {
    let data = generate(&small(1, 0.5)).unwrap();
    let windows: Vec<WindowSpec> = [1.0, 4.0].iter().map(|&d| WindowSpec::with_default_hop(d).unwrap()).collect();
    let (report, folds) = decode(&data.trials, "synthetic", &CvConfig::backward_default(), &windows, Aggregation::PerTrial).unwrap();
    assert_eq!(folds.len(), 6);
    assert_eq!(report.durations.len(), 2);
    // 20 s trials, 1 s windows, 0.1 s hop: 191 windows per trial
    assert_eq!(report.durations[0].n_windows, 6 * 191);
    assert!(report.accuracy_at(4.0).unwrap() >= report.accuracy_at(1.0).unwrap());
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["aggregation"], "per_trial");
}

#[test]
fn switch_report_pairs_and_traces() {
    let data = generate(&small(2, 0.0)).unwrap();
    let windows = [WindowSpec::with_default_hop(2.0).unwrap()];
    let r = switch_analysis(&data.trials, &CvConfig::backward_default(), &windows, 10.0).unwrap();
    assert_eq!(r.pairings.len(), 6);
    assert!(r.pairings.iter().all(|p| p.first_trial_id != p.second_trial_id));
    let trace = &r.traces[0];
    assert!(trace.ami.iter().all(|v| v.abs() <= 1.0 + 1e-12));
    assert_eq!(trace.ami.iter().fold(0.0f64, |m, v| m.max(v.abs())), 1.0);
    assert!(trace.ami[0] > 0.0 && *trace.ami.last().unwrap() < 0.0);

    let short = generate(&SynthConfig { trial_s: 15.0, ..small(2, 0.0) }).unwrap();
    assert!(matches!(
        switch_analysis(&short.trials, &CvConfig::backward_default(), &windows, 10.0),
        Err(Error::Validation(_))
    ));
}

#[test]
fn forward_comparison_prefers_true_features() {
    let data = generate(&small(3, 1.0)).unwrap();
    // the same recordings paired with the other talker's features
    let swapped: Vec<_> = data
        .trials
        .iter()
        .map(|t| {
            let mut s = t.clone();
            std::mem::swap(&mut s.talker1, &mut s.talker2);
            s
        })
        .collect();
    let cfg = CvConfig::forward_default();
    let cmp = forward_compare(&data.trials, &swapped, ("true", "other"), &cfg, &cfg, 0.05).unwrap();
    assert_eq!(cmp.r_a.len(), 6);
    assert!(cmp.map.frac_better_a > 0.5);
    assert_eq!(cmp.map.frac_better_b, 0.0);
}
