mod common;

use aadkit::decoder::{
    ami_series, classify, classify_and_score, make_switch_trials, transition_time, window_corr, Aggregation, AmiSeries,
    WindowSpec,
};
use aadkit::linmap::{loo_cv, CvConfig};
use aadkit::{Error, LagWindow, SignalMatrix, Talker, TrialSignals};
use proptest::prelude::*;

fn one(ch: Vec<f64>) -> SignalMatrix {
    SignalMatrix::from_channels(&[ch], 100.0).unwrap()
}

fn trial(id: &str, frames: usize, attended: Talker, offset: f64) -> TrialSignals {
    let ramp = |k: f64| SignalMatrix::from_channels(&[(0..frames).map(|t| offset + k * t as f64).collect()], 100.0).unwrap();
    TrialSignals::new(id, ramp(1.0), ramp(10.0), ramp(100.0), attended).unwrap()
}

#[test]
fn worked_window_correlation() {
    let w = WindowSpec::new(0.04, 0.01).unwrap();
    let r = window_corr(&one(vec![1.0, 2.0, 3.0, 4.0]), &one(vec![2.0, 1.0, 4.0, 3.0]), &w).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r[0] - 0.6).abs() < 1e-15);
}

#[test]
fn window_count_and_centers() {
    let w = WindowSpec::new(0.5, 0.1).unwrap();
    let x = SignalMatrix::zeros(1, 300, 100.0).unwrap();
    let s = ami_series(&x, &x, &x, &x, &w).unwrap();
    // (300 − 50) / 10 + 1 windows
    assert_eq!(s.len(), 26);
    assert!((s.window_centers_s[0] - 0.25).abs() < 1e-12);
    assert!((s.window_centers_s[25] - 2.75).abs() < 1e-12);
    // constant windows contribute r = 0, so every value is a tie
    assert!(s.ami.iter().all(|&v| v == 0.0));
    assert!(s.ami.iter().all(|&v| classify(v).is_none()));
}

#[test]
fn ties_count_as_errors() {
    let mut rng = common::rng(1);
    let frames = 300;
    let make = |id: &str, rng: &mut _| {
        TrialSignals::new(
            id,
            common::uniform_matrix(rng, 2, frames, 100.0),
            SignalMatrix::zeros(1, frames, 100.0).unwrap(),
            SignalMatrix::zeros(1, frames, 100.0).unwrap(),
            Talker::Talker1,
        )
        .unwrap()
    };
    let trials = vec![make("a", &mut rng), make("b", &mut rng), make("c", &mut rng)];
    let mut cfg = CvConfig::backward_default();
    cfg.ridge.lag = LagWindow::new(-100, 0, 100.0).unwrap();
    let folds = loo_cv(&trials, &cfg).unwrap();
    let ids: Vec<String> = trials.iter().map(|t| t.trial_id.clone()).collect();
    let w = [WindowSpec::with_default_hop(1.0).unwrap()];
    let report = classify_and_score(&folds, &ids, "zeros", &w, Aggregation::Pooled).unwrap();
    let d = &report.durations[0];
    assert_eq!(d.accuracy, 0.0);
    assert_eq!(d.n_ties, d.n_windows);
}

#[test]
fn relabeling_complements_accuracy() {
    let mut rng = common::rng(2);
    let frames = 400;
    let trials: Vec<TrialSignals> = (0..4)
        .map(|i| {
            let x1 = common::uniform_matrix(&mut rng, 1, frames, 100.0);
            let x2 = common::uniform_matrix(&mut rng, 1, frames, 100.0);
            let noise = common::uniform_matrix(&mut rng, 2, frames, 100.0);
            let att = if i % 2 == 0 { &x1 } else { &x2 };
            let neural = SignalMatrix::new(
                2,
                frames,
                100.0,
                (0..frames).flat_map(|t| [att.get(0, t) + 0.5 * noise.get(0, t), noise.get(1, t)]).collect(),
            )
            .unwrap();
            let talker = if i % 2 == 0 { Talker::Talker1 } else { Talker::Talker2 };
            TrialSignals::new(format!("t{i}"), neural, x1, x2, talker).unwrap()
        })
        .collect();
    let mut cfg = CvConfig::backward_default();
    cfg.ridge.lag = LagWindow::new(-50, 0, 100.0).unwrap();
    let w = [WindowSpec::with_default_hop(1.0).unwrap(), WindowSpec::with_default_hop(2.0).unwrap()];
    let ids: Vec<String> = trials.iter().map(|t| t.trial_id.clone()).collect();

    let folds = loo_cv(&trials, &cfg).unwrap();
    let mut flipped = folds.clone();
    for f in &mut flipped {
        f.attended = f.attended.other();
    }
    let a = classify_and_score(&folds, &ids, "x", &w, Aggregation::Pooled).unwrap();
    let b = classify_and_score(&flipped, &ids, "x", &w, Aggregation::Pooled).unwrap();
    for (x, y) in a.durations.iter().zip(&b.durations) {
        assert_eq!(x.n_ties, 0);
        assert!((x.accuracy + y.accuracy - 1.0).abs() < 1e-12);
    }
    assert!(a.durations[0].accuracy > 0.9);
}

#[test]
fn missing_fold_is_a_coverage_error() {
    let ids = vec!["t0".to_string()];
    let w = [WindowSpec::with_default_hop(1.0).unwrap()];
    assert!(matches!(classify_and_score(&[], &ids, "x", &w, Aggregation::Pooled), Err(Error::Coverage(_))));
}

#[test]
fn switch_trials_splice_and_pair() {
    let trials = vec![
        trial("a", 2000, Talker::Talker1, 0.0),
        trial("b", 2000, Talker::Talker1, 1e4),
        trial("short", 1500, Talker::Talker2, 2e4),
        trial("c", 2500, Talker::Talker2, 3e4),
    ];
    let (st, skipped) = make_switch_trials(&trials, 10.0).unwrap();
    assert_eq!(skipped, ["short"]);
    let pairs: Vec<(usize, usize)> = st.iter().map(|s| (s.first_index, s.second_index)).collect();
    // first opposite-label partner, cyclically over eligible trials
    assert_eq!(pairs, [(0, 3), (1, 3), (3, 0)]);

    let s = &st[0];
    assert_eq!(s.trial.attended, Talker::Talker1);
    assert_eq!(s.switch_time_s, 10.0);
    assert_eq!(s.trial.neural.n_frames(), 2000);
    let (a, c) = (&trials[0], &trials[3]);
    for t in [0, 999] {
        assert_eq!(s.trial.talker1.get(0, t), a.attended_features().get(0, t));
        assert_eq!(s.trial.talker2.get(0, t), a.unattended_features().get(0, t));
        assert_eq!(s.trial.neural.get(0, t), a.neural.get(0, t));
    }
    for t in [1000, 1999] {
        let src = t - 1000 + 1500;
        assert_eq!(s.trial.talker1.get(0, t), c.unattended_features().get(0, src));
        assert_eq!(s.trial.talker2.get(0, t), c.attended_features().get(0, src));
        assert_eq!(s.trial.neural.get(0, t), c.neural.get(0, src));
    }
}

#[test]
fn switch_needs_two_eligible_trials() {
    let trials = vec![trial("a", 2000, Talker::Talker1, 0.0), trial("b", 100, Talker::Talker2, 0.0)];
    let (st, skipped) = make_switch_trials(&trials, 10.0).unwrap();
    assert!(st.is_empty());
    assert_eq!(skipped, ["b"]);
}

#[test]
fn ideal_step_transition_is_within_one_hop() {
    for duration in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let w = WindowSpec::with_default_hop(duration).unwrap();
        let starts = w.starts(2000, 100.0).unwrap();
        let centers: Vec<f64> = starts.iter().map(|&s| w.center_s(s, 100.0)).collect();
        let ami = centers.iter().map(|&c| if c < 10.0 { 1.0 } else { -1.0 }).collect();
        let s = AmiSeries {
            window_centers_s: centers,
            ami,
            window: w,
        };
        let t = transition_time(&s, 10.0).unwrap().unwrap();
        assert!(t.abs() <= 0.1 + 1e-9, "{duration} s: {t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ami_swap_antisymmetry_and_brute_force(seed in 0u64..10_000, win in 2usize..40, hop in 1usize..10) {
        prop_assume!(hop <= win);
        let mut rng = common::rng(seed);
        let m = |rng: &mut _| common::uniform_matrix(rng, 2, 90, 100.0);
        let (xa, xu, x1, x2) = (m(&mut rng), m(&mut rng), m(&mut rng), m(&mut rng));
        let w = WindowSpec::new(win as f64 / 100.0, hop as f64 / 100.0).unwrap();
        let s = ami_series(&xa, &xu, &x1, &x2, &w).unwrap();
        let swapped = ami_series(&xa, &xu, &x2, &x1, &w).unwrap();
        for (i, (a, b)) in s.ami.iter().zip(&swapped.ami).enumerate() {
            prop_assert_eq!(*a, -*b);
            prop_assert!((a - common::ami_direct(&xa, &xu, &x1, &x2, i * hop, win)).abs() <= 1e-12);
            prop_assert!(a.abs() <= 4.0);
        }
    }

    #[test]
    fn classify_follows_sign(v in -10.0f64..10.0) {
        let expected = if v > 0.0 { Some(Talker::Talker1) } else if v < 0.0 { Some(Talker::Talker2) } else { None };
        prop_assert_eq!(classify(v), expected);
    }
}
