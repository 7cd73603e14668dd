//! End-to-end analyses built from the lower-level modules.

use serde::{Deserialize, Serialize};

use crate::decoder::{
    ami_series, classify_and_score, make_switch_trials, scale_ami, transition_time, Aggregation, AmiSeries,
    DecodingReport, SwitchPairing, WindowSpec,
};
use crate::error::{Error, Result};
use crate::linmap::{forward_loo, loo_cv, BackwardBank, CvConfig, FoldResult, ForwardFold};
use crate::par_map;
use crate::signal::TrialSignals;
use crate::stats::{improvement_map, ImprovementMap};

/// Leave-one-out decoding accuracy for each window.
pub fn decode(
    trials: &[TrialSignals],
    feature_name: &str,
    cfg: &CvConfig,
    windows: &[WindowSpec],
    aggregation: Aggregation,
) -> Result<(DecodingReport, Vec<FoldResult>)> {
    let folds = loo_cv(trials, cfg)?;
    let ids: Vec<String> = trials.iter().map(|t| t.trial_id.clone()).collect();
    let report = classify_and_score(&folds, &ids, feature_name, windows, aggregation)?;
    Ok((report, folds))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSummary {
    pub duration_s: f64,
    /// Mean over switch trials that have a crossing.
    pub mean_transition_s: Option<f64>,
    pub n_with_crossing: usize,
    pub n_switch_trials: usize,
    pub per_trial_s: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwitchReport {
    pub segment_s: f64,
    pub pairings: Vec<SwitchPairing>,
    pub skipped_trials: Vec<String>,
    pub transitions: Vec<TransitionSummary>,
    /// Averaged AMI trace per window, scaled to [−1, 1].
    pub traces: Vec<AmiSeries>,
}

/// Simulated attention switches: each spliced trial is decoded with filters
/// trained on every trial except its two sources.
pub fn switch_analysis(
    trials: &[TrialSignals],
    cfg: &CvConfig,
    windows: &[WindowSpec],
    segment_s: f64,
) -> Result<SwitchReport> {
    let (switch_trials, skipped) = make_switch_trials(trials, segment_s)?;
    if switch_trials.is_empty() {
        return Err(Error::Validation(format!(
            "no switch trials: need at least two trials of {} s or longer",
            2.0 * segment_s
        )));
    }
    let bank = BackwardBank::new(trials, cfg)?;
    let folds: Vec<FoldResult> = par_map(&switch_trials, |st| {
        bank.fit_excluding(&[st.first_index, st.second_index])
            .and_then(|m| m.evaluate(&st.trial))
            .map_err(|e| e.in_fold(&st.trial.trial_id))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut transitions = Vec::with_capacity(windows.len());
    let mut traces = Vec::with_capacity(windows.len());
    for w in windows {
        let mut series = Vec::with_capacity(folds.len());
        let mut per_trial = Vec::with_capacity(folds.len());
        for (f, st) in folds.iter().zip(&switch_trials) {
            let s = ami_series(&f.x_hat_attended, &f.x_hat_unattended, &f.talker1, &f.talker2, w)
                .map_err(|e| e.in_fold(&f.held_out_trial_id))?;
            per_trial.push(transition_time(&s, st.switch_time_s).map_err(|e| e.in_fold(&f.held_out_trial_id))?);
            series.push(s);
        }
        let found: Vec<f64> = per_trial.iter().flatten().copied().collect();
        transitions.push(TransitionSummary {
            duration_s: w.duration_s,
            mean_transition_s: (!found.is_empty()).then(|| found.iter().sum::<f64>() / found.len() as f64),
            n_with_crossing: found.len(),
            n_switch_trials: per_trial.len(),
            per_trial_s: per_trial,
        });
        traces.push(scale_ami(&series)?);
    }
    Ok(SwitchReport {
        segment_s,
        pairings: switch_trials.iter().map(|s| s.pairing(trials)).collect(),
        skipped_trials: skipped,
        transitions,
        traces,
    })
}

/// Per-electrode held-out r, indexed `[electrode][fold]`.
pub fn electrode_r(folds: &[ForwardFold]) -> Vec<Vec<f64>> {
    let n_e = folds.first().map_or(0, |f| f.r.len());
    (0..n_e).map(|e| folds.iter().map(|f| f.r[e]).collect()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForwardComparison {
    pub feature_a: String,
    pub feature_b: String,
    pub r_a: Vec<Vec<f64>>,
    pub r_b: Vec<Vec<f64>>,
    pub map: ImprovementMap,
}

/// Forward models for two feature families on the same recordings, compared
/// electrode by electrode with fold-paired t-tests.
pub fn forward_compare(
    trials_a: &[TrialSignals],
    trials_b: &[TrialSignals],
    names: (&str, &str),
    cfg_a: &CvConfig,
    cfg_b: &CvConfig,
    alpha: f64,
) -> Result<ForwardComparison> {
    if trials_a.len() != trials_b.len()
        || trials_a.iter().zip(trials_b).any(|(a, b)| a.trial_id != b.trial_id)
    {
        return Err(Error::Consistency("feature families cover different trials".into()));
    }
    let r_a = electrode_r(&forward_loo(trials_a, cfg_a)?);
    let r_b = electrode_r(&forward_loo(trials_b, cfg_b)?);
    let map = improvement_map(&r_a, &r_b, alpha)?;
    Ok(ForwardComparison {
        feature_a: names.0.to_string(),
        feature_b: names.1.to_string(),
        r_a,
        r_b,
        map,
    })
}
