use serde::{Deserialize, Serialize};

use crate::decoder::window::{ami_series, AmiSeries, WindowSpec};
use crate::error::{Error, Result};
use crate::linmap::FoldResult;
use crate::signal::Talker;

/// How window decisions are combined into one accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Correct windows over all windows of all trials.
    #[default]
    Pooled,
    /// Mean of per-trial accuracies.
    PerTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationScore {
    pub duration_s: f64,
    pub accuracy: f64,
    pub n_windows: usize,
    /// Windows with AMI exactly 0 (scored as incorrect).
    pub n_ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingReport {
    pub feature_name: String,
    pub hop_s: f64,
    pub aggregation: Aggregation,
    pub durations: Vec<DurationScore>,
}

impl DecodingReport {
    pub fn accuracy_at(&self, duration_s: f64) -> Option<f64> {
        self.durations
            .iter()
            .find(|d| (d.duration_s - duration_s).abs() < 1e-9)
            .map(|d| d.accuracy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Decision for one window: `Some(talker)` or `None` on an exact tie.
pub fn classify(ami: f64) -> Option<Talker> {
    if ami > 0.0 {
        Some(Talker::Talker1)
    } else if ami < 0.0 {
        Some(Talker::Talker2)
    } else {
        None
    }
}

/// AMI series of one fold's held-out trial.
pub fn fold_ami(fold: &FoldResult, w: &WindowSpec) -> Result<AmiSeries> {
    ami_series(&fold.x_hat_attended, &fold.x_hat_unattended, &fold.talker1, &fold.talker2, w)
}

/// `(correct, total, ties)` for one fold and window.
fn score_fold(fold: &FoldResult, w: &WindowSpec) -> Result<(usize, usize, usize)> {
    let s = fold_ami(fold, w)?;
    let mut correct = 0;
    let mut ties = 0;
    for &v in &s.ami {
        match classify(v) {
            Some(t) if t == fold.attended => correct += 1,
            Some(_) => {}
            None => ties += 1,
        }
    }
    Ok((correct, s.len(), ties))
}

/// Scores every trial in `trial_ids` with the fold that held it out.
pub fn classify_and_score(
    folds: &[FoldResult],
    trial_ids: &[String],
    feature_name: &str,
    windows: &[WindowSpec],
    aggregation: Aggregation,
) -> Result<DecodingReport> {
    let ordered: Vec<&FoldResult> = trial_ids
        .iter()
        .map(|id| {
            folds
                .iter()
                .find(|f| &f.held_out_trial_id == id)
                .ok_or_else(|| Error::Coverage(format!("no fold holds out trial {id}")))
        })
        .collect::<Result<_>>()?;
    let hop_s = windows.first().map_or(WindowSpec::DEFAULT_HOP_S, |w| w.hop_s);
    let mut durations = Vec::with_capacity(windows.len());
    for w in windows {
        let mut per_trial = Vec::with_capacity(ordered.len());
        for f in &ordered {
            per_trial.push(score_fold(f, w).map_err(|e| e.in_fold(&f.held_out_trial_id))?);
        }
        let n_windows: usize = per_trial.iter().map(|p| p.1).sum();
        let n_ties: usize = per_trial.iter().map(|p| p.2).sum();
        let accuracy = match aggregation {
            Aggregation::Pooled => {
                let correct: usize = per_trial.iter().map(|p| p.0).sum();
                if n_windows == 0 {
                    0.0
                } else {
                    correct as f64 / n_windows as f64
                }
            }
            Aggregation::PerTrial => {
                let accs: Vec<f64> = per_trial
                    .iter()
                    .filter(|p| p.1 > 0)
                    .map(|p| p.0 as f64 / p.1 as f64)
                    .collect();
                if accs.is_empty() {
                    0.0
                } else {
                    accs.iter().sum::<f64>() / accs.len() as f64
                }
            }
        };
        if n_ties > 0 {
            log::warn!("{n_ties} of {n_windows} windows of {} s have AMI exactly 0", w.duration_s);
        }
        durations.push(DurationScore {
            duration_s: w.duration_s,
            accuracy,
            n_windows,
            n_ties,
        });
    }
    Ok(DecodingReport {
        feature_name: feature_name.to_string(),
        hop_s,
        aggregation,
        durations,
    })
}
