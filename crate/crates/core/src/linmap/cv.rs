//! Leave-one-out cross-validation for backward and forward models.
//!
//! Raw per-trial moments are computed once. A fold sums the moments of its
//! training trials, fits feature preprocessing on those trials only and
//! transforms the summed moments, so the held-out trial never enters a
//! training statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmap::filter::apply_filter;
use crate::linmap::moments::{BackwardTrialMoments, ForwardTrialMoments, Moments};
use crate::linmap::prep::{FeatureMap, FeaturePrepConfig};
use crate::linmap::ridge::RidgeConfig;
use crate::linmap::train::{backward_from_moments, forward_from_moments, sum_moments, BackwardFilters};
use crate::linmap::SpatioTemporalFilter;
use crate::par_map;
use crate::signal::{SignalMatrix, Talker, TrialSignals};
use crate::stats::pearson;

/// Above this many lagged forward parameters the per-fold moment transform is
/// skipped in favour of recomputing moments from preprocessed features.
const FORWARD_TRANSFORM_MAX_PARAMS: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub ridge: RidgeConfig,
    pub prep: FeaturePrepConfig,
}

impl CvConfig {
    pub fn backward_default() -> Self {
        Self {
            ridge: RidgeConfig::backward_default(),
            prep: FeaturePrepConfig::default(),
        }
    }

    pub fn forward_default() -> Self {
        Self {
            ridge: RidgeConfig::forward_default(),
            prep: FeaturePrepConfig::default(),
        }
    }
}

/// Reconstructions of one held-out trial.
#[derive(Debug, Clone)]
pub struct FoldResult {
    pub held_out_trial_id: String,
    pub attended: Talker,
    pub x_hat_attended: SignalMatrix,
    pub x_hat_unattended: SignalMatrix,
    /// Held-out talker features after the fold's preprocessing.
    pub talker1: SignalMatrix,
    pub talker2: SignalMatrix,
    pub filters: BackwardFilters,
}

/// Backward model trained on a subset of trials, with its feature preprocessing.
#[derive(Debug, Clone)]
pub struct TrainedBackward {
    pub filters: BackwardFilters,
    pub map: FeatureMap,
}

impl TrainedBackward {
    /// Reconstructs both talkers from `trial`'s neural data and preprocesses
    /// its actual features with the training map.
    pub fn evaluate(&self, trial: &TrialSignals) -> Result<FoldResult> {
        Ok(FoldResult {
            held_out_trial_id: trial.trial_id.clone(),
            attended: trial.attended,
            x_hat_attended: apply_filter(&self.filters.attended, &trial.neural)?,
            x_hat_unattended: apply_filter(&self.filters.unattended, &trial.neural)?,
            talker1: self.map.apply(&trial.talker1)?,
            talker2: self.map.apply(&trial.talker2)?,
            filters: self.filters.clone(),
        })
    }
}

fn check_trials(trials: &[TrialSignals]) -> Result<()> {
    if trials.len() < 2 {
        return Err(Error::Validation(format!(
            "cross-validation needs at least 2 trials, got {}",
            trials.len()
        )));
    }
    let first = &trials[0];
    for t in trials {
        let ctx = |e: Error| Error::Consistency(format!("trial {}: {e}", t.trial_id));
        first.neural.check_compatible(&t.neural).map_err(ctx)?;
        first.talker1.check_compatible(&t.talker1).map_err(ctx)?;
    }
    Ok(())
}

/// Per-trial backward statistics, reusable across any training subset.
pub struct BackwardBank<'a> {
    trials: &'a [TrialSignals],
    moments: Vec<BackwardTrialMoments>,
    cfg: CvConfig,
}

impl<'a> BackwardBank<'a> {
    pub fn new(trials: &'a [TrialSignals], cfg: &CvConfig) -> Result<Self> {
        check_trials(trials)?;
        let moments = par_map(trials, |t| {
            BackwardTrialMoments::compute(t, &cfg.ridge.lag).map_err(|e| e.in_fold(&t.trial_id))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            trials,
            moments,
            cfg: *cfg,
        })
    }

    pub fn trials(&self) -> &[TrialSignals] {
        self.trials
    }

    /// Trains on every trial whose index is not in `excluded`.
    pub fn fit_excluding(&self, excluded: &[usize]) -> Result<TrainedBackward> {
        let keep: Vec<usize> = (0..self.trials.len()).filter(|i| !excluded.contains(i)).collect();
        if keep.is_empty() {
            return Err(Error::Validation("no training trials left after exclusion".into()));
        }
        let training: Vec<&TrialSignals> = keep.iter().map(|&i| &self.trials[i]).collect();
        let map = FeatureMap::fit(&training, &self.cfg.prep)?;
        let raw = sum_moments(&keep.iter().map(|&i| &self.moments[i]).collect::<Vec<_>>());
        let filters = backward_from_moments(&raw, &map, self.trials[0].neural.n_channels(), &self.cfg.ridge)?;
        Ok(TrainedBackward { filters, map })
    }
}

/// One fold per trial, in input order.
pub fn loo_cv(trials: &[TrialSignals], cfg: &CvConfig) -> Result<Vec<FoldResult>> {
    let bank = BackwardBank::new(trials, cfg)?;
    let idx: Vec<usize> = (0..trials.len()).collect();
    par_map(&idx, |&i| {
        let id = &trials[i].trial_id;
        bank.fit_excluding(&[i])
            .and_then(|m| m.evaluate(&trials[i]))
            .map_err(|e| e.in_fold(id))
    })
    .into_iter()
    .collect()
}

/// Forward-model evaluation of one held-out trial.
#[derive(Debug, Clone)]
pub struct ForwardFold {
    pub held_out_trial_id: String,
    /// Pearson r between predicted and recorded activity, per electrode.
    pub r: Vec<f64>,
    pub filter: SpatioTemporalFilter,
}

fn forward_fold(train: &[&TrialSignals], held_out: &TrialSignals, cfg: &CvConfig, raw: Option<&[ForwardTrialMoments]>, keep: &[usize]) -> Result<ForwardFold> {
    let map = FeatureMap::fit(train, &cfg.prep)?;
    let moments: Moments = match raw {
        Some(parts) => {
            let sum = sum_moments(&keep.iter().map(|&i| &parts[i]).collect::<Vec<_>>());
            sum.to_moments(&map)?
        }
        None => {
            let mut acc: Option<Moments> = None;
            for t in train {
                let mapped = map.apply_trial(t)?;
                let m = Moments::from_signals(mapped.attended_features(), &mapped.neural, &cfg.ridge.lag)?;
                match acc.as_mut() {
                    None => acc = Some(m),
                    Some(a) => *a += &m,
                }
            }
            acc.expect("non-empty training set")
        }
    };
    let filter = forward_from_moments(&moments, map.out_dim(), &cfg.ridge)?;
    let input = map.apply(held_out.attended_features())?;
    let pred = apply_filter(&filter, &input)?;
    let r = (0..held_out.neural.n_channels())
        .map(|e| pearson(&pred.channel(e), &held_out.neural.channel(e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForwardFold {
        held_out_trial_id: held_out.trial_id.clone(),
        r,
        filter,
    })
}

/// Leave-one-out forward modelling: attended features predict every electrode.
pub fn forward_loo(trials: &[TrialSignals], cfg: &CvConfig) -> Result<Vec<ForwardFold>> {
    check_trials(trials)?;
    let c_in = trials[0].talker1.n_channels();
    let raw = if c_in * cfg.ridge.lag.n_lags() <= FORWARD_TRANSFORM_MAX_PARAMS {
        let parts = par_map(trials, |t| {
            ForwardTrialMoments::compute(t, &cfg.ridge.lag).map_err(|e| e.in_fold(&t.trial_id))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Some(parts)
    } else {
        None
    };
    let idx: Vec<usize> = (0..trials.len()).collect();
    par_map(&idx, |&i| {
        let keep: Vec<usize> = (0..trials.len()).filter(|&k| k != i).collect();
        let train: Vec<&TrialSignals> = keep.iter().map(|&k| &trials[k]).collect();
        forward_fold(&train, &trials[i], cfg, raw.as_deref(), &keep).map_err(|e| e.in_fold(&trials[i].trial_id))
    })
    .into_iter()
    .collect()
}
