use crate::error::{Error, Result};
use crate::linmap::filter::{Direction, SpatioTemporalFilter};
use crate::linmap::moments::{BackwardTrialMoments, ForwardTrialMoments, Moments};
use crate::linmap::prep::FeatureMap;
use crate::linmap::ridge::{solve_moments, RidgeConfig, RidgeSolution};
use crate::par_map;
use crate::signal::TrialSignals;

/// Reconstruction filters for the attended and unattended talkers.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardFilters {
    pub attended: SpatioTemporalFilter,
    pub unattended: SpatioTemporalFilter,
}

fn split_columns(sol: &RidgeSolution, start: usize, len: usize) -> RidgeSolution {
    RidgeSolution {
        weights: sol.weights.columns(start, len).into_owned(),
        bias: sol.bias.rows(start, len).into_owned(),
    }
}

/// Solves `G_A` and `G_U` jointly (they share the neural Gram matrix).
pub(crate) fn backward_from_moments(
    raw: &BackwardTrialMoments,
    map: &FeatureMap,
    n_electrodes: usize,
    cfg: &RidgeConfig,
) -> Result<BackwardFilters> {
    let m = raw.to_moments(map)?;
    let sol = solve_moments(&m, cfg.lambda)?;
    let q = map.out_dim();
    Ok(BackwardFilters {
        attended: SpatioTemporalFilter::from_solution(&split_columns(&sol, 0, q), n_electrodes, cfg.lag, Direction::Backward)?,
        unattended: SpatioTemporalFilter::from_solution(&split_columns(&sol, q, q), n_electrodes, cfg.lag, Direction::Backward)?,
    })
}

pub(crate) fn forward_from_moments(m: &Moments, n_features: usize, cfg: &RidgeConfig) -> Result<SpatioTemporalFilter> {
    let sol = solve_moments(m, cfg.lambda)?;
    SpatioTemporalFilter::from_solution(&sol, n_features, cfg.lag, Direction::Forward)
}

fn check_training(training: &[&TrialSignals]) -> Result<()> {
    let first = training
        .first()
        .ok_or_else(|| Error::Validation("training set is empty".into()))?;
    for t in training {
        first.neural.check_compatible(&t.neural).map_err(|e| Error::Consistency(format!("trial {}: {e}", t.trial_id)))?;
        first.talker1.check_compatible(&t.talker1).map_err(|e| Error::Consistency(format!("trial {}: {e}", t.trial_id)))?;
    }
    Ok(())
}

pub(crate) fn sum_moments<T: Clone + for<'a> std::ops::AddAssign<&'a T>>(parts: &[&T]) -> T {
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc += *p;
    }
    acc
}

/// Trains `(G_A, G_U)` on the given trials' unpreprocessed features. Each
/// trial is lagged on its own, so zero padding never crosses trial borders.
pub fn train_backward(training: &[&TrialSignals], cfg: &RidgeConfig) -> Result<BackwardFilters> {
    check_training(training)?;
    let parts = par_map(training, |t| {
        BackwardTrialMoments::compute(t, &cfg.lag).map_err(|e| e.in_fold(&t.trial_id))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let total = sum_moments(&parts.iter().collect::<Vec<_>>());
    let q = training[0].talker1.n_channels();
    backward_from_moments(&total, &FeatureMap::identity(q), training[0].neural.n_channels(), cfg)
}

/// Trains the forward map from attended features to every electrode.
pub fn train_forward(training: &[&TrialSignals], cfg: &RidgeConfig) -> Result<SpatioTemporalFilter> {
    check_training(training)?;
    let parts = par_map(training, |t| {
        ForwardTrialMoments::compute(t, &cfg.lag).map_err(|e| e.in_fold(&t.trial_id))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let total = sum_moments(&parts.iter().collect::<Vec<_>>());
    forward_from_moments(&total.base, training[0].talker1.n_channels(), cfg)
}
