use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

pub const STD_FLOOR: f64 = 1e-8;

/// Per-channel standardization fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScoreModel {
    pub mean: Vec<f64>,
    /// Population standard deviation, floored at [`STD_FLOOR`].
    pub std: Vec<f64>,
}

/// Pools all frames of `training` and computes per-channel mean and population std.
pub fn zscore_fit(training: &[&SignalMatrix]) -> Result<ZScoreModel> {
    let first = training
        .first()
        .ok_or_else(|| Error::Dimension("z-score fit needs at least one matrix".into()))?;
    let c = first.n_channels();
    if let Some(bad) = training.iter().find(|m| m.n_channels() != c) {
        return Err(Error::Dimension(format!(
            "z-score fit: {} channels vs {c}",
            bad.n_channels()
        )));
    }
    let n: usize = training.iter().map(|m| m.n_frames()).sum();
    if n < 2 {
        return Err(Error::Dimension("z-score fit needs at least 2 frames".into()));
    }
    let mut mean = vec![0.0; c];
    for m in training {
        for frame in m.data().chunks_exact(c) {
            mean.iter_mut().zip(frame).for_each(|(s, v)| *s += v);
        }
    }
    mean.iter_mut().for_each(|s| *s /= n as f64);
    let mut var = vec![0.0; c];
    for m in training {
        for frame in m.data().chunks_exact(c) {
            for ((s, v), mu) in var.iter_mut().zip(frame).zip(&mean) {
                *s += (v - mu) * (v - mu);
            }
        }
    }
    let std = var.iter().map(|s| (s / n as f64).sqrt().max(STD_FLOOR)).collect();
    Ok(ZScoreModel { mean, std })
}

/// Subtracts the mean and divides by the std; channels whose std sits at the
/// floor (constant in training) map to 0.
pub fn zscore_apply(model: &ZScoreModel, m: &SignalMatrix) -> Result<SignalMatrix> {
    let c = m.n_channels();
    if model.mean.len() != c {
        return Err(Error::Dimension(format!(
            "z-score model has {} channels, input has {c}",
            model.mean.len()
        )));
    }
    let mut out = m.clone();
    for frame in out.data_mut().chunks_exact_mut(c) {
        for ((v, mu), sd) in frame.iter_mut().zip(&model.mean).zip(&model.std) {
            *v = if *sd <= STD_FLOOR { 0.0 } else { (*v - mu) / sd };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_two_values() {
        let m = SignalMatrix::from_channels(&[vec![1.0, 3.0]], 100.0).unwrap();
        let model = zscore_fit(&[&m]).unwrap();
        assert_eq!(model.mean, vec![2.0]);
        assert_eq!(model.std, vec![1.0]);
        assert_eq!(zscore_apply(&model, &m).unwrap().channel(0), vec![-1.0, 1.0]);
    }

    #[test]
    fn standardizes_fit_set() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() * 4.0 + 10.0).collect();
        let b: Vec<f64> = (0..200).map(|i| (i as f64 * 0.11).cos() - 2.0).collect();
        let m = SignalMatrix::from_channels(&[a, b], 100.0).unwrap();
        let z = zscore_apply(&zscore_fit(&[&m]).unwrap(), &m).unwrap();
        for ch in z.channels() {
            let mu = ch.iter().sum::<f64>() / ch.len() as f64;
            let sd = (ch.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / ch.len() as f64).sqrt();
            assert!(mu.abs() < 1e-6);
            assert!((sd - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_channel_is_floored_to_zero() {
        let m = SignalMatrix::from_channels(&[vec![0.1; 30], (0..30).map(f64::from).collect()], 100.0).unwrap();
        let model = zscore_fit(&[&m]).unwrap();
        assert_eq!(model.std[0], STD_FLOOR);
        assert!(zscore_apply(&model, &m).unwrap().channel(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn channel_mismatch() {
        let a = SignalMatrix::zeros(2, 5, 100.0).unwrap();
        let b = SignalMatrix::zeros(3, 5, 100.0).unwrap();
        assert!(matches!(zscore_fit(&[&a, &b]), Err(Error::Dimension(_))));
        let model = zscore_fit(&[&a]).unwrap();
        assert!(zscore_apply(&model, &b).is_err());
    }
}
