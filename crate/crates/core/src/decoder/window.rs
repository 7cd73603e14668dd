use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalMatrix;
use crate::stats::pearson_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub duration_s: f64,
    pub hop_s: f64,
}

impl WindowSpec {
    pub const DEFAULT_HOP_S: f64 = 0.1;

    pub fn new(duration_s: f64, hop_s: f64) -> Result<Self> {
        let w = Self { duration_s, hop_s };
        if !(duration_s > 0.0 && hop_s > 0.0 && duration_s.is_finite() && hop_s.is_finite()) {
            return Err(Error::Validation(format!(
                "window duration {duration_s} s and hop {hop_s} s must be positive"
            )));
        }
        if duration_s < hop_s {
            return Err(Error::Validation(format!("window {duration_s} s is shorter than its hop {hop_s} s")));
        }
        Ok(w)
    }

    pub fn with_default_hop(duration_s: f64) -> Result<Self> {
        Self::new(duration_s, Self::DEFAULT_HOP_S)
    }

    /// `(window, hop)` in whole samples at `rate_hz`.
    pub fn samples(&self, rate_hz: f64) -> Result<(usize, usize)> {
        let whole = |s: f64, what: &str| -> Result<usize> {
            let x = s * rate_hz;
            let r = x.round();
            if (x - r).abs() > 1e-6 || r < 1.0 {
                return Err(Error::Validation(format!(
                    "{what} {s} s is {x} samples at {rate_hz} Hz, not a whole positive count"
                )));
            }
            Ok(r as usize)
        };
        let win = whole(self.duration_s, "window")?;
        let hop = whole(self.hop_s, "hop")?;
        if win < 2 {
            return Err(Error::Validation(format!("window of {win} sample(s) is too short for a correlation")));
        }
        Ok((win, hop))
    }

    /// Start frames of all complete windows in a signal of `n_frames`.
    pub fn starts(&self, n_frames: usize, rate_hz: f64) -> Result<Vec<usize>> {
        let (win, hop) = self.samples(rate_hz)?;
        if n_frames < win {
            return Ok(Vec::new());
        }
        Ok((0..=n_frames - win).step_by(hop).collect())
    }

    pub fn center_s(&self, start: usize, rate_hz: f64) -> f64 {
        start as f64 / rate_hz + self.duration_s / 2.0
    }
}

/// Per-window AMI values stamped at window centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmiSeries {
    pub window_centers_s: Vec<f64>,
    pub ami: Vec<f64>,
    pub window: WindowSpec,
}

impl AmiSeries {
    pub fn len(&self) -> usize {
        self.ami.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ami.is_empty()
    }
}

/// Mean over channels of the per-window Pearson correlation.
pub fn window_corr(a: &SignalMatrix, b: &SignalMatrix, w: &WindowSpec) -> Result<Vec<f64>> {
    a.check_same_shape(b)?;
    let (win, _) = w.samples(a.sample_rate_hz())?;
    let starts = w.starts(a.n_frames(), a.sample_rate_hz())?;
    let (ca, cb) = (a.channels(), b.channels());
    let n_ch = ca.len() as f64;
    Ok(starts
        .iter()
        .map(|&s| {
            ca.iter()
                .zip(&cb)
                .map(|(x, y)| pearson_unchecked(&x[s..s + win], &y[s..s + win]))
                .sum::<f64>()
                / n_ch
        })
        .collect())
}

/// `corr(X̂_A, X_sp1) − corr(X̂_A, X_sp2) + corr(X̂_U, X_sp2) − corr(X̂_U, X_sp1)`
/// per window. Positive values favour talker 1.
pub fn ami_series(
    x_hat_a: &SignalMatrix,
    x_hat_u: &SignalMatrix,
    x_sp1: &SignalMatrix,
    x_sp2: &SignalMatrix,
    w: &WindowSpec,
) -> Result<AmiSeries> {
    let a1 = window_corr(x_hat_a, x_sp1, w)?;
    let a2 = window_corr(x_hat_a, x_sp2, w)?;
    let u2 = window_corr(x_hat_u, x_sp2, w)?;
    let u1 = window_corr(x_hat_u, x_sp1, w)?;
    // Grouped so that swapping the talkers negates every value exactly.
    let ami = (0..a1.len()).map(|i| (a1[i] - a2[i]) + (u2[i] - u1[i])).collect();
    let rate = x_hat_a.sample_rate_hz();
    let window_centers_s = w
        .starts(x_hat_a.n_frames(), rate)?
        .into_iter()
        .map(|s| w.center_s(s, rate))
        .collect();
    Ok(AmiSeries {
        window_centers_s,
        ami,
        window: *w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_window() {
        let x = SignalMatrix::from_channels(&[vec![1.0, 2.0, 3.0, 4.0]], 100.0).unwrap();
        let y = SignalMatrix::from_channels(&[vec![2.0, 1.0, 4.0, 3.0]], 100.0).unwrap();
        let w = WindowSpec::new(0.04, 0.01).unwrap();
        let r = window_corr(&x, &y, &w).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tiling_drops_partial_window() {
        let w = WindowSpec::new(0.5, 0.1).unwrap();
        let s = w.starts(120, 100.0).unwrap();
        assert_eq!(s, vec![0, 10, 20, 30, 40, 50, 60, 70]);
        assert!((w.center_s(10, 100.0) - 0.35).abs() < 1e-12);
        assert!(WindowSpec::new(0.005, 0.005).unwrap().samples(100.0).is_err());
        assert!(WindowSpec::new(0.1, 0.5).is_err());
    }
}
