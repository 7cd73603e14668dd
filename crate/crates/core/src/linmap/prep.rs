//! Per-fold feature preprocessing (z-score, then optional PCA), expressed as
//! a single affine map so it can be applied to moments as well as signals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dsp::{pca_fit, zscore_apply, zscore_fit, STD_FLOOR};
use crate::error::{Error, Result};
use crate::signal::{SignalMatrix, TrialSignals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturePrepConfig {
    pub zscore: bool,
    pub pca_k: Option<usize>,
}

impl Default for FeaturePrepConfig {
    fn default() -> Self {
        Self {
            zscore: true,
            pca_k: None,
        }
    }
}

/// `y = Aᵀx − u` per frame; `A` is `in × out`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub a: DMatrix<f64>,
    pub u: DVector<f64>,
}

impl FeatureMap {
    pub fn identity(dim: usize) -> Self {
        Self {
            a: DMatrix::identity(dim, dim),
            u: DVector::zeros(dim),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.a.ncols()
    }

    pub(crate) fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.in_dim() {
            return Err(Error::Dimension(format!(
                "feature map expects {} channels, got {dim}",
                self.in_dim()
            )));
        }
        Ok(())
    }

    /// Fits on both talkers' features of `training`.
    pub fn fit(training: &[&TrialSignals], cfg: &FeaturePrepConfig) -> Result<Self> {
        let pool: Vec<&SignalMatrix> = training.iter().flat_map(|t| [&t.talker1, &t.talker2]).collect();
        let dim = pool
            .first()
            .ok_or_else(|| Error::Validation("feature preprocessing needs a training trial".into()))?
            .n_channels();
        let mut map = Self::identity(dim);
        let mut scaled: Option<Vec<SignalMatrix>> = None;
        if cfg.zscore {
            let z = zscore_fit(&pool)?;
            for c in 0..dim {
                if z.std[c] <= STD_FLOOR {
                    map.a[(c, c)] = 0.0;
                    map.u[c] = 0.0;
                } else {
                    map.a[(c, c)] = 1.0 / z.std[c];
                    map.u[c] = z.mean[c] / z.std[c];
                }
            }
            if cfg.pca_k.is_some() {
                scaled = Some(pool.iter().map(|m| zscore_apply(&z, m)).collect::<Result<_>>()?);
            }
        }
        if let Some(k) = cfg.pca_k {
            let refs: Vec<&SignalMatrix> = match &scaled {
                Some(v) => v.iter().collect(),
                None => pool.clone(),
            };
            let pca = pca_fit(&refs, k)?;
            // z = P(y − m) with y = Aᵀx − u  ⇒  A' = A Pᵀ, u' = P(u + m)
            let p = &pca.components;
            let m = DVector::from_column_slice(&pca.mean);
            map = Self {
                a: &map.a * p.transpose(),
                u: p * (&map.u + m),
            };
        }
        Ok(map)
    }

    pub fn apply(&self, m: &SignalMatrix) -> Result<SignalMatrix> {
        self.check_input(m.n_channels())?;
        let (d, k) = (self.in_dim(), self.out_dim());
        let mut data = Vec::with_capacity(m.n_frames() * k);
        for frame in m.data().chunks_exact(d) {
            for j in 0..k {
                let col = self.a.column(j);
                let v: f64 = col.iter().zip(frame).map(|(a, x)| a * x).sum();
                data.push(v - self.u[j]);
            }
        }
        let mut out = SignalMatrix::new(k, m.n_frames(), m.sample_rate_hz(), data)?;
        out.meta = m.meta.clone();
        Ok(out)
    }

    /// Applies the map to both talkers' features of a trial.
    pub fn apply_trial(&self, t: &TrialSignals) -> Result<TrialSignals> {
        TrialSignals::new(
            t.trial_id.clone(),
            t.neural.clone(),
            self.apply(&t.talker1)?,
            self.apply(&t.talker2)?,
            t.attended,
        )
    }
}
