use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

/// Principal subspace of feature frames.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k × d`, orthonormal rows, sorted by decreasing variance.
    pub components: DMatrix<f64>,
    /// Variance along each component (divisor `N − 1`).
    pub explained_variance: Vec<f64>,
    /// Total variance of the centered training data (same divisor).
    pub total_variance: f64,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn dim(&self) -> usize {
        self.components.ncols()
    }

    /// JSON document with `mean`, row-major `components`, and the variances.
    pub fn to_json(&self) -> String {
        let doc = PcaDoc {
            mean: self.mean.clone(),
            components: self.components.row_iter().map(|r| r.iter().copied().collect()).collect(),
            explained_variance: self.explained_variance.clone(),
            total_variance: self.total_variance,
        };
        serde_json::to_string_pretty(&doc).expect("PCA model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PcaDoc = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "PCA model".into(),
            source,
        })?;
        let d = doc.mean.len();
        let k = doc.components.len();
        if d == 0 || k == 0 || doc.components.iter().any(|r| r.len() != d) || doc.explained_variance.len() != k {
            return Err(Error::Dimension(format!(
                "PCA model: {k} components over {d} channels with {} variances",
                doc.explained_variance.len()
            )));
        }
        Ok(Self {
            mean: doc.mean,
            components: DMatrix::from_row_iterator(k, d, doc.components.into_iter().flatten()),
            explained_variance: doc.explained_variance,
            total_variance: doc.total_variance,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::ftr::write_atomic(path.as_ref(), self.to_json().as_bytes())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn explained_ratio(&self) -> f64 {
        if self.total_variance > 0.0 {
            self.explained_variance.iter().sum::<f64>() / self.total_variance
        } else {
            1.0
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PcaDoc {
    mean: Vec<f64>,
    components: Vec<Vec<f64>>,
    explained_variance: Vec<f64>,
    total_variance: f64,
}

/// Fits `k` principal components to the pooled frames of `training` via a
/// singular-value decomposition of the centered data matrix.
///
/// Sign convention: the largest-magnitude coefficient of every component is
/// positive.
pub fn pca_fit(training: &[&SignalMatrix], k: usize) -> Result<PcaModel> {
    let first = training
        .first()
        .ok_or_else(|| Error::Dimension("PCA fit needs at least one matrix".into()))?;
    let d = first.n_channels();
    if training.iter().any(|m| m.n_channels() != d) {
        return Err(Error::Dimension("PCA fit: matrices differ in channel count".into()));
    }
    if k == 0 || k > d {
        return Err(Error::Dimension(format!("PCA k = {k} must be in 1..={d}")));
    }
    let n: usize = training.iter().map(|m| m.n_frames()).sum();
    if n < 2 || k > n {
        return Err(Error::Dimension(format!("PCA with k = {k} needs more than {n} frames")));
    }

    let mut mean = vec![0.0; d];
    for m in training {
        for frame in m.data().chunks_exact(d) {
            mean.iter_mut().zip(frame).for_each(|(s, v)| *s += v);
        }
    }
    mean.iter_mut().for_each(|s| *s /= n as f64);

    // Tall-skinny QR over row blocks keeps memory at O(d²) per block; the
    // triangular factor has the same singular values and right vectors.
    let block = d.max(2048);
    let mut r_acc: Option<DMatrix<f64>> = None;
    let mut total_variance = 0.0;
    let mut rows: Vec<f64> = Vec::with_capacity(block * d);
    let flush = |rows: &mut Vec<f64>, r_acc: &mut Option<DMatrix<f64>>| {
        if rows.is_empty() {
            return;
        }
        let fresh = DMatrix::from_row_slice(rows.len() / d, d, rows);
        rows.clear();
        let stacked = match r_acc.take() {
            None => fresh,
            Some(r) => {
                let mut s = DMatrix::zeros(r.nrows() + fresh.nrows(), d);
                s.rows_mut(0, r.nrows()).copy_from(&r);
                s.rows_mut(r.nrows(), fresh.nrows()).copy_from(&fresh);
                s
            }
        };
        *r_acc = Some(if stacked.nrows() > d { stacked.qr().r() } else { stacked });
    };
    for m in training {
        for frame in m.data().chunks_exact(d) {
            for c in 0..d {
                let v = frame[c] - mean[c];
                total_variance += v * v;
                rows.push(v);
            }
            if rows.len() == block * d {
                flush(&mut rows, &mut r_acc);
            }
        }
    }
    flush(&mut rows, &mut r_acc);
    total_variance /= (n - 1) as f64;
    let x = r_acc.expect("at least two frames");

    let svd = x.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut components = DMatrix::<f64>::zeros(k, d);
    let mut explained_variance = Vec::with_capacity(k);
    for (i, &src) in order.iter().take(k).enumerate() {
        let mut comp = v_t.row(src).into_owned();
        let pivot = comp
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            comp.neg_mut();
        }
        components.set_row(i, &comp);
        let s = svd.singular_values[src];
        explained_variance.push(s * s / (n - 1) as f64);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        total_variance,
    })
}

/// Projects centered frames onto the components (`k` output channels).
pub fn pca_apply(model: &PcaModel, m: &SignalMatrix) -> Result<SignalMatrix> {
    let d = model.dim();
    if m.n_channels() != d {
        return Err(Error::Dimension(format!(
            "PCA model expects {d} channels, input has {}",
            m.n_channels()
        )));
    }
    let k = model.k();
    let mut data = Vec::with_capacity(m.n_frames() * k);
    let mut centered = vec![0.0; d];
    for frame in m.data().chunks_exact(d) {
        for c in 0..d {
            centered[c] = frame[c] - model.mean[c];
        }
        for j in 0..k {
            let row = model.components.row(j);
            data.push(row.iter().zip(&centered).map(|(a, b)| a * b).sum());
        }
    }
    let mut out = SignalMatrix::new(k, m.n_frames(), m.sample_rate_hz(), data)?;
    out.meta = m.meta.clone();
    out.meta.insert("pca_k".into(), k.to_string());
    Ok(out)
}

/// Maps component scores back to feature space (adds the mean back).
pub fn pca_inverse(model: &PcaModel, scores: &SignalMatrix) -> Result<SignalMatrix> {
    let k = model.k();
    if scores.n_channels() != k {
        return Err(Error::Dimension(format!(
            "PCA model has {k} components, input has {} channels",
            scores.n_channels()
        )));
    }
    let d = model.dim();
    let mut data = Vec::with_capacity(scores.n_frames() * d);
    for frame in scores.data().chunks_exact(k) {
        for c in 0..d {
            let v: f64 = (0..k).map(|j| model.components[(j, c)] * frame[j]).sum();
            data.push(v + model.mean[c]);
        }
    }
    SignalMatrix::new(d, scores.n_frames(), scores.sample_rate_hz(), data)
}
