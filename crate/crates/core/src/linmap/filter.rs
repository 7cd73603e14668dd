use std::path::Path;

use nalgebra::DMatrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftr::{read_matrix_file, write_matrix_file};
use crate::lag::LagWindow;
use crate::linmap::design::check_rate;
use crate::linmap::ridge::RidgeSolution;
use crate::signal::SignalMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Backward,
    Forward,
}

impl Direction {
    fn as_str(self) -> &'static str {
        match self {
            Direction::Backward => "backward",
            Direction::Forward => "forward",
        }
    }
}

/// Lagged linear map `out[n, t] = bias[n] + Σ_e Σ_j w[n, e, j] · in[e, t − k_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatioTemporalFilter {
    n_out: usize,
    n_in: usize,
    /// Indexed `[(n · n_in + e) · n_lags + j]`.
    weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub lags: LagWindow,
    pub direction: Direction,
}

impl SpatioTemporalFilter {
    pub fn new(
        n_out: usize,
        n_in: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        lags: LagWindow,
        direction: Direction,
    ) -> Result<Self> {
        lags.validate()?;
        let l = lags.n_lags();
        if weights.len() != n_out * n_in * l || bias.len() != n_out {
            return Err(Error::Dimension(format!(
                "filter {n_out}×{n_in}×{l} needs {} weights and {n_out} biases, got {} and {}",
                n_out * n_in * l,
                weights.len(),
                bias.len()
            )));
        }
        if !weights.iter().chain(&bias).all(|v| v.is_finite()) {
            return Err(Error::Validation("filter has non-finite coefficients".into()));
        }
        Ok(Self {
            n_out,
            n_in,
            weights,
            bias,
            lags,
            direction,
        })
    }

    /// Filter from a ridge solution whose design row index is `e · n_lags + j`
    /// and target column index is `n`.
    pub fn from_solution(sol: &RidgeSolution, n_in: usize, lags: LagWindow, direction: Direction) -> Result<Self> {
        let l = lags.n_lags();
        if sol.weights.nrows() != n_in * l {
            return Err(Error::Dimension(format!(
                "solution has {} rows, expected {n_in} inputs × {l} lags",
                sol.weights.nrows()
            )));
        }
        let n_out = sol.weights.ncols();
        let mut weights = Vec::with_capacity(n_out * n_in * l);
        for n in 0..n_out {
            for r in 0..n_in * l {
                weights.push(sol.weights[(r, n)]);
            }
        }
        Self::new(n_out, n_in, weights, sol.bias.iter().copied().collect(), lags, direction)
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_lags(&self) -> usize {
        self.lags.n_lags()
    }

    pub fn weight(&self, n: usize, e: usize, j: usize) -> f64 {
        self.weights[(n * self.n_in + e) * self.n_lags() + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Encodes as a matrix with `n_out · n_in` channels and one frame per lag.
    pub fn to_matrix(&self) -> Result<SignalMatrix> {
        let l = self.n_lags();
        let c = self.n_out * self.n_in;
        let mut data = vec![0.0; c * l];
        for (idx, &w) in self.weights.iter().enumerate() {
            let (ch, j) = (idx / l, idx % l);
            data[j * c + ch] = w;
        }
        let bias = serde_json::to_string(&self.bias).expect("finite biases serialize");
        Ok(SignalMatrix::new(c, l, self.lags.rate_hz, data)?
            .with_meta("kind", "spatiotemporal_filter")
            .with_meta("direction", self.direction.as_str())
            .with_meta("n_out", self.n_out.to_string())
            .with_meta("n_in", self.n_in.to_string())
            .with_meta("lag_min_ms", self.lags.lag_min_ms.to_string())
            .with_meta("lag_max_ms", self.lags.lag_max_ms.to_string())
            .with_meta("bias", bias))
    }

    pub fn from_matrix(m: &SignalMatrix) -> Result<Self> {
        let get = |k: &str| {
            m.meta
                .get(k)
                .ok_or_else(|| Error::Format(format!("filter metadata lacks '{k}'")))
        };
        let num = |k: &str| -> Result<i64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Format(format!("filter metadata '{k}' is not an integer")))
        };
        let direction = match get("direction")?.as_str() {
            "backward" => Direction::Backward,
            "forward" => Direction::Forward,
            other => return Err(Error::Format(format!("unknown filter direction '{other}'"))),
        };
        let lags = LagWindow::new(num("lag_min_ms")?, num("lag_max_ms")?, m.sample_rate_hz())?;
        let (n_out, n_in) = (num("n_out")? as usize, num("n_in")? as usize);
        let bias: Vec<f64> = serde_json::from_str(get("bias")?).map_err(|source| Error::Json {
            context: "filter bias".into(),
            source,
        })?;
        let (c, l) = (m.n_channels(), m.n_frames());
        if c != n_out * n_in || l != lags.n_lags() {
            return Err(Error::Dimension(format!(
                "filter file is {c}×{l}, metadata implies {}×{}",
                n_out * n_in,
                lags.n_lags()
            )));
        }
        let mut weights = vec![0.0; c * l];
        for j in 0..l {
            for ch in 0..c {
                weights[ch * l + j] = m.get(ch, j);
            }
        }
        Self::new(n_out, n_in, weights, bias, lags, direction)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_matrix_file(&self.to_matrix()?, path)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_matrix(&read_matrix_file(path)?)
    }
}

/// Convolves `input` with `g` (zero-padded edges, same frame count).
pub fn apply_filter(g: &SpatioTemporalFilter, input: &SignalMatrix) -> Result<SignalMatrix> {
    if input.n_channels() != g.n_in {
        return Err(Error::Dimension(format!(
            "filter expects {} input channels, got {}",
            g.n_in,
            input.n_channels()
        )));
    }
    check_rate(input, &g.lags)?;
    let shifts = g.lags.shifts();
    let (n_in, n_out, t_len) = (g.n_in, g.n_out, input.n_frames());
    // Row-major frames are the column-major layout of the transpose.
    let x = DMatrix::from_column_slice(n_in, t_len, input.data()).transpose();
    let mut out = DMatrix::<f64>::zeros(t_len, n_out);
    for (j, &k) in shifts.iter().enumerate() {
        // rows t with 0 <= t − k < T
        let t0 = k.max(0) as usize;
        let t1 = (t_len as i64 + k.min(0)).max(0) as usize;
        if t0 >= t1 {
            continue;
        }
        let w = DMatrix::from_fn(n_in, n_out, |e, n| g.weight(n, e, j));
        let src = (t0 as i64 - k) as usize;
        out.rows_mut(t0, t1 - t0).gemm(1.0, &x.rows(src, t1 - t0), &w, 1.0);
    }
    let mut data = out.transpose().as_slice().to_vec();
    for frame in data.chunks_exact_mut(n_out) {
        frame.iter_mut().zip(&g.bias).for_each(|(v, b)| *v += b);
    }
    SignalMatrix::new(n_out, t_len, input.sample_rate_hz(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_filter_gives_bias() {
        let lags = LagWindow::new(-20, 20, 100.0).unwrap();
        let g = SpatioTemporalFilter::new(2, 1, vec![0.0; 10], vec![1.5, -2.0], lags, Direction::Forward).unwrap();
        let x = SignalMatrix::from_channels(&[vec![1.0, 2.0, 3.0, 4.0]], 100.0).unwrap();
        let y = apply_filter(&g, &x).unwrap();
        assert_eq!(y.channel(0), vec![1.5; 4]);
        assert_eq!(y.channel(1), vec![-2.0; 4]);
    }

    #[test]
    fn identity_at_lag_zero() {
        let lags = LagWindow::new(0, 0, 100.0).unwrap();
        let g = SpatioTemporalFilter::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 2], lags, Direction::Forward).unwrap();
        let x = SignalMatrix::from_channels(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 9.0]], 100.0).unwrap();
        assert_eq!(apply_filter(&g, &x).unwrap().data(), x.data());
    }

    #[test]
    fn channel_mismatch() {
        let lags = LagWindow::new(0, 0, 100.0).unwrap();
        let g = SpatioTemporalFilter::new(1, 2, vec![1.0, 1.0], vec![0.0], lags, Direction::Backward).unwrap();
        let x = SignalMatrix::zeros(3, 5, 100.0).unwrap();
        assert!(matches!(apply_filter(&g, &x), Err(Error::Dimension(_))));
    }

    #[test]
    fn matrix_round_trip() {
        let lags = LagWindow::new(-10, 20, 100.0).unwrap();
        let w: Vec<f64> = (0..2 * 3 * 4).map(|i| i as f64 * 0.25 - 1.0).collect();
        let g = SpatioTemporalFilter::new(2, 3, w, vec![0.1, 0.2], lags, Direction::Backward).unwrap();
        let back = SpatioTemporalFilter::from_matrix(&g.to_matrix().unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
