//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use aadkit::linmap::SpatioTemporalFilter;
use aadkit::SignalMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, channels: usize, frames: usize, rate: f64) -> SignalMatrix {
    let data = (0..channels * frames).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    SignalMatrix::new(channels, frames, rate, data).unwrap()
}

/// Textbook one-pass Pearson correlation.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Ridge with unpenalized intercept from explicitly centered data, solved by LU.
pub fn ridge_normal_equations(d: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = d.nrows();
    let mu = d.row_mean();
    let nu = y.row_mean();
    let mut dc = d.clone();
    let mut yc = y.clone();
    for i in 0..n {
        for j in 0..d.ncols() {
            dc[(i, j)] -= mu[j];
        }
        for j in 0..y.ncols() {
            yc[(i, j)] -= nu[j];
        }
    }
    let p = d.ncols();
    let mut g = dc.transpose() * &dc;
    let shift = lambda * g.trace() / p as f64;
    for i in 0..p {
        g[(i, i)] += shift;
    }
    let w = g.lu().solve(&(dc.transpose() * &yc)).expect("nonsingular oracle system");
    let bias = DVector::from_iterator(y.ncols(), (0..y.ncols()).map(|q| nu[q] - (0..p).map(|i| w[(i, q)] * mu[i]).sum::<f64>()));
    (w, bias)
}

/// `out[n, t] = bias[n] + Σ_e Σ_j w[n, e, j] · in[e, t − k_j]` with zero padding.
pub fn apply_filter_direct(g: &SpatioTemporalFilter, input: &SignalMatrix) -> Vec<Vec<f64>> {
    let shifts = g.lags.shifts();
    let t_len = input.n_frames() as i64;
    (0..g.n_out())
        .map(|n| {
            (0..t_len)
                .map(|t| {
                    let mut acc = g.bias[n];
                    for e in 0..g.n_in() {
                        for (j, &k) in shifts.iter().enumerate() {
                            let src = t - k;
                            if (0..t_len).contains(&src) {
                                acc += g.weight(n, e, j) * input.get(e, src as usize);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenpairs sorted
/// by decreasing eigenvalue, eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Sample covariance (divisor N − 1) of pooled frames.
pub fn covariance(ms: &[&SignalMatrix]) -> DMatrix<f64> {
    let d = ms[0].n_channels();
    let n: usize = ms.iter().map(|m| m.n_frames()).sum();
    let mut mean = vec![0.0; d];
    for m in ms {
        for t in 0..m.n_frames() {
            for c in 0..d {
                mean[c] += m.get(c, t) / n as f64;
            }
        }
    }
    let mut cov = DMatrix::zeros(d, d);
    for m in ms {
        for t in 0..m.n_frames() {
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += (m.get(i, t) - mean[i]) * (m.get(j, t) - mean[j]);
                }
            }
        }
    }
    cov / (n - 1) as f64
}

/// Four-term AMI of one window computed from scratch.
pub fn ami_direct(xa: &SignalMatrix, xu: &SignalMatrix, x1: &SignalMatrix, x2: &SignalMatrix, start: usize, len: usize) -> f64 {
    let mean_r = |a: &SignalMatrix, b: &SignalMatrix| {
        (0..a.n_channels())
            .map(|c| pearson_direct(&a.channel(c)[start..start + len], &b.channel(c)[start..start + len]))
            .sum::<f64>()
            / a.n_channels() as f64
    };
    mean_r(xa, x1) - mean_r(xa, x2) + mean_r(xu, x2) - mean_r(xu, x1)
}
