//! Lagged design matrices and their second-order moments.
//!
//! Column `c · n_lags + j` of a design holds input channel `c` shifted by the
//! `j`-th lag `k_j` (in samples): row `t` reads `x[c, t − k_j]`, zero outside
//! the trial. The moment routines below produce `DᵀD`, `Dᵀ1`, `DᵀY` directly
//! from the signals without materializing `D`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lag::LagWindow;
use crate::signal::SignalMatrix;

pub(crate) fn check_rate(m: &SignalMatrix, lag: &LagWindow) -> Result<()> {
    lag.validate()?;
    if m.sample_rate_hz() != lag.rate_hz {
        return Err(Error::LagGrid(format!(
            "lag window defined at {} Hz but signal sampled at {} Hz",
            lag.rate_hz,
            m.sample_rate_hz()
        )));
    }
    Ok(())
}

/// Valid source range `s` for shift `k`: `0 <= s < T` and `0 <= s + k < T`.
#[inline]
fn overlap(t_len: usize, k: i64) -> (usize, usize) {
    let t = t_len as i64;
    let lo = 0.max(-k).min(t);
    let hi = t.min(t - k).max(lo);
    (lo as usize, hi as usize)
}

/// `T × C` matrix whose columns are the given channels.
pub(crate) fn channel_matrix(xs: &[Vec<f64>]) -> DMatrix<f64> {
    let t_len = xs.first().map_or(0, Vec::len);
    DMatrix::from_iterator(t_len, xs.len(), xs.iter().flatten().copied())
}

/// Explicit `n_frames × (n_channels · n_lags)` design matrix.
pub fn build_lagged_design(m: &SignalMatrix, lag: &LagWindow) -> Result<DMatrix<f64>> {
    check_rate(m, lag)?;
    let shifts = lag.shifts();
    let (t_len, c_len, l_len) = (m.n_frames(), m.n_channels(), shifts.len());
    let mut d = DMatrix::<f64>::zeros(t_len, c_len * l_len);
    for c in 0..c_len {
        for (j, &k) in shifts.iter().enumerate() {
            let col = c * l_len + j;
            for t in 0..t_len {
                let src = t as i64 - k;
                if (0..t_len as i64).contains(&src) {
                    d[(t, col)] = m.get(c, src as usize);
                }
            }
        }
    }
    Ok(d)
}

/// `DᵀD` for the lagged design of channel-major signals `xs`.
///
/// Entry `((c1, j1), (c2, j2))` is a cross-correlation of channels `c1`, `c2`
/// at lag difference `k1 − k2`, restricted to rows where both shifted samples
/// exist. One full-overlap dot product per `(c1, c2, k1 − k2)` is corrected by
/// short head/tail partial sums.
pub(crate) fn lagged_gram(xs: &[Vec<f64>], shifts: &[i64]) -> DMatrix<f64> {
    let c_len = xs.len();
    let l_len = shifts.len();
    let t_len = xs.first().map_or(0, Vec::len);
    let p = c_len * l_len;
    let mut g = DMatrix::<f64>::zeros(p, p);
    if t_len == 0 {
        return g;
    }
    let x = channel_matrix(xs);
    let xt = x.transpose();
    let k_min = shifts[0];
    let k_max = shifts[l_len - 1];
    let max_head = (-k_min).max(0) as usize;
    let max_tail = k_max.max(0) as usize;
    let mut head = Vec::with_capacity(max_head + 1);
    let mut tail = Vec::with_capacity(max_tail + 1);

    // d = k1 − k2 = j1 − j2 on a unit-step grid
    for d in -(l_len as i64 - 1)..=(l_len as i64 - 1) {
        let (a, b) = overlap(t_len, d);
        if a >= b {
            continue;
        }
        let len = b - a;
        // full[c1, c2] = Σ_{s ∈ [a, b)} x[c1, s] · x[c2, s + d]; the block at −d is its transpose.
        let full = if d >= 0 {
            xt.columns(a, len) * x.rows(a + d as usize, len)
        } else {
            let (a2, _) = overlap(t_len, -d);
            (xt.columns(a2, len) * x.rows(a2 + (-d) as usize, len)).transpose()
        };
        for c1 in 0..c_len {
            for c2 in 0..c_len {
                let (x1, x2) = (&xs[c1], &xs[c2]);
                let prod = |s: usize| x1[s] * x2[(s as i64 + d) as usize];
                head.clear();
                head.push(0.0);
                for h in 0..max_head.min(len) {
                    let prev = head[h];
                    head.push(prev + prod(a + h));
                }
                tail.clear();
                tail.push(0.0);
                for h in 0..max_tail.min(len) {
                    let prev = tail[h];
                    tail.push(prev + prod(b - 1 - h));
                }
                let j1_lo = d.max(0) as usize;
                let j1_hi = ((l_len as i64 - 1) + d).min(l_len as i64 - 1) as usize;
                for j1 in j1_lo..=j1_hi {
                    let j2 = (j1 as i64 - d) as usize;
                    let k1 = shifts[j1];
                    let lo = a.max((-k1).max(0) as usize);
                    let hi = b.min((t_len as i64 - k1).max(0) as usize);
                    let v = if lo >= hi {
                        0.0
                    } else {
                        full[(c1, c2)] - head[lo - a] - tail[b - hi]
                    };
                    g[(c1 * l_len + j1, c2 * l_len + j2)] = v;
                }
            }
        }
    }
    g
}

/// `Dᵀ1`: per-column sums of the lagged design.
pub(crate) fn lagged_colsum(xs: &[Vec<f64>], shifts: &[i64]) -> DVector<f64> {
    let l_len = shifts.len();
    let mut out = DVector::<f64>::zeros(xs.len() * l_len);
    for (c, x) in xs.iter().enumerate() {
        let mut prefix = Vec::with_capacity(x.len() + 1);
        prefix.push(0.0);
        for v in x {
            let last = *prefix.last().unwrap();
            prefix.push(last + v);
        }
        for (j, &k) in shifts.iter().enumerate() {
            let (lo, hi) = overlap(x.len(), k);
            out[c * l_len + j] = prefix[hi] - prefix[lo];
        }
    }
    out
}

/// `DᵀY` for channel-major targets `ys` aligned with `xs`.
pub(crate) fn lagged_cross(xs: &[Vec<f64>], ys: &[Vec<f64>], shifts: &[i64]) -> DMatrix<f64> {
    let l_len = shifts.len();
    let mut out = DMatrix::<f64>::zeros(xs.len() * l_len, ys.len());
    let t_len = xs.first().map_or(0, Vec::len);
    if t_len == 0 || ys.is_empty() {
        return out;
    }
    let xt = channel_matrix(xs).transpose();
    let y = channel_matrix(ys);
    for (j, &k) in shifts.iter().enumerate() {
        let (lo, hi) = overlap(t_len, k);
        if lo >= hi {
            continue;
        }
        let block = xt.columns(lo, hi - lo) * y.rows((lo as i64 + k) as usize, hi - lo);
        for c in 0..xs.len() {
            out.row_mut(c * l_len + j).copy_from(&block.row(c));
        }
    }
    out
}

/// Row-validity indicator of lag `j`: 1 where `0 <= t − k_j < T`.
#[inline]
fn valid_rows(t_len: usize, k: i64) -> (usize, usize) {
    let t = t_len as i64;
    let lo = k.max(0).min(t);
    let hi = (t + k).min(t).max(lo);
    (lo as usize, hi as usize)
}

/// `Σ_t x[c, t − k_j] · v_{j'}[t]`, shape `(C·L) × L`.
pub(crate) fn lagged_mask_sums(xs: &[Vec<f64>], shifts: &[i64]) -> DMatrix<f64> {
    let l_len = shifts.len();
    let mut out = DMatrix::<f64>::zeros(xs.len() * l_len, l_len);
    for (c, x) in xs.iter().enumerate() {
        let t_len = x.len();
        let mut prefix = Vec::with_capacity(t_len + 1);
        prefix.push(0.0);
        for v in x {
            let last = *prefix.last().unwrap();
            prefix.push(last + v);
        }
        for (j, &k) in shifts.iter().enumerate() {
            let (r1, r2) = valid_rows(t_len, k);
            for (jp, &kp) in shifts.iter().enumerate() {
                let (q1, q2) = valid_rows(t_len, kp);
                let (lo, hi) = (r1.max(q1), r2.min(q2));
                if lo < hi {
                    // rows t in [lo, hi) read x[t − k]
                    let s_lo = (lo as i64 - k) as usize;
                    let s_hi = (hi as i64 - k) as usize;
                    out[(c * l_len + j, jp)] = prefix[s_hi] - prefix[s_lo];
                }
            }
        }
    }
    out
}

/// `Σ_t v_j[t] v_{j'}[t]`, shape `L × L`.
pub(crate) fn mask_overlap(t_len: usize, shifts: &[i64]) -> DMatrix<f64> {
    let l_len = shifts.len();
    DMatrix::from_fn(l_len, l_len, |j, jp| {
        let (r1, r2) = valid_rows(t_len, shifts[j]);
        let (q1, q2) = valid_rows(t_len, shifts[jp]);
        r2.min(q2).saturating_sub(r1.max(q1)) as f64
    })
}

/// `Σ_t v_j[t] y[n, t]`, shape `L × N`.
pub(crate) fn mask_target_sums(ys: &[Vec<f64>], t_len: usize, shifts: &[i64]) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(shifts.len(), ys.len());
    for (n, y) in ys.iter().enumerate() {
        let mut prefix = Vec::with_capacity(t_len + 1);
        prefix.push(0.0);
        for v in y {
            let last = *prefix.last().unwrap();
            prefix.push(last + v);
        }
        for (j, &k) in shifts.iter().enumerate() {
            let (r1, r2) = valid_rows(t_len, k);
            out[(j, n)] = prefix[r2] - prefix[r1];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(channels: &[Vec<f64>]) -> SignalMatrix {
        SignalMatrix::from_channels(channels, 100.0).unwrap()
    }

    #[test]
    fn identity_lag_is_transpose() {
        let m = signal(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let d = build_lagged_design(&m, &LagWindow::new(0, 0, 100.0).unwrap()).unwrap();
        assert_eq!(d, DMatrix::from_row_slice(3, 2, &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]));
    }

    #[test]
    fn hand_unrolled_shifts() {
        let m = signal(&[vec![1.0, 2.0, 3.0]]);
        let d = build_lagged_design(&m, &LagWindow::new(-10, 10, 100.0).unwrap()).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 3.0, 2.0, 1.0, 0.0, 3.0, 2.0]);
        assert_eq!(d, expected);
    }

    #[test]
    fn column_count() {
        let m = SignalMatrix::zeros(32, 5, 100.0).unwrap();
        let d = build_lagged_design(&m, &LagWindow::backward_default(100.0)).unwrap();
        assert_eq!(d.ncols(), 1632);
    }

    #[test]
    fn rate_mismatch_is_a_lag_grid_error() {
        let m = SignalMatrix::zeros(1, 5, 50.0).unwrap();
        assert!(matches!(
            build_lagged_design(&m, &LagWindow::backward_default(100.0)),
            Err(Error::LagGrid(_))
        ));
    }

    fn wiggly(c: usize, t: usize) -> Vec<Vec<f64>> {
        (0..c)
            .map(|ci| {
                (0..t)
                    .map(|ti| ((ti * (ci + 3)) as f64 * 0.731).sin() + 0.1 * ci as f64)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn structured_moments_match_explicit_design() {
        for (t_len, lo, hi) in [(40, -400, 100), (37, 0, 200), (8, -50, 30), (5, -100, -20), (6, 20, 90)] {
            let xs = wiggly(3, t_len);
            let ys = wiggly(2, t_len);
            let m = signal(&xs);
            let lag = LagWindow::new(lo, hi, 100.0).unwrap();
            let shifts = lag.shifts();
            let d = build_lagged_design(&m, &lag).unwrap();
            let y = DMatrix::from_fn(t_len, 2, |t, n| ys[n][t]);

            let g = lagged_gram(&xs, &shifts);
            assert!((&g - d.transpose() * &d).abs().max() < 1e-12, "gram T={t_len} lags {lo}..{hi}");
            let cs = lagged_colsum(&xs, &shifts);
            let ones = DVector::from_element(t_len, 1.0);
            assert!((&cs - d.transpose() * &ones).abs().max() < 1e-12);
            let cr = lagged_cross(&xs, &ys, &shifts);
            assert!((&cr - d.transpose() * &y).abs().max() < 1e-12);

            // mask indicator matrix V (T × L)
            let v = DMatrix::from_fn(t_len, shifts.len(), |t, j| {
                let s = t as i64 - shifts[j];
                if (0..t_len as i64).contains(&s) { 1.0 } else { 0.0 }
            });
            assert!((lagged_mask_sums(&xs, &shifts) - d.transpose() * &v).abs().max() < 1e-12);
            assert!((mask_overlap(t_len, &shifts) - v.transpose() * &v).abs().max() < 1e-12);
            assert!((mask_target_sums(&ys, t_len, &shifts) - v.transpose() * &y).abs().max() < 1e-12);
        }
    }
}
