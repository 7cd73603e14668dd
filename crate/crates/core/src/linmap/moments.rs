//! Additive sufficient statistics for ridge regression on lagged designs.
//!
//! Per-trial moments are computed once and summed over the training trials of
//! each fold; affine feature preprocessing fitted inside a fold is applied to
//! the summed moments exactly, so no trial is ever re-lagged per fold.

use std::ops::AddAssign;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lag::LagWindow;
use crate::linmap::design::{
    check_rate, lagged_colsum, lagged_cross, lagged_gram, lagged_mask_sums, mask_overlap, mask_target_sums,
};
use crate::linmap::prep::FeatureMap;
use crate::signal::{SignalMatrix, TrialSignals};

/// `n`, `Dᵀ1`, `DᵀD`, `DᵀY`, `Yᵀ1` for one or more stacked trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n_rows: usize,
    pub col_sum: DVector<f64>,
    pub gram: DMatrix<f64>,
    pub cross: DMatrix<f64>,
    pub target_sum: DVector<f64>,
}

impl Moments {
    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            n_rows: 0,
            col_sum: DVector::zeros(p),
            gram: DMatrix::zeros(p, p),
            cross: DMatrix::zeros(p, q),
            target_sum: DVector::zeros(q),
        }
    }

    /// Moments of an explicit design/target pair.
    pub fn from_dense(design: &DMatrix<f64>, targets: &DMatrix<f64>) -> Result<Self> {
        if design.nrows() != targets.nrows() {
            return Err(Error::Dimension(format!(
                "design has {} rows, targets have {}",
                design.nrows(),
                targets.nrows()
            )));
        }
        Ok(Self {
            n_rows: design.nrows(),
            col_sum: DVector::from_iterator(design.ncols(), design.column_iter().map(|c| c.sum())),
            gram: design.transpose() * design,
            cross: design.transpose() * targets,
            target_sum: DVector::from_iterator(targets.ncols(), targets.column_iter().map(|c| c.sum())),
        })
    }

    /// Moments of `input` lagged by `lag` against unlagged `targets`.
    pub fn from_signals(input: &SignalMatrix, targets: &SignalMatrix, lag: &LagWindow) -> Result<Self> {
        check_rate(input, lag)?;
        input.check_same_shape_frames(targets)?;
        let shifts = lag.shifts();
        let xs = input.channels();
        let ys = targets.channels();
        Ok(Self {
            n_rows: input.n_frames(),
            col_sum: lagged_colsum(&xs, &shifts),
            gram: lagged_gram(&xs, &shifts),
            cross: lagged_cross(&xs, &ys, &shifts),
            target_sum: DVector::from_iterator(ys.len(), ys.iter().map(|y| y.iter().sum())),
        })
    }

    pub fn n_params(&self) -> usize {
        self.gram.nrows()
    }

    pub fn n_targets(&self) -> usize {
        self.cross.ncols()
    }
}

impl AddAssign<&Moments> for Moments {
    fn add_assign(&mut self, rhs: &Moments) {
        self.n_rows += rhs.n_rows;
        self.col_sum += &rhs.col_sum;
        self.gram += &rhs.gram;
        self.cross += &rhs.cross;
        self.target_sum += &rhs.target_sum;
    }
}

impl SignalMatrix {
    pub(crate) fn check_same_shape_frames(&self, other: &SignalMatrix) -> Result<()> {
        if self.n_frames() != other.n_frames() || self.sample_rate_hz() != other.sample_rate_hz() {
            return Err(Error::Dimension(format!(
                "input has {} frames at {} Hz, targets {} frames at {} Hz",
                self.n_frames(),
                self.sample_rate_hz(),
                other.n_frames(),
                other.sample_rate_hz()
            )));
        }
        Ok(())
    }
}

/// Raw backward-model statistics of one trial: lagged neural input against
/// the unpreprocessed attended and unattended features.
#[derive(Debug, Clone)]
pub struct BackwardTrialMoments {
    pub n_rows: usize,
    pub col_sum: DVector<f64>,
    pub gram: DMatrix<f64>,
    pub cross_attended: DMatrix<f64>,
    pub cross_unattended: DMatrix<f64>,
    pub sum_attended: DVector<f64>,
    pub sum_unattended: DVector<f64>,
}

impl BackwardTrialMoments {
    pub fn compute(trial: &TrialSignals, lag: &LagWindow) -> Result<Self> {
        check_rate(&trial.neural, lag)?;
        let shifts = lag.shifts();
        let xs = trial.neural.channels();
        let att = trial.attended_features().channels();
        let un = trial.unattended_features().channels();
        let sums = |ys: &[Vec<f64>]| DVector::from_iterator(ys.len(), ys.iter().map(|y| y.iter().sum()));
        Ok(Self {
            n_rows: trial.neural.n_frames(),
            col_sum: lagged_colsum(&xs, &shifts),
            gram: lagged_gram(&xs, &shifts),
            cross_attended: lagged_cross(&xs, &att, &shifts),
            cross_unattended: lagged_cross(&xs, &un, &shifts),
            sum_attended: sums(&att),
            sum_unattended: sums(&un),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            n_rows: 0,
            col_sum: DVector::zeros(self.col_sum.len()),
            gram: DMatrix::zeros(self.gram.nrows(), self.gram.ncols()),
            cross_attended: DMatrix::zeros(self.cross_attended.nrows(), self.cross_attended.ncols()),
            cross_unattended: DMatrix::zeros(self.cross_unattended.nrows(), self.cross_unattended.ncols()),
            sum_attended: DVector::zeros(self.sum_attended.len()),
            sum_unattended: DVector::zeros(self.sum_unattended.len()),
        }
    }

    /// Combined moments with targets `[map(attended) | map(unattended)]`.
    pub fn to_moments(&self, map: &FeatureMap) -> Result<Moments> {
        let target = |cross: &DMatrix<f64>, sum: &DVector<f64>| -> Result<(DMatrix<f64>, DVector<f64>)> {
            map.check_input(cross.ncols())?;
            // y' = Aᵀy − u  ⇒  Dᵀy' = (Dᵀy)A − (Dᵀ1)uᵀ,  1ᵀy' = Aᵀ(1ᵀy) − n·u
            let c = cross * &map.a - &self.col_sum * map.u.transpose();
            let s = map.a.transpose() * sum - &map.u * self.n_rows as f64;
            Ok((c, s))
        };
        let (ca, sa) = target(&self.cross_attended, &self.sum_attended)?;
        let (cu, su) = target(&self.cross_unattended, &self.sum_unattended)?;
        let q = ca.ncols();
        let mut cross = DMatrix::zeros(ca.nrows(), 2 * q);
        cross.columns_mut(0, q).copy_from(&ca);
        cross.columns_mut(q, q).copy_from(&cu);
        let mut target_sum = DVector::zeros(2 * q);
        target_sum.rows_mut(0, q).copy_from(&sa);
        target_sum.rows_mut(q, q).copy_from(&su);
        Ok(Moments {
            n_rows: self.n_rows,
            col_sum: self.col_sum.clone(),
            gram: self.gram.clone(),
            cross,
            target_sum,
        })
    }
}

impl AddAssign<&BackwardTrialMoments> for BackwardTrialMoments {
    fn add_assign(&mut self, rhs: &BackwardTrialMoments) {
        self.n_rows += rhs.n_rows;
        self.col_sum += &rhs.col_sum;
        self.gram += &rhs.gram;
        self.cross_attended += &rhs.cross_attended;
        self.cross_unattended += &rhs.cross_unattended;
        self.sum_attended += &rhs.sum_attended;
        self.sum_unattended += &rhs.sum_unattended;
    }
}

/// Raw forward-model statistics of one trial: lagged attended features against
/// neural targets, plus the padding-mask sums needed to apply an affine
/// feature map after lagging.
#[derive(Debug, Clone)]
pub struct ForwardTrialMoments {
    pub base: Moments,
    /// `Σ_t x[c, t − k_j] · v_{j'}[t]`, `(C·L) × L`.
    pub mask_sums: DMatrix<f64>,
    /// `Σ_t v_j[t] v_{j'}[t]`, `L × L`.
    pub mask_overlap: DMatrix<f64>,
    /// `Σ_t v_j[t] r[e, t]`, `L × E`.
    pub mask_targets: DMatrix<f64>,
    pub n_lags: usize,
}

impl ForwardTrialMoments {
    pub fn compute(trial: &TrialSignals, lag: &LagWindow) -> Result<Self> {
        let input = trial.attended_features();
        let base = Moments::from_signals(input, &trial.neural, lag)?;
        let shifts = lag.shifts();
        let xs = input.channels();
        let ys = trial.neural.channels();
        Ok(Self {
            base,
            mask_sums: lagged_mask_sums(&xs, &shifts),
            mask_overlap: mask_overlap(input.n_frames(), &shifts),
            mask_targets: mask_target_sums(&ys, input.n_frames(), &shifts),
            n_lags: shifts.len(),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            base: Moments::zeros(self.base.n_params(), self.base.n_targets()),
            mask_sums: DMatrix::zeros(self.mask_sums.nrows(), self.mask_sums.ncols()),
            mask_overlap: DMatrix::zeros(self.mask_overlap.nrows(), self.mask_overlap.ncols()),
            mask_targets: DMatrix::zeros(self.mask_targets.nrows(), self.mask_targets.ncols()),
            n_lags: self.n_lags,
        }
    }

    /// Moments of the design built from `map`-transformed (then lagged and
    /// zero-padded) features.
    pub fn to_moments(&self, map: &FeatureMap) -> Result<Moments> {
        let l = self.n_lags;
        let c_in = self.base.n_params() / l;
        map.check_input(c_in)?;
        let c_out = map.a.ncols();
        let p = c_out * l;
        let a = &map.a;
        let u = &map.u;

        // Per lag-pair block transform of the Gram: G'_{jj'} = Aᵀ G_{jj'} A.
        let mut gram = DMatrix::<f64>::zeros(p, p);
        let mut block = DMatrix::<f64>::zeros(c_in, c_in);
        for j in 0..l {
            for jp in 0..l {
                for c1 in 0..c_in {
                    for c2 in 0..c_in {
                        block[(c1, c2)] = self.base.gram[(c1 * l + j, c2 * l + jp)];
                    }
                }
                let t = a.transpose() * &block * a;
                for x in 0..c_out {
                    for y in 0..c_out {
                        gram[(x * l + j, y * l + jp)] = t[(x, y)];
                    }
                }
            }
        }
        // M[(x, j), j'] = Σ_c A[c, x] · S[(c, j), j']
        let mut m = DMatrix::<f64>::zeros(p, l);
        for j in 0..l {
            for jp in 0..l {
                for x in 0..c_out {
                    let mut s = 0.0;
                    for c in 0..c_in {
                        s += a[(c, x)] * self.mask_sums[(c * l + j, jp)];
                    }
                    m[(x * l + j, jp)] = s;
                }
            }
        }
        for x in 0..c_out {
            for j in 0..l {
                for y in 0..c_out {
                    for jp in 0..l {
                        let r = x * l + j;
                        let s = y * l + jp;
                        gram[(r, s)] += -u[y] * m[(r, jp)] - u[x] * m[(s, j)] + u[x] * u[y] * self.mask_overlap[(j, jp)];
                    }
                }
            }
        }

        let q = self.base.n_targets();
        let mut col_sum = DVector::<f64>::zeros(p);
        let mut cross = DMatrix::<f64>::zeros(p, q);
        for x in 0..c_out {
            for j in 0..l {
                let r = x * l + j;
                let mut cs = -u[x] * self.mask_overlap[(j, j)];
                for c in 0..c_in {
                    cs += a[(c, x)] * self.base.col_sum[c * l + j];
                }
                col_sum[r] = cs;
                for e in 0..q {
                    let mut v = -u[x] * self.mask_targets[(j, e)];
                    for c in 0..c_in {
                        v += a[(c, x)] * self.base.cross[(c * l + j, e)];
                    }
                    cross[(r, e)] = v;
                }
            }
        }
        Ok(Moments {
            n_rows: self.base.n_rows,
            col_sum,
            gram,
            cross,
            target_sum: self.base.target_sum.clone(),
        })
    }
}

impl AddAssign<&ForwardTrialMoments> for ForwardTrialMoments {
    fn add_assign(&mut self, rhs: &ForwardTrialMoments) {
        self.base += &rhs.base;
        self.mask_sums += &rhs.mask_sums;
        self.mask_overlap += &rhs.mask_overlap;
        self.mask_targets += &rhs.mask_targets;
    }
}
