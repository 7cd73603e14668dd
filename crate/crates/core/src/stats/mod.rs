//! Correlation, paired t-tests and per-electrode improvement maps.

mod improvement;
mod special;
mod ttest;

pub use improvement::{improvement_map, ImprovementMap};
pub use special::{beta_inc, ln_gamma, student_t_two_sided};
pub use ttest::{paired_t_test, TTestResult};

use crate::error::{Error, Result};

/// Sample Pearson correlation; 0 when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("pearson: lengths {} and {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Dimension(format!("pearson needs at least 2 samples, got {}", x.len())));
    }
    Ok(pearson_unchecked(x, y))
}

pub(crate) fn pearson_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if is_constant(x) || is_constant(y) || sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}
