use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ttest::paired_t_test;

/// Per-electrode difference in held-out prediction accuracy between two
/// feature families, with insignificant differences zeroed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementMap {
    pub delta_r: Vec<f64>,
    pub significant: Vec<bool>,
    /// `None` where the paired differences were constant.
    pub p_values: Vec<Option<f64>>,
    pub frac_better_a: f64,
    pub frac_better_b: f64,
    pub alpha: f64,
}

/// `r_a[e][f]` / `r_b[e][f]`: electrode `e`, fold `f`. Tests are paired over folds.
pub fn improvement_map(r_a: &[Vec<f64>], r_b: &[Vec<f64>], alpha: f64) -> Result<ImprovementMap> {
    if r_a.len() != r_b.len() || r_a.is_empty() {
        return Err(Error::Dimension(format!(
            "improvement map: {} vs {} electrodes",
            r_a.len(),
            r_b.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Validation(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let n_e = r_a.len();
    let mut out = ImprovementMap {
        delta_r: Vec::with_capacity(n_e),
        significant: Vec::with_capacity(n_e),
        p_values: Vec::with_capacity(n_e),
        frac_better_a: 0.0,
        frac_better_b: 0.0,
        alpha,
    };
    for (e, (a, b)) in r_a.iter().zip(r_b).enumerate() {
        if a.len() != b.len() || a.len() < 2 {
            return Err(Error::Dimension(format!(
                "electrode {e}: {} vs {} folds (need at least 2)",
                a.len(),
                b.len()
            )));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let delta = mean(a) - mean(b);
        let (p, significant) = match paired_t_test(a, b) {
            Ok(t) => (Some(t.p_two_sided), t.p_two_sided <= alpha),
            // Constant differences: a certain difference unless it is zero.
            Err(Error::DegenerateTest(_)) => (None, delta != 0.0),
            Err(other) => return Err(other),
        };
        out.delta_r.push(if significant { delta } else { 0.0 });
        out.significant.push(significant);
        out.p_values.push(p);
    }
    out.frac_better_a = out.delta_r.iter().filter(|&&d| d > 0.0).count() as f64 / n_e as f64;
    out.frac_better_b = out.delta_r.iter().filter(|&&d| d < 0.0).count() as f64 / n_e as f64;
    Ok(out)
}
