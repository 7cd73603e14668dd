use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::special::student_t_two_sided;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub p_two_sided: f64,
}

/// Paired two-sided t-test on `a − b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("paired t-test: lengths {} and {}", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::DegenerateTest(format!("need at least 2 pairs, got {n}")));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|&v| v == d[0]) {
        return Err(Error::DegenerateTest(format!(
            "all {n} paired differences equal {}; the statistic is undefined",
            d[0]
        )));
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let df = n - 1;
    Ok(TTestResult {
        t,
        df,
        p_two_sided: student_t_two_sided(t, df as f64),
    })
}
