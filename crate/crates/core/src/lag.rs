use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive window of time lags, in milliseconds, on a fixed sample grid.
///
/// A lag `τ` pairs output frame `t` with input frame `t − τ`: positive lags
/// read the past of the input, negative lags its future.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagWindow {
    pub lag_min_ms: i64,
    pub lag_max_ms: i64,
    pub rate_hz: f64,
}

impl LagWindow {
    pub fn new(lag_min_ms: i64, lag_max_ms: i64, rate_hz: f64) -> Result<Self> {
        let lag = Self {
            lag_min_ms,
            lag_max_ms,
            rate_hz,
        };
        lag.validate()?;
        Ok(lag)
    }

    /// Stimulus-reconstruction default: −400 ms (neural future) to +100 ms (neural past).
    pub fn backward_default(rate_hz: f64) -> Self {
        Self {
            lag_min_ms: -400,
            lag_max_ms: 100,
            rate_hz,
        }
    }

    /// Forward (encoding) default: 0 to 200 ms.
    pub fn forward_default(rate_hz: f64) -> Self {
        Self {
            lag_min_ms: 0,
            lag_max_ms: 200,
            rate_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag_min_ms > self.lag_max_ms {
            return Err(Error::LagGrid(format!(
                "lag_min {} ms exceeds lag_max {} ms",
                self.lag_min_ms, self.lag_max_ms
            )));
        }
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::LagGrid(format!("invalid lag rate {} Hz", self.rate_hz)));
        }
        self.to_samples(self.lag_min_ms)?;
        self.to_samples(self.lag_max_ms)?;
        Ok(())
    }

    fn to_samples(&self, ms: i64) -> Result<i64> {
        let exact = ms as f64 * self.rate_hz / 1000.0;
        let rounded = exact.round();
        if (exact - rounded).abs() > 1e-9 {
            return Err(Error::LagGrid(format!(
                "{ms} ms is {exact} samples at {} Hz, not an integer shift",
                self.rate_hz
            )));
        }
        Ok(rounded as i64)
    }

    pub fn min_samples(&self) -> i64 {
        self.to_samples(self.lag_min_ms).expect("validated lag window")
    }

    pub fn max_samples(&self) -> i64 {
        self.to_samples(self.lag_max_ms).expect("validated lag window")
    }

    /// Integer sample shifts, ascending.
    pub fn shifts(&self) -> Vec<i64> {
        (self.min_samples()..=self.max_samples()).collect()
    }

    pub fn n_lags(&self) -> usize {
        (self.max_samples() - self.min_samples() + 1) as usize
    }
}
