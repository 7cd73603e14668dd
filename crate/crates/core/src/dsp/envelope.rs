use std::f64::consts::PI;

use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

pub const ENVELOPE_TAPS: usize = 401;
pub const ENVELOPE_CUTOFF_HZ: f64 = 20.0;

/// Hamming-windowed sinc lowpass with unit DC gain.
pub fn lowpass_taps(n_taps: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Vec<f64> {
    let fc = cutoff_hz / sample_rate_hz;
    let mid = (n_taps - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..n_taps)
        .map(|k| {
            let x = k as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * x).sin() / (PI * x)
            };
            let window = if n_taps > 1 {
                0.54 - 0.46 * (2.0 * PI * k as f64 / (n_taps - 1) as f64).cos()
            } else {
                1.0
            };
            sinc * window
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Broadband amplitude envelope: full-wave rectification, 20 Hz FIR lowpass
/// (group delay compensated, so zero-phase), then decimation to `out_rate_hz`.
///
/// Output has `floor(duration · out_rate)` frames.
pub fn envelope(w: &Waveform, out_rate_hz: f64) -> Result<SignalMatrix> {
    let ratio = w.sample_rate_hz / out_rate_hz;
    if !(ratio.is_finite() && ratio >= 1.0) || (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::UnsupportedRate(format!(
            "output rate {out_rate_hz} Hz does not divide input rate {} Hz",
            w.sample_rate_hz
        )));
    }
    let factor = ratio.round() as usize;
    let n_out = w.samples.len() / factor;
    if n_out == 0 {
        return Err(Error::TooShort(format!(
            "{} samples yield no frame at {out_rate_hz} Hz",
            w.samples.len()
        )));
    }
    let taps = lowpass_taps(ENVELOPE_TAPS, ENVELOPE_CUTOFF_HZ, w.sample_rate_hz);
    let delay = (ENVELOPE_TAPS - 1) / 2;
    let rectified: Vec<f64> = w.samples.iter().map(|v| v.abs()).collect();
    let n = rectified.len() as isize;

    let out: Vec<f64> = (0..n_out)
        .map(|i| {
            // y[c] = Σ_k h[k]·x[c + delay − k]
            let centre = (i * factor + delay) as isize;
            taps.iter()
                .enumerate()
                .filter_map(|(k, h)| {
                    let idx = centre - k as isize;
                    (0..n).contains(&idx).then(|| h * rectified[idx as usize])
                })
                .sum()
        })
        .collect();

    Ok(SignalMatrix::new(1, n_out, out_rate_hz, out)?.with_meta("feature", "envelope"))
}
