use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

/// Per-channel linear interpolation onto a denser uniform grid.
///
/// The first output frame coincides with the first input frame and the output
/// has `floor((n − 1) · out / in) + 1` frames, so nothing is extrapolated past
/// the last input frame.
pub fn resample_linear(m: &SignalMatrix, out_rate_hz: f64) -> Result<SignalMatrix> {
    let in_rate = m.sample_rate_hz();
    if !(out_rate_hz.is_finite() && out_rate_hz > 0.0) {
        return Err(Error::UnsupportedRate(format!("invalid output rate {out_rate_hz} Hz")));
    }
    if out_rate_hz < in_rate {
        return Err(Error::UnsupportedRate(format!(
            "resample_linear only upsamples ({in_rate} Hz -> {out_rate_hz} Hz requested)"
        )));
    }
    let n = m.n_frames();
    let c = m.n_channels();
    let ratio = out_rate_hz / in_rate;
    let n_out = (((n - 1) as f64 * ratio) + 1e-9).floor() as usize + 1;
    let mut data = Vec::with_capacity(n_out * c);
    for i in 0..n_out {
        let pos = i as f64 * in_rate / out_rate_hz;
        let j = (pos.floor() as usize).min(n - 1);
        let frac = pos - j as f64;
        if j + 1 >= n || frac <= 0.0 {
            data.extend_from_slice(m.frame(j));
        } else {
            let (a, b) = (m.frame(j), m.frame(j + 1));
            data.extend(a.iter().zip(b).map(|(x, y)| x + frac * (y - x)));
        }
    }
    let mut out = SignalMatrix::new(c, n_out, out_rate_hz, data)?;
    out.meta = m.meta.clone();
    out.meta.insert("resampled_from_hz".into(), in_rate.to_string());
    Ok(out)
}
