use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct MelConfig {
    pub n_bands: usize,
    pub frame_len_ms: f64,
    pub hop_ms: f64,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub log_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self {
            n_bands: 28,
            frame_len_ms: 25.0,
            hop_ms: 10.0,
            fmin_hz: 50.0,
            fmax_hz: 8000.0,
            log_floor: 1e-6,
        }
    }
}

fn whole_samples(ms: f64, rate: f64, what: &str) -> Result<usize> {
    let exact = ms * rate / 1000.0;
    if exact < 1.0 || (exact - exact.round()).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "{what} of {ms} ms is not a whole number of samples at {rate} Hz"
        )));
    }
    Ok(exact.round() as usize)
}

impl MelConfig {
    /// Frame length and hop in samples at `rate`.
    pub fn frame_geometry(&self, rate: f64) -> Result<(usize, usize)> {
        if self.n_bands == 0 {
            return Err(Error::Validation("n_bands must be positive".into()));
        }
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < self.fmax_hz && self.fmax_hz <= rate / 2.0) {
            return Err(Error::Validation(format!(
                "need 0 <= fmin < fmax <= {} Hz, got {}..{}",
                rate / 2.0,
                self.fmin_hz,
                self.fmax_hz
            )));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::Validation("log_floor must be positive".into()));
        }
        let frame = whole_samples(self.frame_len_ms, rate, "frame length")?;
        let hop = whole_samples(self.hop_ms, rate, "hop")?;
        Ok((frame, hop))
    }
}

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters over the `n_fft / 2 + 1` power-spectrum bins, plus each
/// filter's centre frequency.
pub fn mel_filterbank(cfg: &MelConfig, sample_rate_hz: f64, n_fft: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let lo = hz_to_mel(cfg.fmin_hz);
    let hi = hz_to_mel(cfg.fmax_hz);
    let edges: Vec<f64> = (0..cfg.n_bands + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (cfg.n_bands + 1) as f64))
        .collect();
    let n_bins = n_fft / 2 + 1;
    let filters = (0..cfg.n_bands)
        .map(|b| {
            let (left, centre, right) = (edges[b], edges[b + 1], edges[b + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * sample_rate_hz / n_fft as f64;
                    let up = (f - left) / (centre - left);
                    let down = (right - f) / (right - centre);
                    up.min(down).max(0.0)
                })
                .collect()
        })
        .collect();
    (filters, edges[1..=cfg.n_bands].to_vec())
}

/// Log mel-spectrogram at the hop rate (100 Hz for the default 10 ms hop).
///
/// Frames are centred at multiples of the hop with reflect padding, Hann
/// windowed and zero padded to the next power of two. There are
/// `floor(len / hop)` frames, matching [`envelope`](super::envelope).
pub fn mel_spectrogram(w: &Waveform, cfg: &MelConfig) -> Result<SignalMatrix> {
    let rate = w.sample_rate_hz;
    let (frame_len, hop) = cfg.frame_geometry(rate)?;
    let n = w.samples.len();
    if n < frame_len {
        return Err(Error::TooShort(format!(
            "{n} samples is shorter than one {frame_len}-sample frame"
        )));
    }
    let n_fft = frame_len.next_power_of_two();
    let n_frames = n / hop;
    let (filters, _) = mel_filterbank(cfg, rate, n_fft);
    let window: Vec<f64> = (0..frame_len)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / frame_len as f64).cos())
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    let half = (frame_len / 2) as isize;
    let last = n as isize - 1;
    let reflect = |j: isize| -> usize {
        let mut j = j;
        // a couple of reflections suffice: frame_len <= n
        loop {
            if j < 0 {
                j = -j;
            } else if j > last {
                j = 2 * last - j;
            } else {
                return j as usize;
            }
        }
    };

    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let mut power = vec![0.0; n_fft / 2 + 1];
    let mut data = Vec::with_capacity(n_frames * cfg.n_bands);
    for i in 0..n_frames {
        let start = (i * hop) as isize - half;
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (k, wk) in window.iter().enumerate() {
            buf[k].re = wk * w.samples[reflect(start + k as isize)];
        }
        fft.process(&mut buf);
        for (p, c) in power.iter_mut().zip(&buf) {
            *p = c.norm_sqr();
        }
        for filt in &filters {
            let e: f64 = filt.iter().zip(&power).map(|(a, b)| a * b).sum();
            data.push((e + cfg.log_floor).ln());
        }
    }
    Ok(SignalMatrix::new(cfg.n_bands, n_frames, rate / hop as f64, data)?
        .with_meta("feature", "mel")
        .with_meta("n_bands", cfg.n_bands.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, secs: f64) -> Waveform {
        let n = (secs * 16000.0).round() as usize;
        Waveform::new(
            (0..n).map(|i| (2.0 * PI * freq * i as f64 / 16000.0).sin()).collect(),
            16000.0,
        )
        .unwrap()
    }

    #[test]
    fn silence_is_log_floor() {
        let cfg = MelConfig::default();
        let m = mel_spectrogram(&Waveform::new(vec![0.0; 16000], 16000.0).unwrap(), &cfg).unwrap();
        assert_eq!(m.n_channels(), 28);
        assert_eq!(m.sample_rate_hz(), 100.0);
        assert!(m.data().iter().all(|&v| v == cfg.log_floor.ln()));
    }

    #[test]
    fn two_seconds_gives_200_frames() {
        let m = mel_spectrogram(&tone(440.0, 2.0), &MelConfig::default()).unwrap();
        assert!((199..=201).contains(&m.n_frames()));
    }

    #[test]
    fn tone_peaks_in_nearest_band() {
        let cfg = MelConfig::default();
        let (_, centres) = mel_filterbank(&cfg, 16000.0, 512);
        let nearest = centres
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1000.0).abs().total_cmp(&(b.1 - 1000.0).abs()))
            .unwrap()
            .0;
        let m = mel_spectrogram(&tone(1000.0, 1.0), &cfg).unwrap();
        for t in 0..m.n_frames() {
            let frame = m.frame(t);
            let argmax = (0..frame.len()).max_by(|&a, &b| frame[a].total_cmp(&frame[b])).unwrap();
            assert_eq!(argmax, nearest, "frame {t}");
        }
    }

    #[test]
    fn shift_by_one_hop_shifts_one_frame() {
        let cfg = MelConfig::default();
        let n = 16000;
        let sig: Vec<f64> = (0..n + 160)
            .map(|i| {
                let t = i as f64 / 16000.0;
                (2.0 * PI * 300.0 * t).sin() * (1.0 + (2.0 * PI * 3.0 * t).sin()) + 0.3 * (2.0 * PI * 2100.0 * t).sin()
            })
            .collect();
        let a = mel_spectrogram(&Waveform::new(sig[160..].to_vec(), 16000.0).unwrap(), &cfg).unwrap();
        let b = mel_spectrogram(&Waveform::new(sig.clone(), 16000.0).unwrap(), &cfg).unwrap();
        for t in 2..a.n_frames() - 2 {
            for c in 0..cfg.n_bands {
                assert!((a.get(c, t) - b.get(c, t + 1)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn too_short_and_bad_config() {
        let cfg = MelConfig::default();
        let short = Waveform::new(vec![0.1; 399], 16000.0).unwrap();
        assert!(matches!(mel_spectrogram(&short, &cfg), Err(Error::TooShort(_))));
        let bad = MelConfig {
            fmax_hz: 9000.0,
            ..MelConfig::default()
        };
        assert!(mel_spectrogram(&tone(100.0, 1.0), &bad).is_err());
    }

    #[test]
    fn htk_scale_round_trips() {
        assert!((hz_to_mel(1000.0) - 999.9855).abs() < 1e-3);
        for f in [50.0, 440.0, 8000.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
    }
}
