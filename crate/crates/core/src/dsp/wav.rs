use std::path::Path;

use crate::error::{Error, Result};

/// Mono audio samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Validation("waveform is empty".into()));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Validation(format!("invalid sample rate {sample_rate_hz}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("waveform contains non-finite samples".into()));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }
}

/// Reads a mono PCM WAV file (16-bit integer or 32-bit float).
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other}", path.display())),
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: {} channels, expected mono",
            path.display(),
            spec.channels
        )));
    }
    let decode_err = |e: hound::Error| Error::Format(format!("{}: {e}", path.display()));
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<Result<_, _>>()
            .map_err(decode_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<Result<_, _>>()
            .map_err(decode_err)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {bits}-bit {fmt:?} PCM",
                path.display()
            )))
        }
    };
    Waveform::new(samples, spec.sample_rate as f64)
}
