use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Uniformly sampled multichannel time series.
///
/// Samples are stored frame-major: the channels of one frame are contiguous,
/// so `data[t * n_channels + c]` is channel `c` at frame `t`. Neural
/// recordings (electrodes × time) and stimulus features (feature channels ×
/// time) both use this container.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    n_channels: usize,
    n_frames: usize,
    sample_rate_hz: f64,
    data: Vec<f64>,
    /// Free-form provenance (source path, layer index, variant name, ...).
    pub meta: BTreeMap<String, String>,
}

impl SignalMatrix {
    pub fn new(n_channels: usize, n_frames: usize, sample_rate_hz: f64, data: Vec<f64>) -> Result<Self> {
        if n_channels == 0 || n_frames == 0 {
            return Err(Error::Validation(format!(
                "signal must have positive channel and frame counts, got {n_channels}×{n_frames}"
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Validation(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if data.len() != n_channels * n_frames {
            return Err(Error::Validation(format!(
                "data length {} != {n_channels} channels × {n_frames} frames",
                data.len()
            )));
        }
        Ok(Self {
            n_channels,
            n_frames,
            sample_rate_hz,
            data,
            meta: BTreeMap::new(),
        })
    }

    pub fn zeros(n_channels: usize, n_frames: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::new(n_channels, n_frames, sample_rate_hz, vec![0.0; n_channels * n_frames])
    }

    /// Builds a matrix from per-channel sample vectors of equal length.
    pub fn from_channels(channels: &[Vec<f64>], sample_rate_hz: f64) -> Result<Self> {
        let n_channels = channels.len();
        let n_frames = channels.first().map_or(0, Vec::len);
        if channels.iter().any(|c| c.len() != n_frames) {
            return Err(Error::Dimension("channels have unequal lengths".into()));
        }
        let mut data = vec![0.0; n_channels * n_frames];
        for (c, ch) in channels.iter().enumerate() {
            for (t, &v) in ch.iter().enumerate() {
                data[t * n_channels + c] = v;
            }
        }
        Self::new(n_channels, n_frames, sample_rate_hz, data)
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn duration_s(&self) -> f64 {
        self.n_frames as f64 / self.sample_rate_hz
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, channel: usize, frame: usize) -> f64 {
        self.data[frame * self.n_channels + channel]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, frame: usize, value: f64) {
        self.data[frame * self.n_channels + channel] = value;
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.n_channels..(t + 1) * self.n_channels]
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(c)
            .step_by(self.n_channels)
            .copied()
            .collect()
    }

    /// All channels as contiguous vectors (channel-major copy).
    pub fn channels(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.n_frames); self.n_channels];
        for frame in self.data.chunks_exact(self.n_channels) {
            for (c, &v) in frame.iter().enumerate() {
                out[c].push(v);
            }
        }
        out
    }

    /// `n_frames × n_channels` copy.
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_frames, self.n_channels, &self.data)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copies the frames in `range` (metadata is kept).
    pub fn slice_frames(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.n_frames {
            return Err(Error::Dimension(format!(
                "frame range {range:?} outside 0..{}",
                self.n_frames
            )));
        }
        let data = self.data[range.start * self.n_channels..range.end * self.n_channels].to_vec();
        let mut out = Self::new(self.n_channels, range.len(), self.sample_rate_hz, data)?;
        out.meta = self.meta.clone();
        Ok(out)
    }

    /// Appends `other`'s frames after this matrix's frames.
    pub fn concat_frames(&self, other: &SignalMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Self::new(self.n_channels, self.n_frames + other.n_frames, self.sample_rate_hz, data)
    }

    /// Errors unless channel count and sample rate agree.
    pub fn check_compatible(&self, other: &SignalMatrix) -> Result<()> {
        if self.n_channels != other.n_channels {
            return Err(Error::Dimension(format!(
                "channel count {} != {}",
                self.n_channels, other.n_channels
            )));
        }
        if self.sample_rate_hz != other.sample_rate_hz {
            return Err(Error::Dimension(format!(
                "sample rate {} Hz != {} Hz",
                self.sample_rate_hz, other.sample_rate_hz
            )));
        }
        Ok(())
    }

    /// Errors unless shape and sample rate agree.
    pub fn check_same_shape(&self, other: &SignalMatrix) -> Result<()> {
        self.check_compatible(other)?;
        if self.n_frames != other.n_frames {
            return Err(Error::Dimension(format!(
                "frame count {} != {}",
                self.n_frames, other.n_frames
            )));
        }
        Ok(())
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }
}

/// The two talkers of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Talker {
    Talker1,
    Talker2,
}

impl Talker {
    pub fn other(self) -> Self {
        match self {
            Talker::Talker1 => Talker::Talker2,
            Talker::Talker2 => Talker::Talker1,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Talker::Talker1 => 1,
            Talker::Talker2 => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Talker::Talker1),
            2 => Some(Talker::Talker2),
            _ => None,
        }
    }
}

/// One trial with a single feature family loaded in memory.
#[derive(Debug, Clone)]
pub struct TrialSignals {
    pub trial_id: String,
    pub neural: SignalMatrix,
    pub talker1: SignalMatrix,
    pub talker2: SignalMatrix,
    pub attended: Talker,
}

impl TrialSignals {
    pub fn new(
        trial_id: impl Into<String>,
        neural: SignalMatrix,
        talker1: SignalMatrix,
        talker2: SignalMatrix,
        attended: Talker,
    ) -> Result<Self> {
        let trial_id = trial_id.into();
        talker1.check_compatible(&talker2).map_err(|e| Error::Alignment {
            trial_id: trial_id.clone(),
            detail: format!("talker features disagree: {e}"),
        })?;
        for (role, m) in [("talker1", &talker1), ("talker2", &talker2)] {
            if m.n_frames() != neural.n_frames() || m.sample_rate_hz() != neural.sample_rate_hz() {
                return Err(Error::Alignment {
                    trial_id,
                    detail: format!(
                        "{role} features have {} frames at {} Hz, neural has {} frames at {} Hz",
                        m.n_frames(),
                        m.sample_rate_hz(),
                        neural.n_frames(),
                        neural.sample_rate_hz()
                    ),
                });
            }
        }
        Ok(Self {
            trial_id,
            neural,
            talker1,
            talker2,
            attended,
        })
    }

    pub fn features(&self, talker: Talker) -> &SignalMatrix {
        match talker {
            Talker::Talker1 => &self.talker1,
            Talker::Talker2 => &self.talker2,
        }
    }

    pub fn attended_features(&self) -> &SignalMatrix {
        self.features(self.attended)
    }

    pub fn unattended_features(&self) -> &SignalMatrix {
        self.features(self.attended.other())
    }

    /// Same trial with the attended label flipped.
    pub fn relabeled(&self) -> Self {
        Self {
            attended: self.attended.other(),
            ..self.clone()
        }
    }
}
