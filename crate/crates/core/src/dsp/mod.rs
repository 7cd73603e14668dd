//! Acoustic feature extraction and feature-space preprocessing.

mod envelope;
mod mel;
mod pca;
mod resample;
mod wav;
mod zscore;

pub use envelope::{envelope, lowpass_taps, ENVELOPE_CUTOFF_HZ, ENVELOPE_TAPS};
pub use mel::{hz_to_mel, mel_filterbank, mel_spectrogram, mel_to_hz, MelConfig};
pub use pca::{pca_apply, pca_fit, pca_inverse, PcaModel};
pub use resample::resample_linear;
pub use wav::{read_wav, Waveform};
pub use zscore::{zscore_apply, zscore_fit, ZScoreModel, STD_FLOOR};
