//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export is a thin wrapper over a plain Rust function so the same code
//! paths run in native tests.

use aadkit::decoder::{Aggregation, WindowSpec};
use aadkit::dsp::{mel_spectrogram, MelConfig, Waveform};
use aadkit::linmap::CvConfig;
use aadkit::pipeline::{decode, switch_analysis};
use aadkit::synth::{generate, SynthConfig};
use wasm_bindgen::prelude::*;

/// Synthetic experiment knobs exposed to the page.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct DemoConfig {
    pub seed: u64,
    pub n_trials: usize,
    pub trial_s: f64,
    pub n_electrodes: usize,
    pub noise_std: f64,
    pub unattended_gain: f64,
}

#[wasm_bindgen]
impl DemoConfig {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64, n_trials: usize, trial_s: f64, n_electrodes: usize, noise_std: f64, unattended_gain: f64) -> Self {
        Self {
            seed,
            n_trials,
            trial_s,
            n_electrodes,
            noise_std,
            unattended_gain,
        }
    }
}

impl DemoConfig {
    fn synth(&self) -> SynthConfig {
        SynthConfig {
            seed: self.seed,
            n_trials: self.n_trials,
            trial_s: self.trial_s,
            n_electrodes: self.n_electrodes,
            n_feature_channels: 1,
            noise_std: self.noise_std,
            unattended_gain: self.unattended_gain,
            ..SynthConfig::default()
        }
    }
}

fn windows(durations: &[f64]) -> aadkit::Result<Vec<WindowSpec>> {
    durations.iter().map(|&d| WindowSpec::with_default_hop(d)).collect()
}

/// Leave-one-out accuracy for each window duration.
pub fn accuracy_curve(cfg: &DemoConfig, durations: &[f64]) -> aadkit::Result<Vec<f64>> {
    let data = generate(&cfg.synth())?;
    let (report, _) = decode(
        &data.trials,
        aadkit::synth::SYNTH_FEATURE,
        &CvConfig::backward_default(),
        &windows(durations)?,
        Aggregation::Pooled,
    )?;
    Ok(report.durations.iter().map(|d| d.accuracy).collect())
}

/// Averaged, scaled AMI trace around a simulated attention switch at
/// `segment_s`, plus the mean transition time when one was found.
pub fn switch_trace(cfg: &DemoConfig, duration_s: f64, segment_s: f64) -> aadkit::Result<Trace> {
    let data = generate(&cfg.synth())?;
    let report = switch_analysis(&data.trials, &CvConfig::backward_default(), &windows(&[duration_s])?, segment_s)?;
    let trace = &report.traces[0];
    Ok(Trace {
        centers_s: trace.window_centers_s.clone(),
        values: trace.ami.clone(),
        transition_s: report.transitions[0].mean_transition_s,
    })
}

/// Log-mel spectrogram of a pure tone, frames × bands, row-major.
pub fn tone_mel(freq_hz: f64, seconds: f64, n_bands: usize) -> aadkit::Result<Image> {
    let rate = 16_000.0;
    let n = (seconds * rate).round() as usize;
    let samples = (0..n)
        .map(|i| 0.5 * (2.0 * std::f64::consts::PI * freq_hz * i as f64 / rate).sin())
        .collect();
    let m = mel_spectrogram(
        &Waveform::new(samples, rate)?,
        &MelConfig {
            n_bands,
            ..MelConfig::default()
        },
    )?;
    Ok(Image {
        rows: m.n_frames(),
        cols: m.n_channels(),
        data: m.data().to_vec(),
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Trace {
    centers_s: Vec<f64>,
    values: Vec<f64>,
    transition_s: Option<f64>,
}

#[wasm_bindgen]
impl Trace {
    #[wasm_bindgen(getter)]
    pub fn centers_s(&self) -> Vec<f64> {
        self.centers_s.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn transition_s(&self) -> Option<f64> {
        self.transition_s
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Image {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

#[wasm_bindgen]
impl Image {
    #[wasm_bindgen(getter)]
    pub fn data(&self) -> Vec<f64> {
        self.data.clone()
    }
}

fn js(e: aadkit::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = accuracyCurve)]
pub fn accuracy_curve_js(cfg: &DemoConfig, durations: Vec<f64>) -> Result<Vec<f64>, JsError> {
    accuracy_curve(cfg, &durations).map_err(js)
}

#[wasm_bindgen(js_name = switchTrace)]
pub fn switch_trace_js(cfg: &DemoConfig, duration_s: f64, segment_s: f64) -> Result<Trace, JsError> {
    switch_trace(cfg, duration_s, segment_s).map_err(js)
}

#[wasm_bindgen(js_name = toneMel)]
pub fn tone_mel_js(freq_hz: f64, seconds: f64, n_bands: usize) -> Result<Image, JsError> {
    tone_mel(freq_hz, seconds, n_bands).map_err(js)
}
