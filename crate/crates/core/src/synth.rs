//! Synthetic experiments with a known generating model.
//!
//! Talker features are independent unit-variance AR(1) processes. Neural
//! activity is
//!
//! ```text
//! R = G_s ⊛ (α·X_att + β·X_un) + (α − β)·G_sel ⊛ X_att + σ·ε
//! ```
//!
//! where `G_s` is a response shared by both talkers and `G_sel` an extra
//! response to the attended talker only, scaled by the attentional contrast.
//! With `α = β` the recording is symmetric in the two talkers; with `β = 0`
//! it is the single planted map `α·(G_s + G_sel)`.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftr::{write_atomic, write_matrix_file};
use crate::lag::LagWindow;
use crate::linmap::{apply_filter, Direction, SpatioTemporalFilter};
use crate::manifest::{Manifest, ManifestTrial};
use crate::signal::{SignalMatrix, Talker, TrialSignals};

pub const SYNTH_RATE_HZ: f64 = 100.0;
/// Feature name used in generated manifests.
pub const SYNTH_FEATURE: &str = "synthetic";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_trials: usize,
    pub trial_s: f64,
    pub n_electrodes: usize,
    pub n_feature_channels: usize,
    pub attended_gain: f64,
    pub unattended_gain: f64,
    pub noise_std: f64,
    pub ar_coeff: f64,
    pub forward_lag: LagWindow,
    /// When set, neural activity is driven by this many latent AR(1) sources
    /// per talker and the observed features are a fixed random mixture of them.
    pub latent_channels: Option<usize>,
    /// Independent white noise added to the observed features.
    pub feature_noise_std: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_trials: 28,
            trial_s: 60.0,
            n_electrodes: 32,
            n_feature_channels: 28,
            attended_gain: 1.0,
            unattended_gain: 0.3,
            noise_std: 1.0,
            ar_coeff: 0.95,
            forward_lag: LagWindow::forward_default(SYNTH_RATE_HZ),
            latent_channels: None,
            feature_noise_std: 0.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 || self.n_electrodes == 0 || self.n_feature_channels == 0 {
            return Err(Error::Validation("trial, electrode and feature counts must be positive".into()));
        }
        if self.latent_channels == Some(0) {
            return Err(Error::Validation("latent channel count must be positive".into()));
        }
        if !(self.trial_s >= 1.0 && self.trial_s.is_finite()) {
            return Err(Error::Validation(format!("trial length {} s must be at least 1 s", self.trial_s)));
        }
        if !(0.0..1.0).contains(&self.ar_coeff) {
            return Err(Error::Validation(format!("AR coefficient {} must lie in [0, 1)", self.ar_coeff)));
        }
        for (name, v) in [
            ("attended gain", self.attended_gain),
            ("unattended gain", self.unattended_gain),
            ("noise std", self.noise_std),
            ("feature noise std", self.feature_noise_std),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.forward_lag.rate_hz != SYNTH_RATE_HZ {
            return Err(Error::LagGrid(format!("synthetic data is sampled at {SYNTH_RATE_HZ} Hz")));
        }
        self.forward_lag.validate()
    }

    fn n_frames(&self) -> usize {
        (self.trial_s * SYNTH_RATE_HZ).round() as usize
    }

    fn n_sources(&self) -> usize {
        self.latent_channels.unwrap_or(self.n_feature_channels)
    }
}

/// Generating parameters kept for oracle checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub shared_map: SpatioTemporalFilter,
    pub selective_map: SpatioTemporalFilter,
    /// Observed = `mixing · sources` (row-major `n_feature_channels × n_sources`), if latent.
    pub mixing: Option<Vec<f64>>,
    pub labels: Vec<Talker>,
    pub config: SynthConfig,
}

impl GroundTruth {
    /// Total map from the attended talker's sources to the recording.
    pub fn attended_map(&self) -> SpatioTemporalFilter {
        let (a, b) = (self.config.attended_gain, self.config.unattended_gain);
        let w: Vec<f64> = self
            .shared_map
            .weights()
            .iter()
            .zip(self.selective_map.weights())
            .map(|(s, g)| a * s + (a - b) * g)
            .collect();
        SpatioTemporalFilter::new(
            self.shared_map.n_out(),
            self.shared_map.n_in(),
            w,
            vec![0.0; self.shared_map.n_out()],
            self.shared_map.lags,
            Direction::Forward,
        )
        .expect("finite combination of valid maps")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GroundTruthSidecar {
    config: SynthConfig,
    labels: Vec<u8>,
    shared_map: String,
    selective_map: String,
    mixing: Option<Vec<f64>>,
    variants: Vec<FeatureVariant>,
}

/// In-memory synthetic experiment.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub trials: Vec<TrialSignals>,
    pub truth: GroundTruth,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for sub-stream `(a, b)` of `seed`.
fn sub_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ a) ^ b.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn ar1(rng: &mut ChaCha8Rng, channels: usize, n_frames: usize, ar: f64) -> Vec<Vec<f64>> {
    let innov = (1.0 - ar * ar).sqrt();
    (0..channels)
        .map(|_| {
            let mut x = normal(rng);
            (0..n_frames)
                .map(|t| {
                    if t > 0 {
                        x = ar * x + innov * normal(rng);
                    }
                    x
                })
                .collect()
        })
        .collect()
}

/// Unit-variance AR(1) features, independent across channels, at 100 Hz.
pub fn gen_talker_features(seed: u64, channels: usize, duration_s: f64, ar_coeff: f64) -> Result<SignalMatrix> {
    if channels == 0 {
        return Err(Error::Validation("feature channel count must be positive".into()));
    }
    if !(duration_s >= 1.0 && duration_s.is_finite()) {
        return Err(Error::Validation(format!("duration {duration_s} s must be at least 1 s")));
    }
    if !(0.0..1.0).contains(&ar_coeff) {
        return Err(Error::Validation(format!("AR coefficient {ar_coeff} must lie in [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (duration_s * SYNTH_RATE_HZ).round() as usize;
    SignalMatrix::from_channels(&ar1(&mut rng, channels, n, ar_coeff), SYNTH_RATE_HZ)
}

/// Random causal map with a decaying temporal envelope; every output row has
/// unit variance when driven by independent unit AR(1) inputs.
fn random_map(rng: &mut ChaCha8Rng, n_out: usize, n_in: usize, lag: LagWindow, ar: f64) -> Result<SpatioTemporalFilter> {
    let l = lag.n_lags();
    let tau = (l as f64 / 4.0).max(1.0);
    let mut w = vec![0.0; n_out * n_in * l];
    for n in 0..n_out {
        for e in 0..n_in {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let freq: f64 = rng.random_range(0.05..0.25);
            let amp = normal(rng);
            for j in 0..l {
                let jf = j as f64;
                w[(n * n_in + e) * l + j] = amp * (-jf / tau).exp() * (std::f64::consts::TAU * freq * jf + phase).cos();
            }
        }
        let mut var = 0.0;
        for e in 0..n_in {
            let row = &w[(n * n_in + e) * l..(n * n_in + e + 1) * l];
            for (j, a) in row.iter().enumerate() {
                for (k, b) in row.iter().enumerate() {
                    var += a * b * ar.powi((j as i32 - k as i32).abs());
                }
            }
        }
        let scale = if var > 0.0 { var.sqrt().recip() } else { 0.0 };
        w[n * n_in * l..(n + 1) * n_in * l].iter_mut().for_each(|v| *v *= scale);
    }
    SpatioTemporalFilter::new(n_out, n_in, w, vec![0.0; n_out], lag, Direction::Forward)
}

fn observe(sources: &SignalMatrix, mixing: Option<&[f64]>, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Result<SignalMatrix> {
    let k = sources.n_channels();
    let d = cfg.n_feature_channels;
    let n = sources.n_frames();
    let mut data = Vec::with_capacity(n * d);
    for t in 0..n {
        let z = sources.frame(t);
        for c in 0..d {
            let v = match mixing {
                Some(m) => m[c * k..(c + 1) * k].iter().zip(z).map(|(a, b)| a * b).sum(),
                None => z[c],
            };
            data.push(v + cfg.feature_noise_std * normal(rng));
        }
    }
    SignalMatrix::new(d, n, SYNTH_RATE_HZ, data)
}

/// Generates a synthetic experiment in memory; a pure function of `cfg`.
pub fn generate(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let k = cfg.n_sources();
    let mut map_rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, u64::MAX, 0));
    let shared_map = random_map(&mut map_rng, cfg.n_electrodes, k, cfg.forward_lag, cfg.ar_coeff)?;
    let selective_map = random_map(&mut map_rng, cfg.n_electrodes, k, cfg.forward_lag, cfg.ar_coeff)?;
    let mixing: Option<Vec<f64>> = cfg.latent_channels.map(|k| {
        let s = (k as f64).sqrt().recip();
        (0..cfg.n_feature_channels * k).map(|_| s * normal(&mut map_rng)).collect()
    });
    let (a, b) = (cfg.attended_gain, cfg.unattended_gain);
    let n = cfg.n_frames();

    let mut trials = Vec::with_capacity(cfg.n_trials);
    let mut labels = Vec::with_capacity(cfg.n_trials);
    for i in 0..cfg.n_trials {
        let attended = if i % 2 == 0 { Talker::Talker1 } else { Talker::Talker2 };
        let src = |talker: u64| -> Result<SignalMatrix> {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, i as u64, talker));
            SignalMatrix::from_channels(&ar1(&mut rng, k, n, cfg.ar_coeff), SYNTH_RATE_HZ)
        };
        let (s1, s2) = (src(1)?, src(2)?);
        let (s_att, s_un) = match attended {
            Talker::Talker1 => (&s1, &s2),
            Talker::Talker2 => (&s2, &s1),
        };
        let mixed = SignalMatrix::new(
            k,
            n,
            SYNTH_RATE_HZ,
            s_att.data().iter().zip(s_un.data()).map(|(x, y)| a * x + b * y).collect(),
        )?;
        let shared = apply_filter(&shared_map, &mixed)?;
        let selective = apply_filter(&selective_map, s_att)?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, i as u64, 3));
        let neural_data: Vec<f64> = shared
            .data()
            .iter()
            .zip(selective.data())
            .map(|(s, g)| s + (a - b) * g + cfg.noise_std * normal(&mut noise_rng))
            .collect();
        let neural = SignalMatrix::new(cfg.n_electrodes, n, SYNTH_RATE_HZ, neural_data)?;
        let mut obs_rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, i as u64, 4));
        let x1 = observe(&s1, mixing.as_deref(), cfg, &mut obs_rng)?;
        let x2 = observe(&s2, mixing.as_deref(), cfg, &mut obs_rng)?;
        trials.push(TrialSignals::new(format!("trial{i:02}"), neural, x1, x2, attended)?);
        labels.push(attended);
    }
    Ok(SynthDataset {
        trials,
        truth: GroundTruth {
            shared_map,
            selective_map,
            mixing,
            labels,
            config: cfg.clone(),
        },
    })
}

/// A named copy of the talker features with extra independent white noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVariant {
    pub name: String,
    pub noise_std: f64,
}

impl FeatureVariant {
    pub fn new(name: impl Into<String>, noise_std: f64) -> Self {
        Self {
            name: name.into(),
            noise_std,
        }
    }
}

fn noisy(m: &SignalMatrix, std: f64, rng: &mut ChaCha8Rng) -> Result<SignalMatrix> {
    if std == 0.0 {
        return Ok(m.clone());
    }
    let data = m.data().iter().map(|v| v + std * normal(rng)).collect();
    SignalMatrix::new(m.n_channels(), m.n_frames(), m.sample_rate_hz(), data)
}

/// Writes `data` as FTR1 files plus `manifest.json` and ground truth into
/// `out_dir`, storing every trial's features under `feature`.
pub fn write_dataset(data: &SynthDataset, out_dir: &Path, feature: &str) -> Result<PathBuf> {
    write_dataset_variants(data, out_dir, &[FeatureVariant::new(feature, 0.0)])
}

/// Like [`write_dataset`], with one feature entry per variant. Variant noise
/// is drawn from streams derived from the dataset seed.
pub fn write_dataset_variants(data: &SynthDataset, out_dir: &Path, variants: &[FeatureVariant]) -> Result<PathBuf> {
    if variants.is_empty() {
        return Err(Error::Validation("no feature variants to write".into()));
    }
    for v in variants {
        if !(v.noise_std.is_finite() && v.noise_std >= 0.0) {
            return Err(Error::Validation(format!("variant '{}': noise std must be >= 0", v.name)));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let seed = data.truth.config.seed;
    let mut trials = Vec::with_capacity(data.trials.len());
    for (i, t) in data.trials.iter().enumerate() {
        let id = &t.trial_id;
        let neural = format!("{id}.neural.ftr");
        write_matrix_file(&t.neural, out_dir.join(&neural))?;
        let mut talker1 = std::collections::BTreeMap::new();
        let mut talker2 = std::collections::BTreeMap::new();
        for (vi, v) in variants.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, i as u64, 100 + vi as u64));
            let f1 = format!("{id}.talker1.{}.ftr", v.name);
            let f2 = format!("{id}.talker2.{}.ftr", v.name);
            write_matrix_file(&noisy(&t.talker1, v.noise_std, &mut rng)?, out_dir.join(&f1))?;
            write_matrix_file(&noisy(&t.talker2, v.noise_std, &mut rng)?, out_dir.join(&f2))?;
            talker1.insert(v.name.clone(), f1);
            talker2.insert(v.name.clone(), f2);
        }
        trials.push(ManifestTrial {
            trial_id: id.clone(),
            neural,
            attended: t.attended.index(),
            talker1,
            talker2,
        });
    }
    let truth = &data.truth;
    truth.shared_map.write(out_dir.join("truth.shared_map.ftr"))?;
    truth.selective_map.write(out_dir.join("truth.selective_map.ftr"))?;
    let sidecar = GroundTruthSidecar {
        config: truth.config.clone(),
        labels: truth.labels.iter().map(|t| t.index()).collect(),
        shared_map: "truth.shared_map.ftr".into(),
        selective_map: "truth.selective_map.ftr".into(),
        mixing: truth.mixing.clone(),
        variants: variants.to_vec(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    write_atomic(&out_dir.join("ground_truth.json"), json.as_bytes())?;
    let manifest = Manifest {
        subject_id: format!("synthetic-seed{}", truth.config.seed),
        trials,
    };
    let path = out_dir.join("manifest.json");
    manifest.write(&path)?;
    Ok(path)
}

/// Generates and writes a dataset; returns the manifest path.
pub fn gen_dataset(cfg: &SynthConfig, out_dir: &Path) -> Result<(PathBuf, GroundTruth)> {
    let data = generate(cfg)?;
    let path = write_dataset(&data, out_dir, SYNTH_FEATURE)?;
    Ok((path, data.truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag1(x: &[f64]) -> f64 {
        crate::stats::pearson(&x[..x.len() - 1], &x[1..]).unwrap()
    }

    #[test]
    fn ar1_statistics() {
        let white = gen_talker_features(1, 1, 60.0, 0.0).unwrap();
        assert!(lag1(&white.channel(0)).abs() < 0.05);
        let smooth = gen_talker_features(2, 1, 60.0, 0.95).unwrap();
        assert!((lag1(&smooth.channel(0)) - 0.95).abs() < 0.03);
        assert_eq!(gen_talker_features(3, 2, 2.0, 0.5).unwrap(), gen_talker_features(3, 2, 2.0, 0.5).unwrap());
    }

    #[test]
    fn labels_alternate() {
        let cfg = SynthConfig {
            n_trials: 4,
            trial_s: 2.0,
            n_electrodes: 3,
            n_feature_channels: 2,
            ..Default::default()
        };
        let d = generate(&cfg).unwrap();
        let got: Vec<_> = d.trials.iter().map(|t| t.attended).collect();
        assert_eq!(got, vec![Talker::Talker1, Talker::Talker2, Talker::Talker1, Talker::Talker2]);
    }
}
