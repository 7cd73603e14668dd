use std::collections::BTreeSet;
use std::path::PathBuf;

use aadkit::decoder::{Aggregation, WindowSpec, DEFAULT_DURATIONS_S};
use aadkit::dsp::{envelope, mel_spectrogram, pca_fit as fit_pca, pca_apply as apply_pca, read_wav, MelConfig, PcaModel};
use aadkit::ftr::{read_matrix_file, write_matrix_file};
use aadkit::linmap::{CvConfig, FeaturePrepConfig, RidgeConfig};
use aadkit::manifest::{load_manifest, ExperimentDataset};
use aadkit::pipeline;
use aadkit::synth::{generate, write_dataset, write_dataset_variants, FeatureVariant, SynthConfig, SYNTH_FEATURE};
use aadkit::{LagWindow, SignalMatrix, TrialSignals};
use anyhow::{ensure, Context};
use serde::Serialize;

use crate::output::{out_dir, write_csv, write_json};
use crate::{
    DecodeArgs, FeatureKind, FeaturesArgs, ForwardCompareArgs, GlobalArgs, LayerSweepArgs, PcaApplyArgs, PcaFitArgs,
    PrepArgs, SwitchArgs, SynthArgs,
};

fn dataset(g: &GlobalArgs) -> anyhow::Result<ExperimentDataset> {
    let path = g.manifest.as_ref().context("--manifest is required")?;
    load_manifest(path).with_context(|| format!("loading manifest {}", path.display()))
}

fn load(ds: &ExperimentDataset, feature: &str) -> anyhow::Result<Vec<TrialSignals>> {
    ds.load_feature(feature).with_context(|| format!("loading feature '{feature}'"))
}

fn windows(g: &GlobalArgs) -> anyhow::Result<Vec<WindowSpec>> {
    let durations = g.windows.clone().unwrap_or_else(|| DEFAULT_DURATIONS_S.to_vec());
    ensure!(!durations.is_empty(), "--windows lists no durations");
    let hop = g.hop.unwrap_or(WindowSpec::DEFAULT_HOP_S);
    Ok(durations.iter().map(|&d| WindowSpec::new(d, hop)).collect::<Result<_, _>>()?)
}

/// Ridge settings with command-specific default lags at the data's rate.
fn ridge(g: &GlobalArgs, defaults: RidgeConfig, rate_hz: f64) -> anyhow::Result<RidgeConfig> {
    let lag = LagWindow::new(
        g.lag_min_ms.unwrap_or(defaults.lag.lag_min_ms),
        g.lag_max_ms.unwrap_or(defaults.lag.lag_max_ms),
        rate_hz,
    )?;
    Ok(RidgeConfig::new(g.lambda.unwrap_or(defaults.lambda), lag)?)
}

fn prep(p: &PrepArgs) -> FeaturePrepConfig {
    FeaturePrepConfig {
        zscore: !p.no_zscore,
        pca_k: p.pca_k,
    }
}

fn rate_of(trials: &[TrialSignals]) -> anyhow::Result<f64> {
    Ok(trials.first().context("manifest has no trials")?.neural.sample_rate_hz())
}

fn backward_cfg(g: &GlobalArgs, p: &PrepArgs, trials: &[TrialSignals]) -> anyhow::Result<CvConfig> {
    Ok(CvConfig {
        ridge: ridge(g, RidgeConfig::backward_default(), rate_of(trials)?)?,
        prep: prep(p),
    })
}

fn aggregation(per_trial: bool) -> Aggregation {
    if per_trial {
        Aggregation::PerTrial
    } else {
        Aggregation::Pooled
    }
}

pub fn features(g: &GlobalArgs, a: &FeaturesArgs) -> anyhow::Result<()> {
    let wav = read_wav(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (m, suffix) = match a.kind {
        FeatureKind::Envelope => (envelope(&wav, a.rate)?.with_meta("feature", "envelope"), "envelope"),
        FeatureKind::Mel => {
            let cfg = MelConfig {
                n_bands: a.bands,
                hop_ms: 1000.0 / a.rate,
                ..MelConfig::default()
            };
            (mel_spectrogram(&wav, &cfg)?.with_meta("feature", "mel"), "mel")
        }
    };
    let out = g.out.clone().unwrap_or_else(|| a.input.with_extension(format!("{suffix}.ftr")));
    write_matrix_file(&m, &out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}: {} channels × {} frames at {} Hz", out.display(), m.n_channels(), m.n_frames(), m.sample_rate_hz());
    Ok(())
}

pub fn pca_fit(g: &GlobalArgs, a: &PcaFitArgs) -> anyhow::Result<()> {
    let mut mats: Vec<SignalMatrix> = Vec::new();
    for p in &a.inputs {
        mats.push(read_matrix_file(p).with_context(|| format!("reading {}", p.display()))?);
    }
    if let Some(feature) = &a.feature {
        for t in load(&dataset(g)?, feature)? {
            mats.push(t.talker1);
            mats.push(t.talker2);
        }
    }
    ensure!(!mats.is_empty(), "nothing to fit: give --in files or --manifest with --feature");
    let refs: Vec<&SignalMatrix> = mats.iter().collect();
    let model = fit_pca(&refs, a.k)?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("pca.json"));
    model.write(&out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}: k = {}, explained variance ratio {:.4}", out.display(), model.k(), model.explained_ratio());
    Ok(())
}

pub fn pca_apply(g: &GlobalArgs, a: &PcaApplyArgs) -> anyhow::Result<()> {
    let model = PcaModel::read(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let m = read_matrix_file(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let scores = apply_pca(&model, &m).with_context(|| format!("projecting {}", a.input.display()))?;
    let out = g.out.clone().unwrap_or_else(|| a.input.with_extension(format!("pca{}.ftr", model.k())));
    write_matrix_file(&scores, &out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}: {} components × {} frames", out.display(), scores.n_channels(), scores.n_frames());
    Ok(())
}

pub fn synth(g: &GlobalArgs, a: &SynthArgs) -> anyhow::Result<()> {
    let cfg = SynthConfig {
        seed: g.seed.unwrap_or(0),
        n_trials: a.trials,
        trial_s: a.duration,
        n_electrodes: a.electrodes,
        n_feature_channels: a.features,
        attended_gain: a.attended_gain,
        unattended_gain: a.unattended_gain,
        noise_std: a.noise,
        ar_coeff: a.ar,
        latent_channels: a.latent,
        feature_noise_std: a.feature_noise,
        ..SynthConfig::default()
    };
    let dir = g.out.clone().context("--out <directory> is required")?;
    let data = generate(&cfg)?;
    let manifest = match &a.layers {
        None => write_dataset(&data, &dir, SYNTH_FEATURE)?,
        Some(noise) => {
            ensure!(!noise.is_empty(), "--layers lists no noise levels");
            let variants: Vec<FeatureVariant> = noise
                .iter()
                .enumerate()
                .map(|(i, &s)| FeatureVariant::new(format!("layer{i:02}"), s))
                .collect();
            write_dataset_variants(&data, &dir, &variants)?
        }
    };
    println!("{}", manifest.display());
    Ok(())
}

pub fn decode(g: &GlobalArgs, a: &DecodeArgs) -> anyhow::Result<()> {
    let ds = dataset(g)?;
    let trials = load(&ds, &a.feature)?;
    let cfg = backward_cfg(g, &a.prep, &trials)?;
    let (report, _) = pipeline::decode(&trials, &a.feature, &cfg, &windows(g)?, aggregation(a.per_trial))?;
    let path = out_dir(g.out.as_deref())?.join("report.json");
    write_json(&path, &report)?;
    for d in &report.durations {
        println!("{:>5} s  accuracy {:.4}  ({} windows)", d.duration_s, d.accuracy, d.n_windows);
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow<'a> {
    layer: &'a str,
    duration_s: f64,
    accuracy: f64,
}

/// Layers in the order given, or every manifest feature with the prefix.
fn sweep_layers(ds: &ExperimentDataset, a: &LayerSweepArgs) -> anyhow::Result<Vec<String>> {
    let everywhere: BTreeSet<String> = ds.feature_names().into_iter().collect();
    let anywhere: BTreeSet<String> = ds.trials.iter().flat_map(|t| t.talker1_features.keys().cloned()).collect();
    let wanted: Vec<String> = match &a.layers {
        Some(list) => list.clone(),
        None => anywhere.iter().filter(|n| n.starts_with(&a.prefix)).cloned().collect(),
    };
    ensure!(!wanted.is_empty(), "no layer features selected (prefix '{}')", a.prefix);
    let mut layers = Vec::with_capacity(wanted.len());
    for name in wanted {
        if everywhere.contains(&name) {
            layers.push(name);
        } else {
            log::warn!("layer '{name}' is missing from at least one trial; skipped");
        }
    }
    ensure!(!layers.is_empty(), "none of the selected layers is present in every trial");
    Ok(layers)
}

pub fn layer_sweep(g: &GlobalArgs, a: &LayerSweepArgs) -> anyhow::Result<()> {
    let ds = dataset(g)?;
    let layers = sweep_layers(&ds, a)?;
    let w = windows(g)?;
    let mut reports = Vec::with_capacity(layers.len());
    for layer in &layers {
        let trials = load(&ds, layer)?;
        let cfg = backward_cfg(g, &a.prep, &trials)?;
        let (report, _) = pipeline::decode(&trials, layer, &cfg, &w, aggregation(a.per_trial))
            .with_context(|| format!("decoding layer '{layer}'"))?;
        reports.push(report);
    }
    let dir = out_dir(g.out.as_deref())?;
    let rows = reports.iter().flat_map(|r| {
        r.durations.iter().map(move |d| SweepRow {
            layer: &r.feature_name,
            duration_s: d.duration_s,
            accuracy: d.accuracy,
        })
    });
    write_csv(&dir.join("layer_sweep.csv"), &["layer", "duration_s", "accuracy"], rows)?;
    write_json(&dir.join("layer_sweep.json"), &reports)?;
    for r in &reports {
        let accs: Vec<String> = r.durations.iter().map(|d| format!("{:.4}", d.accuracy)).collect();
        println!("{}  {}", r.feature_name, accs.join("  "));
    }
    Ok(())
}

fn duration_tag(d: f64) -> String {
    format!("{d}").replace('.', "p")
}

pub fn switch(g: &GlobalArgs, a: &SwitchArgs) -> anyhow::Result<()> {
    let ds = dataset(g)?;
    let trials = load(&ds, &a.feature)?;
    let cfg = backward_cfg(g, &a.prep, &trials)?;
    let report = pipeline::switch_analysis(&trials, &cfg, &windows(g)?, a.segment)?;
    let dir = out_dir(g.out.as_deref())?;
    for trace in &report.traces {
        let path = dir.join(format!("switch_trace_{}s.csv", duration_tag(trace.window.duration_s)));
        let rows = trace.window_centers_s.iter().zip(&trace.ami);
        write_csv(&path, &["window_center_s", "ami_scaled"], rows)?;
    }
    let rows = report
        .transitions
        .iter()
        .map(|t| (t.duration_s, t.mean_transition_s, t.n_with_crossing, t.n_switch_trials));
    write_csv(
        &dir.join("transitions.csv"),
        &["duration_s", "mean_transition_s", "n_with_crossing", "n_switch_trials"],
        rows,
    )?;
    let rows = report
        .pairings
        .iter()
        .map(|p| (&p.switch_trial_id, &p.first_trial_id, &p.second_trial_id, p.switch_time_s));
    write_csv(
        &dir.join("switch_pairs.csv"),
        &["switch_trial_id", "first_trial_id", "second_trial_id", "switch_time_s"],
        rows,
    )?;
    write_json(&dir.join("switch.json"), &report)?;
    for t in &report.transitions {
        let mean = t.mean_transition_s.map_or("none".to_string(), |m| format!("{m:.3} s"));
        println!("{:>5} s  transition {mean}  ({}/{} trials cross)", t.duration_s, t.n_with_crossing, t.n_switch_trials);
    }
    Ok(())
}

fn forward_cfg(g: &GlobalArgs, a: &ForwardCompareArgs, trials: &[TrialSignals]) -> anyhow::Result<CvConfig> {
    let dim = trials.first().context("manifest has no trials")?.talker1.n_channels();
    Ok(CvConfig {
        ridge: ridge(g, RidgeConfig::forward_default(), rate_of(trials)?)?,
        prep: FeaturePrepConfig {
            zscore: !a.no_zscore,
            pca_k: (!a.no_pca && dim > a.pca_k).then_some(a.pca_k),
        },
    })
}

pub fn forward_compare(g: &GlobalArgs, a: &ForwardCompareArgs) -> anyhow::Result<()> {
    let ds = dataset(g)?;
    let ta = load(&ds, &a.feature_a)?;
    let tb = load(&ds, &a.feature_b)?;
    let (ca, cb) = (forward_cfg(g, a, &ta)?, forward_cfg(g, a, &tb)?);
    let cmp = pipeline::forward_compare(&ta, &tb, (&a.feature_a, &a.feature_b), &ca, &cb, a.alpha)?;
    let dir = out_dir(g.out.as_deref())?;
    let m = &cmp.map;
    let rows = (0..m.delta_r.len()).map(|e| (e, m.delta_r[e], m.significant[e], m.p_values[e]));
    write_csv(&dir.join("improvement.csv"), &["electrode", "delta_r", "significant", "p_value"], rows)?;
    write_json(&dir.join("improvement.json"), &cmp)?;
    println!(
        "{} better on {:.1} % of electrodes, {} better on {:.1} % (alpha {})",
        a.feature_a,
        100.0 * m.frac_better_a,
        a.feature_b,
        100.0 * m.frac_better_b,
        m.alpha
    );
    Ok(())
}

