//! Experiment manifest: binds per-trial neural recordings to per-talker
//! feature files and the attended-talker cue.
//!
//! ```json
//! {
//!   "subject_id": "S1",
//!   "trials": [
//!     {"trial_id": "t01", "neural": "t01.neural.ftr", "attended": 1,
//!      "talker1": {"mel": "t01.t1.mel.ftr"}, "talker2": {"mel": "t01.t2.mel.ftr"}}
//!   ]
//! }
//! ```
//!
//! Paths are relative to the manifest file. Loading validates that every file
//! exists and that shapes line up, but never resamples.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ftr::{read_header_file, read_matrix_file, FtrHeader};
use crate::signal::{Talker, TrialSignals};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestTrial {
    pub trial_id: String,
    pub neural: String,
    pub attended: u8,
    pub talker1: BTreeMap<String, String>,
    pub talker2: BTreeMap<String, String>,
}

/// On-disk manifest document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subject_id: String,
    pub trials: Vec<ManifestTrial>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::ftr::write_atomic(path.as_ref(), self.to_json().as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: String,
    pub neural: PathBuf,
    pub talker1_features: BTreeMap<String, PathBuf>,
    pub talker2_features: BTreeMap<String, PathBuf>,
    pub attended: Talker,
}

impl TrialRecord {
    pub fn feature_path(&self, talker: Talker, feature: &str) -> Result<&Path> {
        let map = match talker {
            Talker::Talker1 => &self.talker1_features,
            Talker::Talker2 => &self.talker2_features,
        };
        map.get(feature)
            .map(PathBuf::as_path)
            .ok_or_else(|| Error::MissingFeature {
                trial_id: self.trial_id.clone(),
                feature: feature.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDataset {
    pub subject_id: String,
    pub trials: Vec<TrialRecord>,
    pub n_electrodes: usize,
}

impl ExperimentDataset {
    /// Feature names present in every trial, sorted.
    pub fn feature_names(&self) -> Vec<String> {
        let mut iter = self.trials.iter();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let mut names: BTreeSet<&String> = first.talker1_features.keys().collect();
        for t in iter {
            names.retain(|n| t.talker1_features.contains_key(*n));
        }
        names.into_iter().cloned().collect()
    }

    /// Reads the neural recording and both talkers' `feature` files of every trial.
    pub fn load_feature(&self, feature: &str) -> Result<Vec<TrialSignals>> {
        self.trials
            .iter()
            .map(|rec| {
                let neural = read_matrix_file(&rec.neural)?;
                let t1 = read_matrix_file(rec.feature_path(Talker::Talker1, feature)?)?;
                let t2 = read_matrix_file(rec.feature_path(Talker::Talker2, feature)?)?;
                TrialSignals::new(rec.trial_id.clone(), neural, t1, t2, rec.attended)
            })
            .collect()
    }
}

fn header_for(trial_id: &str, role: &str, path: &Path) -> Result<FtrHeader> {
    if !path.is_file() {
        return Err(Error::MissingFile {
            trial_id: trial_id.to_string(),
            role: role.to_string(),
            path: path.to_path_buf(),
        });
    }
    read_header_file(path)
}

/// Parses and validates a manifest. Either the whole dataset is returned or an
/// error; nothing partial is observable.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<ExperimentDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    resolve_manifest(manifest, base)
}

/// Validates an already parsed manifest whose relative paths resolve against `base`.
pub fn resolve_manifest(manifest: Manifest, base: &Path) -> Result<ExperimentDataset> {
    if manifest.trials.is_empty() {
        return Err(Error::Validation("manifest lists no trials".into()));
    }
    let mut seen = BTreeSet::new();
    let mut n_electrodes: Option<usize> = None;
    let mut feature_channels: BTreeMap<String, usize> = BTreeMap::new();
    let mut trials = Vec::with_capacity(manifest.trials.len());

    for mt in manifest.trials {
        let id = mt.trial_id.clone();
        if !seen.insert(id.clone()) {
            return Err(Error::Validation(format!("duplicate trial_id '{id}'")));
        }
        let attended = Talker::from_index(mt.attended).ok_or_else(|| {
            Error::Validation(format!("trial {id}: attended must be 1 or 2, got {}", mt.attended))
        })?;
        let keys1: BTreeSet<_> = mt.talker1.keys().collect();
        let keys2: BTreeSet<_> = mt.talker2.keys().collect();
        if keys1 != keys2 {
            return Err(Error::Validation(format!(
                "trial {id}: talker1 features {keys1:?} differ from talker2 features {keys2:?}"
            )));
        }

        let neural = base.join(&mt.neural);
        let nh = header_for(&id, "neural", &neural)?;
        match n_electrodes {
            None => n_electrodes = Some(nh.n_channels),
            Some(n) if n != nh.n_channels => {
                return Err(Error::Consistency(format!(
                    "trial {id} has {} electrodes, earlier trials have {n}",
                    nh.n_channels
                )))
            }
            Some(_) => {}
        }

        let resolve = |talker: &str, map: &BTreeMap<String, String>| -> Result<BTreeMap<String, (PathBuf, usize)>> {
            let mut out = BTreeMap::new();
            for (name, rel) in map {
                let p = base.join(rel);
                let h = header_for(&id, &format!("{talker} feature '{name}'"), &p)?;
                if h.n_frames != nh.n_frames || h.sample_rate_hz != nh.sample_rate_hz {
                    return Err(Error::Alignment {
                        trial_id: id.clone(),
                        detail: format!(
                            "{talker} feature '{name}' has {} frames at {} Hz, neural has {} frames at {} Hz",
                            h.n_frames, h.sample_rate_hz, nh.n_frames, nh.sample_rate_hz
                        ),
                    });
                }
                out.insert(name.clone(), (p, h.n_channels));
            }
            Ok(out)
        };
        let t1 = resolve("talker1", &mt.talker1)?;
        let t2 = resolve("talker2", &mt.talker2)?;

        for (name, &(_, channels)) in t1.iter().chain(t2.iter()) {
            match feature_channels.get(name) {
                Some(&c) if c != channels => {
                    return Err(Error::Consistency(format!(
                        "feature '{name}' has {channels} channels in trial {id}, {c} elsewhere"
                    )))
                }
                Some(_) => {}
                None => {
                    feature_channels.insert(name.clone(), channels);
                }
            }
        }
        let strip = |m: BTreeMap<String, (PathBuf, usize)>| -> BTreeMap<String, PathBuf> {
            m.into_iter().map(|(k, (p, _))| (k, p)).collect()
        };

        trials.push(TrialRecord {
            trial_id: id,
            neural,
            talker1_features: strip(t1),
            talker2_features: strip(t2),
            attended,
        });
    }

    Ok(ExperimentDataset {
        subject_id: manifest.subject_id,
        trials,
        n_electrodes: n_electrodes.expect("at least one trial"),
    })
}
