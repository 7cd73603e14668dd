use serde::{Deserialize, Serialize};

use crate::decoder::window::AmiSeries;
use crate::error::{Error, Result};
use crate::signal::{SignalMatrix, Talker, TrialSignals};

/// A trial spliced from two recordings so that attention moves from talker
/// 1 to talker 2 at `switch_time_s`.
#[derive(Debug, Clone)]
pub struct SwitchTrial {
    /// Talker 1 is attended before the switch, talker 2 after it.
    pub trial: TrialSignals,
    pub first_index: usize,
    pub second_index: usize,
    pub switch_time_s: f64,
}

/// Row of the pairing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchPairing {
    pub switch_trial_id: String,
    pub first_trial_id: String,
    pub second_trial_id: String,
    pub switch_time_s: f64,
}

impl SwitchTrial {
    pub fn pairing(&self, sources: &[TrialSignals]) -> SwitchPairing {
        SwitchPairing {
            switch_trial_id: self.trial.trial_id.clone(),
            first_trial_id: sources[self.first_index].trial_id.clone(),
            second_trial_id: sources[self.second_index].trial_id.clone(),
            switch_time_s: self.switch_time_s,
        }
    }
}

fn splice(a: &SignalMatrix, b: &SignalMatrix, seg: usize) -> Result<SignalMatrix> {
    let head = a.slice_frames(0..seg)?;
    let tail = b.slice_frames(b.n_frames() - seg..b.n_frames())?;
    head.concat_frames(&tail)
}

/// Builds switch trials from the first `segment_s` of one trial and the last
/// `segment_s` of another.
///
/// Every trial of at least `2 · segment_s` opens one switch trial. Its partner
/// is the next such trial (cyclically) whose attended label differs, or the
/// next one at all if every label agrees. Talker 1 of the result is the first
/// trial's attended stream followed by the partner's unattended stream;
/// talker 2 is the complement. Returns the switch trials and the ids of
/// skipped trials.
pub fn make_switch_trials(trials: &[TrialSignals], segment_s: f64) -> Result<(Vec<SwitchTrial>, Vec<String>)> {
    if !(segment_s > 0.0 && segment_s.is_finite()) {
        return Err(Error::Validation(format!("segment length must be positive, got {segment_s}")));
    }
    let mut eligible = Vec::new();
    let mut skipped = Vec::new();
    for (i, t) in trials.iter().enumerate() {
        let seg = (segment_s * t.neural.sample_rate_hz()).round() as usize;
        if t.neural.n_frames() >= 2 * seg && seg > 0 {
            eligible.push(i);
        } else {
            log::warn!(
                "trial {} is {:.2} s long, shorter than two {segment_s} s segments; skipped",
                t.trial_id,
                t.neural.duration_s()
            );
            skipped.push(t.trial_id.clone());
        }
    }
    if eligible.len() < 2 {
        return Ok((Vec::new(), skipped));
    }

    let mut out = Vec::with_capacity(eligible.len());
    for (pos, &i) in eligible.iter().enumerate() {
        let n = eligible.len();
        let candidates = (1..n).map(|d| eligible[(pos + d) % n]);
        let j = candidates
            .clone()
            .find(|&j| trials[j].attended != trials[i].attended)
            .unwrap_or_else(|| eligible[(pos + 1) % n]);
        let (a, b) = (&trials[i], &trials[j]);
        let rate = a.neural.sample_rate_hz();
        let seg = (segment_s * rate).round() as usize;
        let spk1 = splice(a.attended_features(), b.unattended_features(), seg)?;
        let spk2 = splice(a.unattended_features(), b.attended_features(), seg)?;
        let neural = splice(&a.neural, &b.neural, seg)?;
        let trial = TrialSignals::new(format!("{}+{}", a.trial_id, b.trial_id), neural, spk1, spk2, Talker::Talker1)?;
        out.push(SwitchTrial {
            trial,
            first_index: i,
            second_index: j,
            switch_time_s: seg as f64 / rate,
        });
    }
    Ok((out, skipped))
}

/// Delay from `switch_time_s` to the first positive-to-nonpositive AMI
/// crossing, linearly interpolated between window centers. Only center pairs
/// whose later center is at or after the switch are considered.
pub fn transition_time(s: &AmiSeries, switch_time_s: f64) -> Result<Option<f64>> {
    let c = &s.window_centers_s;
    let (Some(&first), Some(&last)) = (c.first(), c.last()) else {
        return Err(Error::Domain("empty AMI series".into()));
    };
    if first > switch_time_s || last < switch_time_s {
        return Err(Error::Domain(format!(
            "AMI series spans {first}..{last} s and does not include the switch at {switch_time_s} s"
        )));
    }
    for i in 0..c.len() - 1 {
        if c[i + 1] < switch_time_s {
            continue;
        }
        let (y0, y1) = (s.ami[i], s.ami[i + 1]);
        if y0 > 0.0 && y1 <= 0.0 {
            let crossing = c[i] + (c[i + 1] - c[i]) * y0 / (y0 - y1);
            return Ok(Some(crossing - switch_time_s));
        }
    }
    Ok(None)
}

/// Pointwise mean of `traces`, divided by its largest magnitude when nonzero.
pub fn scale_ami(traces: &[AmiSeries]) -> Result<AmiSeries> {
    let first = traces
        .first()
        .ok_or_else(|| Error::Validation("no AMI traces to average".into()))?;
    for t in traces {
        let same = t.window_centers_s.len() == first.window_centers_s.len()
            && t.window_centers_s
                .iter()
                .zip(&first.window_centers_s)
                .all(|(a, b)| (a - b).abs() < 1e-9);
        if !same || t.window != first.window {
            return Err(Error::Alignment {
                trial_id: "switch average".into(),
                detail: "AMI traces have different window centers".into(),
            });
        }
    }
    let n = traces.len() as f64;
    let mut mean: Vec<f64> = (0..first.len())
        .map(|i| traces.iter().map(|t| t.ami[i]).sum::<f64>() / n)
        .collect();
    let peak = mean.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        mean.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(AmiSeries {
        window_centers_s: first.window_centers_s.clone(),
        ami: mean,
        window: first.window,
    })
}
