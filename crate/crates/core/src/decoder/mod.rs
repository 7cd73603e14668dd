//! Attention decisions from reconstructions: windowed correlation, AMI,
//! accuracy and switch detection.

mod classify;
mod switch;
mod window;

pub use classify::{classify, classify_and_score, fold_ami, Aggregation, DecodingReport, DurationScore};
pub use switch::{make_switch_trials, scale_ami, transition_time, SwitchPairing, SwitchTrial};
pub use window::{ami_series, window_corr, AmiSeries, WindowSpec};

/// Window durations evaluated by default, in seconds.
pub const DEFAULT_DURATIONS_S: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
