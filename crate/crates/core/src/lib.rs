//! Auditory attention decoding by lagged linear stimulus reconstruction.

pub mod decoder;
pub mod dsp;
pub mod error;
pub mod ftr;
pub mod lag;
pub mod linmap;
pub mod manifest;
pub mod pipeline;
pub mod signal;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use lag::LagWindow;
pub use signal::{SignalMatrix, Talker, TrialSignals};

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
