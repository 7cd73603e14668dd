//! Lagged linear maps between neural recordings and stimulus features.

mod cv;
mod design;
mod filter;
mod moments;
mod prep;
mod ridge;
mod train;

pub use cv::{forward_loo, loo_cv, BackwardBank, CvConfig, FoldResult, ForwardFold, TrainedBackward};
pub use design::build_lagged_design;
pub use filter::{apply_filter, Direction, SpatioTemporalFilter};
pub use moments::{BackwardTrialMoments, ForwardTrialMoments, Moments};
pub use prep::{FeatureMap, FeaturePrepConfig};
pub use ridge::{ridge_solve, solve_moments, RidgeConfig, RidgeSolution};
pub use train::{train_backward, train_forward, BackwardFilters};
