//! A finite-window model of the Robba ring and its extension by ℓ_X.

pub mod atoms;
pub mod element;
pub mod log;
pub mod ops;
pub mod ord;
pub mod profile;

pub use element::{Approx, Laurent, RobbaElement};
pub use profile::Profile;
pub use log::{LogRobbaElement, LogTSeries};
pub use ord::OrdEstimate;
