//! Performance model of a backscatter tag-to-tag link assisted by a
//! reconfigurable intelligent surface: gamma moment matching of the
//! received SNR, closed-form OP/BER/AC, and a Monte Carlo channel
//! simulator to check them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod specfun;

pub use analytic::{GammaApprox, Metrics, MomentPair, RisSumGamma};
pub use channel::{ChannelDraw, DerivedGains, SnrForm, SourceMode, SystemParams};
pub use error::{Error, Result};
pub use experiments::{Config, CurvePoint, Format, Metric, SweepSpec};
pub use montecarlo::{McConfig, McEstimate, McMetrics};
