//! Configuration, parameter sweeps, figure presets and data output.

pub mod config;
pub mod emit;
pub mod sweep;
pub mod validate;

pub use config::{Axis, Config, McSection, Metric, SnrAxis, SweepSection};
pub use emit::{emit, render, Format};
pub use sweep::{preset, run_figs, run_sweep, run_sweep_with, CurvePoint, SweepSpec, PRESETS};
pub use validate::{validation_report, MetricSummary, ValidationPoint, ValidationReport};
