//! Declarative collapse experiments: sweeps, predictions and report output.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{ModelRef, ScenarioConfig, ScenarioKind, Sweep, SweepParam, PRESETS};
pub use emit::{emit, render, to_csv, to_plotdata, EmitFormat};
pub use run::{log_log_fit, run, Check, DecaySlope, DegreeSummary, ScenarioReport, SweepPoint};
