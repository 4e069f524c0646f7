//! Measurement-based computation driven by one repeated 1D-cluster gate.

mod circuit;
mod decorrelation;
mod engine;
mod pattern;

pub use circuit::{Circuit, Gate};
pub use decorrelation::{projective_only_decorrelation_check, DecorrelationReport};
pub use engine::{
    run_exact, run_in_time, run_sampled, BranchOutput, ExactRun, RunMode, RunOutput, SampledRun,
    TimeEngineState, MAX_ENGINE_WIDTH,
};
pub use pattern::{compile_pattern, Pattern, Plane, SiteAction};
