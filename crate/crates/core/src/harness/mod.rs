//! Scenario configuration, the closed-loop simulation, metrics and sweeps.

mod config;
mod metrics;
mod run;
mod sweep;
mod trace;

pub use config::{
    BankConfig, Controller, EstimatorConfig, OutputConfig, PlannerConfig, PlantConfig, Planting, Preset, RunConfig, ScenarioConfig,
    TrackSource,
};
pub use metrics::{compute_metrics, Metrics, Timing};
pub use run::{run_scenario, save_run, Scenario, DIVERGENCE_WIDTHS};
pub use sweep::{sweep_bank_size, sweep_window, SweepRow};
pub use trace::{RunTrace, TraceRecord, NO_SELECTION};
