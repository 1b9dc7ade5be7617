use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DropTrigger, FrictionChange, ParamSchedule, TireSurfaceParams, VehicleFixedParams, STATE_DIM};
use crate::error::{Error, Result};
use crate::mpc::MpcConfig;
use crate::planner::ProfileLimits;
use crate::track::{generate_synthetic_track, load_track, Track, TrackKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TrackSource {
    Synthetic { kind: TrackKind, scale: f64, n_points: usize },
    File { path: PathBuf },
}

impl Default for TrackSource {
    fn default() -> Self {
        TrackSource::Synthetic { kind: TrackKind::Oval, scale: 1.0, n_points: 300 }
    }
}

impl TrackSource {
    pub fn build(&self) -> Result<Track<f64>> {
        match self {
            TrackSource::Synthetic { kind, scale, n_points } => generate_synthetic_track(*kind, *scale, *n_points),
            TrackSource::File { path } => load_track(path),
        }
    }
}

/// Whether the plant's initial parameters are replaced by a bank member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Planting {
    #[default]
    None,
    /// The member closest to the configured initial parameters.
    Nearest,
    Index { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantConfig {
    pub schedule: ParamSchedule<f64>,
    /// RK4 substeps per control period.
    pub substeps: usize,
    pub planted: Planting,
}

impl Default for PlantConfig {
    fn default() -> Self {
        Self { schedule: ParamSchedule::constant(TireSurfaceParams::default()), substeps: 4, planted: Planting::None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BankConfig {
    pub n: usize,
    pub range_fraction: f64,
    pub seed: u64,
    /// Per-component weights of the one-step state error.
    pub weights: [f64; STATE_DIM],
    /// Look-back window in seconds.
    pub window_s: f64,
    /// Center of the sampling box and warm-up model; defaults to the plant's
    /// initial parameters.
    pub nominal: Option<TireSurfaceParams<f64>>,
}

impl Default for BankConfig {
    fn default() -> Self {
        Self { n: 5000, range_fraction: 1.5, seed: 0, weights: [1.0; STATE_DIM], window_s: 0.2, nominal: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub gamma: f64,
    pub mu_init: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { gamma: 0.05, mu_init: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub mu_min: f64,
    pub mu_max: f64,
    pub n_profiles: usize,
    pub limits: ProfileLimits,
    pub margin: f64,
    pub raceline_iters: usize,
    pub raceline_step: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            mu_min: 0.2,
            mu_max: 1.2,
            n_profiles: 11,
            limits: ProfileLimits::default(),
            margin: 0.02,
            raceline_iters: 300,
            raceline_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Controller {
    #[default]
    Lla,
    Oracle,
    FixedNominal,
}

impl FromStr for Controller {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lla" => Ok(Controller::Lla),
            "oracle" => Ok(Controller::Oracle),
            "fixed" | "fixed_nominal" => Ok(Controller::FixedNominal),
            other => Err(Error::Config(format!("unknown controller `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dt: f64,
    pub laps: u32,
    pub max_time: f64,
    pub controller: Controller,
    pub initial_speed: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { dt: 0.02, laps: 3, max_time: 60.0, controller: Controller::Lla, initial_speed: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub dump_track: Option<PathBuf>,
    pub dump_library: Option<PathBuf>,
    pub dump_bank: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub track: TrackSource,
    pub vehicle: VehicleFixedParams<f64>,
    pub plant: PlantConfig,
    pub bank: BankConfig,
    pub estimator: EstimatorConfig,
    pub planner: PlannerConfig,
    pub mpc: MpcConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
}

/// Friction-change scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Grip decays linearly by 2% of its initial value per second.
    Exp1,
    /// Grip drops by 40% when lap 1 ends.
    Exp2,
    /// Grip drops by 40% halfway through lap 1.
    Exp3,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(Preset::Exp1),
            "exp2" => Ok(Preset::Exp2),
            "exp3" => Ok(Preset::Exp3),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

impl Preset {
    pub fn change(self) -> FrictionChange {
        match self {
            Preset::Exp1 => FrictionChange::LinearDecay { rate: 0.02 },
            Preset::Exp2 => FrictionChange::StepDrop { fraction: 0.4, trigger: DropTrigger::Progress(1.0) },
            Preset::Exp3 => FrictionChange::StepDrop { fraction: 0.4, trigger: DropTrigger::Progress(0.5) },
        }
    }
}

/// `value / dt` as an integer, if it is one (to 1e-9 relative).
fn whole_steps(value: f64, dt: f64) -> Option<usize> {
    let r = value / dt;
    let k = r.round();
    ((r - k).abs() <= 1e-9 * r.abs().max(1.0) && k >= 1.0).then_some(k as usize)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        self.plant.schedule.change = preset.change();
        self
    }

    /// Sets every seed in the scenario (bank sampling and MPC noise).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.bank.seed = seed;
        self.mpc.sampler.seed = seed;
        self
    }

    pub fn with_controller(mut self, controller: Controller) -> Self {
        self.run.controller = controller;
        self
    }

    pub fn window_steps(&self) -> Result<usize> {
        whole_steps(self.bank.window_s, self.run.dt).ok_or_else(|| {
            Error::Config(format!("window {} s must be a positive whole number of {} s periods", self.bank.window_s, self.run.dt))
        })
    }

    /// Bank-sampling center and warm-up model.
    pub fn nominal(&self) -> TireSurfaceParams<f64> {
        self.bank.nominal.unwrap_or(self.plant.schedule.theta_0)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        if !(r.dt > 0.0 && r.dt.is_finite()) {
            return Err(Error::Config(format!("control period must be positive, got {}", r.dt)));
        }
        if r.laps == 0 {
            return Err(Error::Config("laps target must be at least 1".into()));
        }
        if !(r.max_time > 0.0) {
            return Err(Error::Config("max simulation time must be positive".into()));
        }
        if !(r.initial_speed >= 0.0 && r.initial_speed.is_finite()) {
            return Err(Error::Config("initial speed must be non-negative".into()));
        }
        self.window_steps()?;
        if self.plant.substeps == 0 {
            return Err(Error::Config("plant needs at least one substep".into()));
        }
        if self.bank.n == 0 {
            return Err(Error::Config("model bank needs at least one model".into()));
        }
        if !(self.bank.range_fraction >= 0.0 && self.bank.range_fraction.is_finite()) {
            return Err(Error::Config("range fraction must be non-negative".into()));
        }
        if self.bank.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Config("error weights must be non-negative".into()));
        }
        if let Planting::Index { index } = self.plant.planted {
            if index >= self.bank.n {
                return Err(Error::Config(format!("planted index {index} outside a bank of {}", self.bank.n)));
            }
        }
        let p = &self.planner;
        if !(p.mu_min > 0.0 && p.mu_min < p.mu_max) || p.n_profiles < 2 {
            return Err(Error::Config("planner needs 0 < mu_min < mu_max and at least two profiles".into()));
        }
        if !(p.margin >= 0.0 && p.raceline_step > 0.0) {
            return Err(Error::Config("raceline margin must be non-negative and step positive".into()));
        }
        if !(self.estimator.gamma > 0.0 && self.estimator.gamma <= 1.0 && self.estimator.mu_init > 0.0) {
            return Err(Error::Config("estimator needs gamma in (0, 1] and positive initial friction".into()));
        }
        self.vehicle.validate()?;
        self.plant.schedule.validate()?;
        if !self.nominal().is_valid() {
            return Err(Error::Config("nominal tire parameters invalid".into()));
        }
        self.mpc.validate()
    }
}
