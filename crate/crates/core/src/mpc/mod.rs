//! Receding-horizon control over the currently selected model.
//!
//! The optimal-control problem is solved by iterative sampling: candidate input
//! sequences are rolled out through the model, the cheapest ones refit the
//! sampling mean, and the best candidate ever evaluated is returned.

mod cost;
mod solver;

pub use cost::{rollout_cost, Rollout};
pub use solver::{oracle_step, MpcSolver, Solution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostWeights {
    /// Position tracking, per m^2.
    pub q_pos: f64,
    pub q_phi: f64,
    pub q_v: f64,
    pub r_d: f64,
    pub r_ddelta: f64,
    /// Penalty on input changes between consecutive steps, both channels.
    pub r_rate: f64,
    /// Multiplier on the tracking weights for the terminal state.
    pub terminal_scale: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { q_pos: 20.0, q_phi: 0.5, q_v: 1.0, r_d: 0.01, r_ddelta: 1.0, r_rate: 0.1, terminal_scale: 5.0 }
    }
}

/// Soft track-boundary constraint: quadratic in the excursion beyond
/// `half_width - margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundaryPenalty {
    pub weight: f64,
    pub margin: f64,
}

impl Default for BoundaryPenalty {
    fn default() -> Self {
        Self { weight: 2000.0, margin: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputBounds {
    pub d_min: f64,
    pub d_max: f64,
    /// Largest steering change per control period (rad).
    pub ddelta_max: f64,
}

impl Default for InputBounds {
    fn default() -> Self {
        Self { d_min: -0.1, d_max: 1.0, ddelta_max: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Perturbed candidates per iteration.
    pub samples: usize,
    pub elite_count: usize,
    pub iterations: usize,
    pub noise_d: f64,
    pub noise_ddelta: f64,
    /// Noise scale multiplier applied after each iteration.
    pub noise_decay: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { samples: 64, elite_count: 8, iterations: 4, noise_d: 0.1, noise_ddelta: 0.05, noise_decay: 0.7, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MpcConfig {
    pub h_steps: usize,
    pub weights: CostWeights,
    pub boundary: BoundaryPenalty,
    pub bounds: InputBounds,
    pub sampler: SamplerConfig,
}

impl Default for MpcConfig {
    fn default() -> Self {
        Self {
            h_steps: 20,
            weights: CostWeights::default(),
            boundary: BoundaryPenalty::default(),
            bounds: InputBounds::default(),
            sampler: SamplerConfig::default(),
        }
    }
}

impl MpcConfig {
    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        let all = [w.q_pos, w.q_phi, w.q_v, w.r_d, w.r_ddelta, w.r_rate, w.terminal_scale, self.boundary.weight, self.boundary.margin];
        if all.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("MPC weights must be non-negative and finite".into()));
        }
        if self.h_steps == 0 {
            return Err(Error::Config("MPC horizon must be at least one step".into()));
        }
        let s = &self.sampler;
        if s.samples == 0 {
            return Err(Error::Config("sampler needs at least one sample per iteration".into()));
        }
        if s.elite_count == 0 || s.elite_count > s.samples {
            return Err(Error::Config(format!("elite count {} must lie in [1, {}]", s.elite_count, s.samples)));
        }
        if s.iterations == 0 {
            return Err(Error::Config("sampler needs at least one iteration".into()));
        }
        if !(s.noise_d >= 0.0 && s.noise_ddelta >= 0.0 && s.noise_decay > 0.0) {
            return Err(Error::Config("sampler noise scales must be non-negative".into()));
        }
        let b = &self.bounds;
        if !(b.d_min < b.d_max && b.ddelta_max >= 0.0) {
            return Err(Error::Config("invalid input bounds".into()));
        }
        Ok(())
    }
}
