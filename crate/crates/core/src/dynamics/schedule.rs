use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::TireSurfaceParams;

/// Lowest grip factor a linear decay can reach.
const DECAY_FLOOR: f64 = 0.05;

/// When a sudden grip drop fires.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropTrigger {
    /// Simulated time in seconds.
    Time(f64),
    /// Lap progress: completed laps plus the fraction of the current lap.
    /// `Progress(1.0)` fires at the end of lap 1, `Progress(0.5)` halfway through it.
    Progress(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrictionChange {
    Constant,
    /// Grip falls by `rate` (fraction of the initial value) per second.
    LinearDecay { rate: f64 },
    /// Grip drops by `fraction` once `trigger` fires.
    StepDrop { fraction: f64, trigger: DropTrigger },
}

/// Ground-truth tire/surface parameters of the plant over time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSchedule<T: Scalar> {
    #[serde(default)]
    pub theta_0: TireSurfaceParams<T>,
    pub change: FrictionChange,
    /// Scale `B` and `C` along with `D`.
    #[serde(default)]
    pub co_scale_bc: bool,
}

impl<T: Scalar> ParamSchedule<T> {
    pub fn constant(theta_0: TireSurfaceParams<T>) -> Self {
        Self { theta_0, change: FrictionChange::Constant, co_scale_bc: false }
    }

    /// Grip multiplier at time `t` and lap progress `progress`.
    pub fn factor(&self, t: f64, progress: f64) -> f64 {
        match self.change {
            FrictionChange::Constant => 1.0,
            FrictionChange::LinearDecay { rate } => (1.0 - rate * t).max(DECAY_FLOOR),
            FrictionChange::StepDrop { fraction, trigger } => {
                let fired = match trigger {
                    DropTrigger::Time(t0) => t >= t0,
                    DropTrigger::Progress(p0) => progress >= p0,
                };
                if fired {
                    1.0 - fraction
                } else {
                    1.0
                }
            }
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !self.theta_0.is_valid() {
            return Err(crate::Error::Config("theta_0 violates parameter positivity".into()));
        }
        match self.change {
            FrictionChange::LinearDecay { rate } if !(rate >= 0.0 && rate.is_finite()) => {
                Err(crate::Error::Config(format!("decay rate must be non-negative, got {rate}")))
            }
            FrictionChange::StepDrop { fraction, .. } if !(fraction > 0.0 && fraction < 1.0) => {
                Err(crate::Error::Config(format!("drop fraction must lie in (0, 1), got {fraction}")))
            }
            _ => Ok(()),
        }
    }
}

/// True parameters at time `t` (s) and lap progress `progress`.
pub fn schedule_eval<T: Scalar>(schedule: &ParamSchedule<T>, t: f64, progress: f64) -> TireSurfaceParams<T> {
    match schedule.change {
        FrictionChange::Constant => schedule.theta_0,
        _ => schedule.theta_0.scale_grip(T::lit(schedule.factor(t, progress)), schedule.co_scale_bc),
    }
}
