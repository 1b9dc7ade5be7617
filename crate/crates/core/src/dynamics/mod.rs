//! Dynamic bicycle model with Pacejka lateral tires, RK4 integration and
//! time-varying surface schedules for the simulated plant.

mod model;
mod schedule;
mod tire;

pub use model::{dbm_derivative, rk4, rk4_step, Dbm, STATE_DIM};
pub use schedule::{schedule_eval, DropTrigger, FrictionChange, ParamSchedule};
pub use tire::{longitudinal_force, pacejka_lateral, slip_angles, VX_FLOOR};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// `[x, y, phi, vx, vy, omega, delta]`: inertial position and heading,
/// body-frame velocities, yaw rate and steering angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState<T> {
    pub x: T,
    pub y: T,
    pub phi: T,
    pub vx: T,
    pub vy: T,
    pub omega: T,
    pub delta: T,
}

impl<T: Scalar> VehicleState<T> {
    #[inline]
    pub fn to_array(&self) -> [T; STATE_DIM] {
        [self.x, self.y, self.phi, self.vx, self.vy, self.omega, self.delta]
    }

    #[inline]
    pub fn from_array(a: [T; STATE_DIM]) -> Self {
        Self { x: a[0], y: a[1], phi: a[2], vx: a[3], vy: a[4], omega: a[5], delta: a[6] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Scalar>(&self) -> VehicleState<U> {
        VehicleState::from_array(self.to_array().map(|v| U::lit(v.to_f64_lossy())))
    }
}

/// Duty cycle and steering increment applied over one control period.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput<T> {
    pub d: T,
    pub ddelta: T,
}

impl<T: Scalar> ControlInput<T> {
    pub fn new(d: T, ddelta: T) -> Self {
        Self { d, ddelta }
    }

    pub fn zero() -> Self {
        Self { d: T::zero(), ddelta: T::zero() }
    }
}

/// Vehicle parameters that are known and never adapted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleFixedParams<T> {
    pub m: T,
    pub iz: T,
    pub lf: T,
    pub lr: T,
    pub g: T,
    pub cm1: T,
    pub cm2: T,
    pub delta_max: T,
    pub d_min: T,
    pub d_max: T,
    /// Roll angle; zero on a flat track.
    pub roll: T,
    /// Pitch angle; zero on a flat track.
    pub pitch: T,
}

impl<T: Scalar> Default for VehicleFixedParams<T> {
    /// 1:43-scale car.
    fn default() -> Self {
        Self {
            m: T::lit(0.041),
            iz: T::lit(27.8e-6),
            lf: T::lit(0.029),
            lr: T::lit(0.033),
            g: T::lit(9.81),
            cm1: T::lit(0.287),
            cm2: T::lit(0.0545),
            delta_max: T::lit(0.35),
            d_min: T::lit(-0.1),
            d_max: T::lit(1.0),
            roll: T::zero(),
            pitch: T::zero(),
        }
    }
}

impl<T: Scalar> VehicleFixedParams<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [self.m, self.iz, self.lf, self.lr, self.g, self.delta_max];
        if positive.iter().any(|v| !(*v > T::zero() && v.is_finite())) {
            return Err(crate::Error::Config("m, iz, lf, lr, g, delta_max must be positive".into()));
        }
        if !(self.d_min < self.d_max) {
            return Err(crate::Error::Config("d_min must be below d_max".into()));
        }
        Ok(())
    }
}

/// Number of adapted parameters.
pub const THETA_DIM: usize = 8;

/// The adapted parameter vector: Pacejka `B, C, D` per axle plus rolling
/// resistance and drag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TireSurfaceParams<T> {
    pub bf: T,
    pub br: T,
    pub cf: T,
    pub cr: T,
    pub df: T,
    pub dr: T,
    pub cro: T,
    pub cd: T,
}

impl<T: Scalar> Default for TireSurfaceParams<T> {
    /// 1:43-scale car on a dry surface.
    fn default() -> Self {
        Self {
            bf: T::lit(2.579),
            br: T::lit(3.3852),
            cf: T::lit(1.2),
            cr: T::lit(1.2691),
            df: T::lit(0.192),
            dr: T::lit(0.1737),
            cro: T::lit(0.0518),
            cd: T::lit(0.00035),
        }
    }
}

impl<T: Scalar> TireSurfaceParams<T> {
    #[inline]
    pub fn to_array(&self) -> [T; THETA_DIM] {
        [self.bf, self.br, self.cf, self.cr, self.df, self.dr, self.cro, self.cd]
    }

    #[inline]
    pub fn from_array(a: [T; THETA_DIM]) -> Self {
        Self { bf: a[0], br: a[1], cf: a[2], cr: a[3], df: a[4], dr: a[5], cro: a[6], cd: a[7] }
    }

    /// `B, C, D > 0` and `C_ro, C_d >= 0`, all finite.
    pub fn is_valid(&self) -> bool {
        let a = self.to_array();
        a.iter().all(|v| v.is_finite()) && a[..6].iter().all(|v| *v > T::zero()) && a[6..].iter().all(|v| *v >= T::zero())
    }

    /// Scales the peak forces, and optionally the stiffness and shape factors.
    pub fn scale_grip(&self, factor: T, co_scale_bc: bool) -> Self {
        let mut out = *self;
        out.df *= factor;
        out.dr *= factor;
        if co_scale_bc {
            out.bf *= factor;
            out.br *= factor;
            out.cf *= factor;
            out.cr *= factor;
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> TireSurfaceParams<U> {
        TireSurfaceParams::from_array(self.to_array().map(|v| U::lit(v.to_f64_lossy())))
    }
}
