//! Friction estimation from the peak lateral forces of the selected model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `(D_f + D_r) / (2 m g)`: peak lateral force normalized by vehicle weight.
#[inline]
pub fn raw_friction<T: Scalar>(d_f: T, d_r: T, m: T, g: T) -> T {
    (d_f + d_r) / (T::lit(2.0) * m * g)
}

/// Exponential smoothing `gamma * mu_raw + (1 - gamma) * mu_prev`.
#[inline]
pub fn smooth<T: Scalar>(mu_prev: T, mu_raw: T, gamma: T) -> T {
    gamma * mu_raw + (T::one() - gamma) * mu_prev
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionEstimate<T> {
    pub mu_raw: T,
    pub mu: T,
    pub gamma: T,
    pub mu_init: T,
}

impl<T: Scalar> FrictionEstimate<T> {
    pub fn new(gamma: T, mu_init: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma <= T::one()) {
            return Err(Error::Config(format!("smoothing factor must lie in (0, 1], got {gamma}")));
        }
        if !(mu_init > T::zero() && mu_init.is_finite()) {
            return Err(Error::Config(format!("initial friction must be positive, got {mu_init}")));
        }
        Ok(Self { mu_raw: mu_init, mu: mu_init, gamma, mu_init })
    }

    /// Folds in a new raw estimate and returns the smoothed value.
    pub fn update(&mut self, mu_raw: T) -> T {
        self.mu_raw = mu_raw;
        self.mu = smooth(self.mu, mu_raw, self.gamma);
        self.mu
    }

    pub fn reset(&mut self) {
        self.mu = self.mu_init;
        self.mu_raw = self.mu_init;
    }
}
