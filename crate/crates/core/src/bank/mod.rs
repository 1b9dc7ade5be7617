//! The model bank: parameter vectors sampled around a nominal model, their
//! one-step predictions, and windowed error accumulation for model selection.

mod rng;
mod window;

pub use rng::{counter_bits, counter_normal, counter_uniform};
pub use window::{select_best, ErrorWindow};

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ControlInput, Dbm, TireSurfaceParams, VehicleState, THETA_DIM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower sampling bounds for `B, C, D` never fall below this fraction of nominal.
pub const POSITIVE_FLOOR_FRACTION: f64 = 1e-3;

/// Functional form shared by the models of a bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStructure {
    DynamicBicycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplingDistribution {
    /// Entry-wise uniform over `[lo, hi]`.
    Uniform,
    /// Entry-wise normal around nominal with `sigma = sigma_fraction * nominal`,
    /// clamped to `[lo, hi]`.
    Gaussian { sigma_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBank<T> {
    pub thetas: Vec<TireSurfaceParams<T>>,
    pub bounds_lo: TireSurfaceParams<T>,
    pub bounds_hi: TireSurfaceParams<T>,
    pub nominal: TireSurfaceParams<T>,
    pub seed: u64,
    pub structure: ModelStructure,
}

/// Bounds `nominal * (1 -+ range_fraction)`, with the lower bound of the
/// Pacejka entries floored at a small positive value and of the resistance
/// entries at zero.
pub fn sampling_bounds<T: Scalar>(nominal: &TireSurfaceParams<T>, range_fraction: T) -> (TireSurfaceParams<T>, TireSurfaceParams<T>) {
    let nom = nominal.to_array();
    let mut lo = [T::zero(); THETA_DIM];
    let mut hi = [T::zero(); THETA_DIM];
    for i in 0..THETA_DIM {
        let floor = if i < 6 { nom[i] * T::lit(POSITIVE_FLOOR_FRACTION) } else { T::zero() };
        lo[i] = (nom[i] * (T::one() - range_fraction)).max(floor);
        hi[i] = nom[i] * (T::one() + range_fraction);
    }
    (TireSurfaceParams::from_array(lo), TireSurfaceParams::from_array(hi))
}

/// Samples `n` parameter vectors uniformly inside the bounds derived from
/// `nominal` and `range_fraction`.
pub fn sample_bank<T: Scalar>(nominal: &TireSurfaceParams<T>, range_fraction: T, n: usize, seed: u64) -> Result<ModelBank<T>> {
    sample_bank_with(nominal, range_fraction, n, seed, SamplingDistribution::Uniform)
}

pub fn sample_bank_with<T: Scalar>(
    nominal: &TireSurfaceParams<T>,
    range_fraction: T,
    n: usize,
    seed: u64,
    distribution: SamplingDistribution,
) -> Result<ModelBank<T>> {
    if n == 0 {
        return Err(Error::Config("model bank needs at least one model".into()));
    }
    if !nominal.is_valid() {
        return Err(Error::Config(format!("nominal parameters invalid: {nominal:?}")));
    }
    if !(range_fraction >= T::zero() && range_fraction.is_finite()) {
        return Err(Error::Config(format!("range fraction must be non-negative, got {range_fraction}")));
    }
    let (lo, hi) = sampling_bounds(nominal, range_fraction);
    let (lo_a, hi_a, nom) = (lo.to_array(), hi.to_array(), nominal.to_array());
    let thetas = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut a = [T::zero(); THETA_DIM];
            for i in 0..THETA_DIM {
                let v = match distribution {
                    SamplingDistribution::Uniform => {
                        let u = T::lit(counter_uniform(seed, j as u64, i as u64));
                        lo_a[i] + (hi_a[i] - lo_a[i]) * u
                    }
                    SamplingDistribution::Gaussian { sigma_fraction } => {
                        let z = T::lit(counter_normal(seed, j as u64, i as u64) * sigma_fraction);
                        (nom[i] + nom[i] * z).max(lo_a[i]).min(hi_a[i])
                    }
                };
                a[i] = v;
            }
            TireSurfaceParams::from_array(a)
        })
        .collect();
    Ok(ModelBank { thetas, bounds_lo: lo, bounds_hi: hi, nominal: *nominal, seed, structure: ModelStructure::DynamicBicycle })
}

impl<T: Scalar> ModelBank<T> {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Index of the member closest to `target` in bound-normalized distance.
    pub fn nearest(&self, target: &TireSurfaceParams<T>) -> usize {
        let (lo, hi, t) = (self.bounds_lo.to_array(), self.bounds_hi.to_array(), target.to_array());
        let dist = |th: &TireSurfaceParams<T>| {
            let a = th.to_array();
            (0..THETA_DIM)
                .map(|i| {
                    let span = (hi[i] - lo[i]).max(T::epsilon());
                    let d = (a[i] - t[i]) / span;
                    d * d
                })
                .sum::<T>()
        };
        let mut best = 0;
        let mut best_d = T::infinity();
        for (j, th) in self.thetas.iter().enumerate() {
            let d = dist(th);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        best
    }

    /// Writes the sampled matrix as `u64 n` then `n * 8` little-endian `f64`s.
    pub fn dump_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&(self.len() as u64).to_le_bytes())?;
        for th in &self.thetas {
            for v in th.to_array() {
                f.write_all(&v.to_f64_lossy().to_le_bytes())?;
            }
        }
        f.flush()?;
        Ok(())
    }

    /// Reads a matrix written by [`ModelBank::dump_binary`].
    pub fn read_binary_thetas(path: impl AsRef<Path>) -> Result<Vec<TireSurfaceParams<T>>> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        if buf.len() < 8 {
            return Err(Error::Validation("bank dump truncated".into()));
        }
        let n = u64::from_le_bytes(buf[..8].try_into().expect("8 bytes")) as usize;
        if buf.len() != 8 + n * THETA_DIM * 8 {
            return Err(Error::Validation(format!("bank dump size mismatch for {n} models")));
        }
        Ok(buf[8..]
            .chunks_exact(THETA_DIM * 8)
            .map(|row| {
                let mut a = [T::zero(); THETA_DIM];
                for (i, c) in row.chunks_exact(8).enumerate() {
                    a[i] = T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes")));
                }
                TireSurfaceParams::from_array(a)
            })
            .collect())
    }
}

/// One-step prediction of every bank member from `(x_prev, u_prev)`.
///
/// `template` supplies the fixed parameters and steering period; its `theta`
/// is replaced per member. Output order matches `bank.thetas`, and each entry
/// depends only on its own member, so results are identical for any thread count.
pub fn predict_all<T: Scalar>(
    bank: &ModelBank<T>,
    template: &Dbm<T>,
    x_prev: &VehicleState<T>,
    u_prev: &ControlInput<T>,
    dt: T,
) -> Vec<VehicleState<T>> {
    let mut out = Vec::with_capacity(bank.len());
    predict_all_into(bank, template, x_prev, u_prev, dt, &mut out);
    out
}

/// [`predict_all`] writing into a reusable buffer.
pub fn predict_all_into<T: Scalar>(
    bank: &ModelBank<T>,
    template: &Dbm<T>,
    x_prev: &VehicleState<T>,
    u_prev: &ControlInput<T>,
    dt: T,
    out: &mut Vec<VehicleState<T>>,
) {
    bank.thetas
        .par_iter()
        .with_min_len(256)
        .map(|th| template.with_theta(*th).step_unchecked(x_prev, u_prev, dt))
        .collect_into_vec(out);
}
