use rayon::prelude::*;

use crate::dynamics::{VehicleState, STATE_DIM};
use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};

/// An outgoing error this many times larger than the remaining sum triggers
/// an exact recomputation of that model's sum.
const CANCELLATION_RATIO: f64 = 1e4;

/// Per-model squared one-step prediction errors over the last `w_steps`
/// steps, with running sums updated in O(N) per step.
#[derive(Debug, Clone)]
pub struct ErrorWindow<T> {
    w_steps: usize,
    n: usize,
    /// Row-major `w_steps x n`; row `head` is overwritten next.
    ring: Vec<T>,
    rolling: Vec<T>,
    head: usize,
    steps_seen: usize,
    weights: [T; STATE_DIM],
    scratch: Vec<T>,
}

impl<T: Scalar> ErrorWindow<T> {
    pub fn new(w_steps: usize, n: usize, weights: [T; STATE_DIM]) -> Result<Self> {
        if w_steps == 0 || n == 0 {
            return Err(Error::Config("error window needs w_steps >= 1 and n >= 1".into()));
        }
        if weights.iter().any(|w| !(*w >= T::zero() && w.is_finite())) {
            return Err(Error::Config("state-error weights must be non-negative".into()));
        }
        Ok(Self {
            w_steps,
            n,
            ring: vec![T::zero(); w_steps * n],
            rolling: vec![T::zero(); n],
            head: 0,
            steps_seen: 0,
            weights,
            scratch: vec![T::zero(); n],
        })
    }

    pub fn w_steps(&self) -> usize {
        self.w_steps
    }

    pub fn n_models(&self) -> usize {
        self.n
    }

    pub fn steps_seen(&self) -> usize {
        self.steps_seen
    }

    pub fn is_warm(&self) -> bool {
        self.steps_seen >= self.w_steps
    }

    /// Accumulated error of every model over the window.
    pub fn rolling_sums(&self) -> &[T] {
        &self.rolling
    }

    /// Weighted squared error of one prediction; heading differenced on the circle.
    #[inline]
    pub fn step_error(&self, meas: &VehicleState<T>, pred: &VehicleState<T>) -> T {
        let (m, p) = (meas.to_array(), pred.to_array());
        let mut e = T::zero();
        for i in 0..STATE_DIM {
            let d = if i == 2 { wrap_angle(m[i] - p[i]) } else { m[i] - p[i] };
            e += self.weights[i] * d * d;
        }
        if e.is_finite() {
            e.min(T::sentinel())
        } else {
            T::sentinel()
        }
    }

    /// Scores `predictions` against the measured state and slides the window.
    pub fn update(&mut self, x_meas: &VehicleState<T>, predictions: &[VehicleState<T>]) -> Result<()> {
        if predictions.len() != self.n {
            return Err(Error::Validation(format!("expected {} predictions, got {}", self.n, predictions.len())));
        }
        let mut errs = std::mem::take(&mut self.scratch);
        {
            let this = &*self;
            predictions
                .par_iter()
                .with_min_len(1024)
                .map(|p| this.step_error(x_meas, p))
                .collect_into_vec(&mut errs);
        }
        self.push_errors(&errs);
        self.scratch = errs;
        Ok(())
    }

    /// Slides the window with precomputed per-model errors.
    pub fn push_errors(&mut self, errs: &[T]) {
        assert_eq!(errs.len(), self.n, "one error per model");
        let n = self.n;
        let row = self.head * n;
        let ratio = T::lit(CANCELLATION_RATIO);
        let mut stale = Vec::new();
        for j in 0..n {
            let old = self.ring[row + j];
            let new = errs[j];
            self.ring[row + j] = new;
            let sum = self.rolling[j] + new - old;
            self.rolling[j] = sum;
            if old > ratio * sum.abs() && old > T::zero() {
                stale.push(j);
            }
        }
        for j in stale {
            self.rolling[j] = self.naive_sum(j);
        }
        self.head = (self.head + 1) % self.w_steps;
        self.steps_seen += 1;
        if self.head == 0 {
            self.resync();
        }
    }

    fn naive_sum(&self, j: usize) -> T {
        (0..self.w_steps).map(|r| self.ring[r * self.n + j]).sum()
    }

    /// Recomputes every running sum from the ring.
    pub fn resync(&mut self) {
        for j in 0..self.n {
            self.rolling[j] = self.naive_sum(j);
        }
    }

    /// Window sums recomputed from scratch, for verification.
    pub fn naive_sums(&self) -> Vec<T> {
        (0..self.n).map(|j| self.naive_sum(j)).collect()
    }

    /// Largest relative deviation between running and naive sums.
    pub fn max_relative_drift(&self) -> T {
        self.rolling
            .iter()
            .zip(self.naive_sums())
            .map(|(r, n)| {
                let scale = n.abs().max(T::min_positive_value());
                (*r - n).abs() / scale
            })
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Index of the smallest accumulated error; ties go to the lowest index.
pub fn select_best<T: Scalar>(window: &ErrorWindow<T>) -> Result<usize> {
    if !window.is_warm() {
        return Err(Error::WindowNotWarm { seen: window.steps_seen, needed: window.w_steps });
    }
    Ok(argmin(window.rolling_sums()))
}

pub(crate) fn argmin<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (j, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = j;
        }
    }
    best
}
