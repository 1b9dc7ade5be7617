use crate::dynamics::{ControlInput, Dbm, VehicleState};
use crate::planner::ReferenceTrajectory;
use crate::scalar::{wrap_angle, Scalar};

use super::MpcConfig;

/// Everything needed to score input sequences from one initial state.
#[derive(Debug, Clone, Copy)]
pub struct Rollout<'a, T> {
    pub model: &'a Dbm<T>,
    pub x0: &'a VehicleState<T>,
    pub reference: &'a ReferenceTrajectory<T>,
    pub cfg: &'a MpcConfig,
    /// Input applied in the previous control period.
    pub u_prev: ControlInput<T>,
    pub dt: T,
}

impl<T: Scalar> Rollout<'_, T> {
    fn tracking(&self, x: &VehicleState<T>, k: usize) -> T {
        let w = &self.cfg.weights;
        let r = self.reference;
        let dx = x.x - r.x[k];
        let dy = x.y - r.y[k];
        let dphi = wrap_angle(x.phi - r.phi[k]);
        let dv = x.vx - r.v[k];
        T::lit(w.q_pos) * (dx * dx + dy * dy) + T::lit(w.q_phi) * dphi * dphi + T::lit(w.q_v) * dv * dv
    }

    fn boundary(&self, x: &VehicleState<T>, k: usize) -> T {
        let b = &self.cfg.boundary;
        if b.weight == 0.0 {
            return T::zero();
        }
        let r = self.reference;
        let (s, c) = r.phi[k].sin_cos();
        // lateral offset from the centerline, via the reference sample's frame
        let e_y = r.offset[k] - s * (x.x - r.x[k]) + c * (x.y - r.y[k]);
        let limit = if e_y >= T::zero() { r.hw_left[k] } else { r.hw_right[k] } - T::lit(b.margin);
        let excess = (e_y.abs() - limit).max(T::zero());
        T::lit(b.weight) * excess * excess
    }

    fn input_cost(&self, u: &ControlInput<T>, prev: &ControlInput<T>) -> T {
        let w = &self.cfg.weights;
        let dd = u.d - prev.d;
        let ds = u.ddelta - prev.ddelta;
        T::lit(w.r_d) * u.d * u.d + T::lit(w.r_ddelta) * u.ddelta * u.ddelta + T::lit(w.r_rate) * (dd * dd + ds * ds)
    }

    /// Cost of `inputs`, optionally recording the predicted states. A
    /// non-finite rollout scores the sentinel cost.
    pub fn evaluate(&self, inputs: &[ControlInput<T>], mut states: Option<&mut Vec<VehicleState<T>>>) -> T {
        let h = inputs.len();
        debug_assert_eq!(self.reference.len(), h + 1, "reference must have H + 1 samples");
        let mut x = *self.x0;
        if let Some(s) = states.as_deref_mut() {
            s.clear();
            s.push(x);
        }
        let mut cost = T::zero();
        let mut prev = self.u_prev;
        for (k, u) in inputs.iter().enumerate() {
            cost += self.tracking(&x, k) + self.boundary(&x, k) + self.input_cost(u, &prev);
            prev = *u;
            x = self.model.step_unchecked(&x, u, self.dt);
            if let Some(s) = states.as_deref_mut() {
                s.push(x);
            }
        }
        cost += T::lit(self.cfg.weights.terminal_scale) * self.tracking(&x, h) + self.boundary(&x, h);
        if cost.is_finite() {
            cost.min(T::sentinel())
        } else {
            T::sentinel()
        }
    }
}

/// Cost and predicted states of an input sequence under `model`.
pub fn rollout_cost<T: Scalar>(
    model: &Dbm<T>,
    x0: &VehicleState<T>,
    inputs: &[ControlInput<T>],
    reference: &ReferenceTrajectory<T>,
    cfg: &MpcConfig,
    u_prev: ControlInput<T>,
    dt: T,
) -> (T, Vec<VehicleState<T>>) {
    let r = Rollout { model, x0, reference, cfg, u_prev, dt };
    let mut states = Vec::with_capacity(inputs.len() + 1);
    let cost = r.evaluate(inputs, Some(&mut states));
    (cost, states)
}
