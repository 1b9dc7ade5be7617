use crate::dynamics::VehicleState;
use crate::scalar::Scalar;

use super::{RaceLine, VelocityProfileLibrary};

/// `H + 1` raceline samples spaced one control period apart in time.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory<T> {
    /// Raceline arc length of each sample (unwrapped, increasing).
    pub s: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub phi: Vec<T>,
    pub v: Vec<T>,
    /// Centerline offset of each sample, left positive.
    pub offset: Vec<T>,
    pub hw_left: Vec<T>,
    pub hw_right: Vec<T>,
}

impl<T: Scalar> ReferenceTrajectory<T> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Reference for the controller: start at the raceline projection of the
/// vehicle, then advance `s += v_ref(s) dt` for `h_steps` steps, with `v_ref`
/// interpolated from the library at the (clamped) friction estimate.
pub fn reference<T: Scalar>(
    raceline: &RaceLine<T>,
    library: &VelocityProfileLibrary<T>,
    mu_hat: T,
    state: &VehicleState<T>,
    h_steps: usize,
    dt: T,
    hint_s: Option<T>,
) -> ReferenceTrajectory<T> {
    let start = raceline.path.project([state.x, state.y], hint_s).s;
    let mut out = ReferenceTrajectory {
        s: Vec::with_capacity(h_steps + 1),
        x: Vec::with_capacity(h_steps + 1),
        y: Vec::with_capacity(h_steps + 1),
        phi: Vec::with_capacity(h_steps + 1),
        v: Vec::with_capacity(h_steps + 1),
        offset: Vec::with_capacity(h_steps + 1),
        hw_left: Vec::with_capacity(h_steps + 1),
        hw_right: Vec::with_capacity(h_steps + 1),
    };
    let mut s = start;
    for k in 0..=h_steps {
        let v = library.speed_at(raceline, mu_hat, s);
        let (p, heading) = raceline.path.sample(s);
        out.s.push(s);
        out.x.push(p[0]);
        out.y.push(p[1]);
        out.phi.push(heading);
        out.v.push(v);
        out.offset.push(raceline.path.interp(&raceline.lateral_offset, s));
        out.hw_left.push(raceline.path.interp(&raceline.half_width_left, s));
        out.hw_right.push(raceline.path.interp(&raceline.half_width_right, s));
        if k < h_steps {
            s += v * dt;
        }
    }
    out
}
