use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tire::{longitudinal_force, pacejka_lateral, slip_raw, VX_FLOOR};
use super::{ControlInput, TireSurfaceParams, VehicleFixedParams, VehicleState};

pub const STATE_DIM: usize = 7;

/// A dynamic bicycle model instance: fixed vehicle parameters, one
/// tire/surface parameter vector, and the steering-rate period.
#[derive(Debug, Clone, Copy)]
pub struct Dbm<T> {
    pub fixed: VehicleFixedParams<T>,
    pub theta: TireSurfaceParams<T>,
    /// Period over which `ddelta` is applied (the control period).
    pub dt_steer: T,
    pub vx_floor: T,
}

impl<T: Scalar> Dbm<T> {
    pub fn new(fixed: VehicleFixedParams<T>, theta: TireSurfaceParams<T>, dt_steer: T) -> Self {
        Self { fixed, theta, dt_steer, vx_floor: T::lit(VX_FLOOR) }
    }

    pub fn with_theta(&self, theta: TireSurfaceParams<T>) -> Self {
        Self { theta, ..*self }
    }

    #[inline(always)]
    pub fn derivative(&self, x: &[T; STATE_DIM], u: &ControlInput<T>) -> [T; STATE_DIM] {
        let f = &self.fixed;
        let th = &self.theta;
        let [_, _, phi, vx, vy, omega, delta] = *x;

        let (alpha_f, alpha_r) = slip_raw(vx, vy, omega, delta, f.lf, f.lr, self.vx_floor);
        let ffy = pacejka_lateral(alpha_f, th.bf, th.cf, th.df);
        let fry = pacejka_lateral(alpha_r, th.br, th.cr, th.dr);
        let frx = longitudinal_force(vx, u.d, f.cm1, f.cm2, th.cro, th.cd);

        let (sin_phi, cos_phi) = phi.sin_cos();
        let (sin_d, cos_d) = delta.sin_cos();
        let m = f.m;
        [
            vx * cos_phi - vy * sin_phi,
            vx * sin_phi + vy * cos_phi,
            omega,
            (frx - ffy * sin_d + m * vy * omega - m * f.g * f.pitch.sin()) / m,
            (fry + ffy * cos_d - m * vx * omega + m * f.g * f.roll.sin()) / m,
            (ffy * f.lf * cos_d - fry * f.lr) / f.iz,
            u.ddelta / self.dt_steer,
        ]
    }

    /// One RK4 step of length `dt` without validation; steering is clamped.
    #[inline]
    pub fn step_unchecked(&self, x: &VehicleState<T>, u: &ControlInput<T>, dt: T) -> VehicleState<T> {
        let mut out = VehicleState::from_array(rk4(|s| self.derivative(s, u), &x.to_array(), dt));
        out.delta = out.delta.max(-self.fixed.delta_max).min(self.fixed.delta_max);
        out
    }

    /// Integrates one control period in `substeps` equal RK4 steps.
    pub fn advance(&self, x: &VehicleState<T>, u: &ControlInput<T>, period: T, substeps: usize) -> Result<VehicleState<T>> {
        let dt = period / T::lit(substeps.max(1) as f64);
        let mut s = *x;
        for _ in 0..substeps.max(1) {
            s = rk4_step(self, &s, u, dt)?;
        }
        Ok(s)
    }
}

/// Free-function form of [`Dbm::derivative`].
pub fn dbm_derivative<T: Scalar>(
    state: &VehicleState<T>,
    input: &ControlInput<T>,
    fixed: &VehicleFixedParams<T>,
    theta: &TireSurfaceParams<T>,
    dt_steer: T,
) -> VehicleState<T> {
    let model = Dbm::new(*fixed, *theta, dt_steer);
    VehicleState::from_array(model.derivative(&state.to_array(), input))
}

/// Classical fourth-order Runge-Kutta step of an autonomous system.
#[inline(always)]
pub fn rk4<T: Scalar, const N: usize, F>(f: F, x: &[T; N], dt: T) -> [T; N]
where
    F: Fn(&[T; N]) -> [T; N],
{
    let half = dt * T::lit(0.5);
    let k1 = f(x);
    let k2 = f(&axpy(x, half, &k1));
    let k3 = f(&axpy(x, half, &k2));
    let k4 = f(&axpy(x, dt, &k3));
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let mut out = *x;
    for i in 0..N {
        out[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
    }
    out
}

#[inline(always)]
fn axpy<T: Scalar, const N: usize>(x: &[T; N], a: T, k: &[T; N]) -> [T; N] {
    let mut out = *x;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// RK4 step with the input held over `dt`, steering clamped to `+-delta_max`.
pub fn rk4_step<T: Scalar>(model: &Dbm<T>, state: &VehicleState<T>, input: &ControlInput<T>, dt: T) -> Result<VehicleState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Validation(format!("integration step must be positive, got {dt}")));
    }
    let out = model.step_unchecked(state, input, dt);
    if !out.is_finite() {
        return Err(Error::IntegrationDiverged(format!("{out:?}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{pacejka_lateral, slip_angles};

    fn model() -> Dbm<f64> {
        Dbm::new(VehicleFixedParams::default(), TireSurfaceParams::default(), 0.02)
    }

    /// Independent scalar transcription of the model equations.
    fn scalar_oracle(x: [f64; 7], d: f64, dd: f64, fx: &VehicleFixedParams<f64>, th: &TireSurfaceParams<f64>, dts: f64) -> [f64; 7] {
        let (phi, vx, vy, w, delta) = (x[2], x[3], x[4], x[5], x[6]);
        let vxe = if vx > 0.05 { vx } else { 0.05 };
        let af = delta - ((w * fx.lf + vy) / vxe).atan();
        let ar = ((w * fx.lr - vy) / vxe).atan();
        let ffy = th.df * (th.cf * (th.bf * af).atan()).sin();
        let fry = th.dr * (th.cr * (th.br * ar).atan()).sin();
        let frx = (fx.cm1 - fx.cm2 * vx) * d - th.cro - th.cd * vx * vx;
        [
            vx * phi.cos() - vy * phi.sin(),
            vx * phi.sin() + vy * phi.cos(),
            w,
            (frx - ffy * delta.sin() + fx.m * vy * w) / fx.m,
            (fry + ffy * delta.cos() - fx.m * vx * w) / fx.m,
            (ffy * fx.lf * delta.cos() - fry * fx.lr) / fx.iz,
            dd / dts,
        ]
    }

    #[test]
    fn matches_scalar_oracle() {
        let m = model();
        let cases = [
            [0.3, -0.2, 0.7, 1.4, 0.12, -0.9, 0.15],
            [1.0, 2.0, -2.5, 2.2, -0.3, 2.4, -0.2],
            [0.0, 0.0, 3.0, 0.02, 0.05, 0.5, 0.3],
        ];
        for c in cases {
            let u = ControlInput::new(0.4, -0.01);
            let got = m.derivative(&c, &u);
            let want = scalar_oracle(c, 0.4, -0.01, &m.fixed, &m.theta, 0.02);
            for i in 0..7 {
                assert!((got[i] - want[i]).abs() <= 1e-12 * want[i].abs().max(1.0), "row {i}: {} vs {}", got[i], want[i]);
            }
        }
    }

    #[test]
    fn straight_coasting_equilibrium() {
        let mut m = model();
        m.theta.cro = 0.0;
        m.theta.cd = 0.0;
        let x = VehicleState { phi: 0.4, vx: 1.5, ..Default::default() };
        // F_rx = (Cm1 - Cm2 vx) d = 0 at d = 0
        let dx = dbm_derivative(&x, &ControlInput::zero(), &m.fixed, &m.theta, 0.02);
        assert!((dx.x - 1.5 * 0.4_f64.cos()).abs() < 1e-15);
        assert!((dx.y - 1.5 * 0.4_f64.sin()).abs() < 1e-15);
        assert_eq!((dx.vx, dx.vy, dx.omega, dx.delta), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn heading_rotates_velocity() {
        let x = VehicleState { phi: std::f64::consts::FRAC_PI_2, vx: 1.0, ..Default::default() };
        let m = model();
        let dx = dbm_derivative(&x, &ControlInput::zero(), &m.fixed, &m.theta, 0.02);
        assert!(dx.x.abs() < 1e-15);
        assert!((dx.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_equivariance() {
        let m = model();
        let base = VehicleState { x: 0.3, y: -0.1, phi: 0.2, vx: 1.7, vy: 0.08, omega: 1.1, delta: 0.12 };
        let u = ControlInput::new(0.6, 0.01);
        let d0 = m.derivative(&base.to_array(), &u);
        for k in 0..12 {
            let rot = -3.0 + 0.5 * k as f64;
            let (s, c) = rot.sin_cos();
            let moved = VehicleState { x: c * base.x - s * base.y + 0.7, y: s * base.x + c * base.y - 2.0, phi: base.phi + rot, ..base };
            let d1 = m.derivative(&moved.to_array(), &u);
            assert!((d1[0] - (c * d0[0] - s * d0[1])).abs() < 1e-10);
            assert!((d1[1] - (s * d0[0] + c * d0[1])).abs() < 1e-10);
            for i in 2..7 {
                assert!((d1[i] - d0[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn free_particle_exact() {
        // with no forces the position advances by vx dt exactly
        let mut m = model();
        m.theta.cro = 0.0;
        m.theta.cd = 0.0;
        let x = VehicleState { vx: 1.25, ..Default::default() };
        let y = rk4_step(&m, &x, &ControlInput::zero(), 0.02).unwrap();
        assert_eq!(y.x, 1.25 * 0.02);
        assert_eq!(y.vx, 1.25);
    }

    #[test]
    fn zero_dt_rejected() {
        let m = model();
        assert!(rk4_step(&m, &VehicleState::default(), &ControlInput::zero(), 0.0).is_err());
    }

    #[test]
    fn divergence_reported() {
        let m = model();
        let x = VehicleState { vx: f64::NAN, ..Default::default() };
        assert!(matches!(rk4_step(&m, &x, &ControlInput::zero(), 0.01), Err(Error::IntegrationDiverged(_))));
    }

    #[test]
    fn steering_clamped() {
        let m = model();
        let x = VehicleState { vx: 1.0, delta: 0.34, ..Default::default() };
        let y = rk4_step(&m, &x, &ControlInput::new(0.0, 0.05), 0.02).unwrap();
        assert_eq!(y.delta, 0.35);
    }

    #[test]
    fn rk4_fourth_order() {
        // smooth cornering segment; reference from a very fine integration
        let m = model();
        let x0 = VehicleState { vx: 1.5, vy: 0.0, omega: 0.0, delta: 0.1, ..Default::default() };
        let u = ControlInput::new(0.3, 0.0);
        let horizon = 0.4;
        let run = |n: usize| {
            let dt = horizon / n as f64;
            let mut s = x0;
            for _ in 0..n {
                s = rk4_step(&m, &s, &u, dt).unwrap();
            }
            s.to_array()
        };
        let exact = run(20_000);
        let err = |n: usize| {
            let s = run(n);
            s.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        };
        let (e1, e2) = (err(40), err(80));
        let order = (e1 / e2).log2();
        assert!(order >= 3.8, "observed order {order} (ratio {})", e1 / e2);
    }

    #[test]
    fn f32_model_runs() {
        let m: Dbm<f32> = Dbm::new(VehicleFixedParams::default(), TireSurfaceParams::default(), 0.02);
        let x = VehicleState { vx: 1.0f32, delta: 0.1, ..Default::default() };
        let y = m.advance(&x, &ControlInput::new(0.5, 0.0), 0.02, 4).unwrap();
        let y64 = model().advance(&x.cast(), &ControlInput::new(0.5, 0.0), 0.02, 4).unwrap();
        assert!((y.vx as f64 - y64.vx).abs() < 1e-5);
        let _ = slip_angles(&x, 0.03, 0.03, 0.05);
        let _ = pacejka_lateral(0.1f32, 1.0, 1.0, 1.0);
    }
}
