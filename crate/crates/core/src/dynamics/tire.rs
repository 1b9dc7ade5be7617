use crate::scalar::Scalar;

use super::VehicleState;

/// Lower bound on `vx` inside the slip-angle arctangents.
pub const VX_FLOOR: f64 = 0.05;

/// Front and rear slip angles.
#[inline]
pub fn slip_angles<T: Scalar>(state: &VehicleState<T>, lf: T, lr: T, vx_floor: T) -> (T, T) {
    slip_raw(state.vx, state.vy, state.omega, state.delta, lf, lr, vx_floor)
}

#[inline(always)]
pub(crate) fn slip_raw<T: Scalar>(vx: T, vy: T, omega: T, delta: T, lf: T, lr: T, vx_floor: T) -> (T, T) {
    let vx = vx.max(vx_floor);
    let alpha_f = delta - ((omega * lf + vy) / vx).atan();
    let alpha_r = ((omega * lr - vy) / vx).atan();
    (alpha_f, alpha_r)
}

/// Pacejka lateral force `D sin(C atan(B alpha))`.
#[inline(always)]
pub fn pacejka_lateral<T: Scalar>(alpha: T, b: T, c: T, d: T) -> T {
    d * (c * (b * alpha).atan()).sin()
}

/// Rear-wheel drive force `(Cm1 - Cm2 vx) d - C_ro - C_d vx^2`.
#[inline(always)]
pub fn longitudinal_force<T: Scalar>(vx: T, d: T, cm1: T, cm2: T, cro: T, cd: T) -> T {
    (cm1 - cm2 * vx) * d - cro - cd * vx * vx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(vx: f64, vy: f64, omega: f64, delta: f64) -> VehicleState<f64> {
        VehicleState { vx, vy, omega, delta, ..Default::default() }
    }

    #[test]
    fn slip_examples() {
        assert_eq!(slip_angles(&state(1.0, 0.0, 0.0, 0.0), 0.05, 0.05, 0.05), (0.0, 0.0));
        assert_eq!(slip_angles(&state(1.0, 0.0, 0.0, 0.1), 0.05, 0.05, 0.05), (0.1, 0.0));
        let (af, ar) = slip_angles(&state(1.0, 0.05, 0.5, 0.0), 0.05, 0.05, 0.05);
        // (omega lf + vy)/vx = 0.075, (omega lr - vy)/vx = -0.025
        assert!((af + 0.075_f64.atan()).abs() < 1e-15);
        assert!((ar - (-0.025_f64).atan()).abs() < 1e-15);
    }

    #[test]
    fn slip_floor_removes_singularity() {
        let (af, ar) = slip_angles(&state(0.0, 0.01, 0.2, 0.0), 0.03, 0.03, VX_FLOOR);
        assert!(af.is_finite() && ar.is_finite());
    }

    #[test]
    fn pacejka_examples() {
        assert_eq!(pacejka_lateral(0.0, 2.5, 1.2, 0.2), 0.0);
        let (b, c, d) = (2.5_f64, 1.2, 0.2);
        for &a in &[1e-4, 1e-3, 0.01, 0.02] {
            let lin = b * c * d * a;
            assert!(((pacejka_lateral(a, b, c, d) - lin) / lin).abs() < 0.01);
        }
        assert!(pacejka_lateral(1e6, b, 2.0, d).abs() <= d);
    }

    #[test]
    fn longitudinal_examples() {
        assert_eq!(longitudinal_force(0.0, 0.0, 0.287, 0.05, 0.0, 0.001), 0.0);
        assert_eq!(longitudinal_force(0.0, 1.0, 0.287, 0.05, 0.05, 0.001), 0.287 - 0.05);
        let f = longitudinal_force(2.0_f64, 0.5, 8.0, 0.5, 0.1, 0.02);
        assert!((f - 3.32).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pacejka_is_odd(alpha in -3.0..3.0f64, b in 0.01..10.0f64, c in 0.01..3.0f64, d in 0.01..5.0f64) {
            prop_assert_eq!(pacejka_lateral(-alpha, b, c, d), -pacejka_lateral(alpha, b, c, d));
        }

        #[test]
        fn pacejka_bounded_by_peak(alpha in -50.0..50.0f64, b in 0.01..10.0f64, c in 0.01..2.0f64, d in 0.01..5.0f64) {
            prop_assert!(pacejka_lateral(alpha, b, c, d).abs() <= d);
        }
    }
}
