use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lerp, Scalar};

use super::RaceLine;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileLimits {
    /// Longitudinal acceleration limit as a fraction of `mu g`.
    pub a_acc_scale: f64,
    /// Braking limit as a fraction of `mu g`.
    pub a_brake_scale: f64,
    pub v_max: f64,
    /// Curvature floor; bounds the lateral-limit speed on straights.
    pub kappa_min: f64,
    pub g: f64,
}

impl Default for ProfileLimits {
    fn default() -> Self {
        Self { a_acc_scale: 0.5, a_brake_scale: 0.6, v_max: 3.5, kappa_min: 1e-3, g: 9.81 }
    }
}

/// Friction-limited speed along the raceline.
///
/// The lateral limit `sqrt(mu g / |kappa|)` is capped at `v_max`, then a
/// forward acceleration pass and a backward braking pass are each run twice
/// around the loop so the profile is consistent across the start line.
pub fn velocity_profile<T: Scalar>(raceline: &RaceLine<T>, mu: T, limits: &ProfileLimits) -> Vec<T> {
    let path = &raceline.path;
    let n = path.len();
    let g = T::lit(limits.g);
    let v_max = T::lit(limits.v_max);
    let kappa_min = T::lit(limits.kappa_min);
    let a_acc = T::lit(limits.a_acc_scale) * mu * g;
    let a_brake = T::lit(limits.a_brake_scale) * mu * g;
    let two = T::lit(2.0);

    let mut v: Vec<T> = path
        .curvature
        .iter()
        .map(|k| v_max.min((mu * g / k.abs().max(kappa_min)).sqrt()))
        .collect();
    let ds: Vec<T> = (0..n).map(|i| path.segment_length(i)).collect();

    for k in 0..2 * n {
        let i = k % n;
        let j = (i + 1) % n;
        v[j] = v[j].min((v[i] * v[i] + two * a_acc * ds[i]).sqrt());
    }
    for k in (0..2 * n).rev() {
        let i = k % n;
        let j = (i + 1) % n;
        v[i] = v[i].min((v[j] * v[j] + two * a_brake * ds[i]).sqrt());
    }
    v
}

/// Speed profiles on a uniform friction grid, interpolated linearly in `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityProfileLibrary<T> {
    pub mu_grid: Vec<T>,
    /// `profiles[k][i]`: speed at raceline vertex `i` for `mu_grid[k]`.
    pub profiles: Vec<Vec<T>>,
    pub limits: ProfileLimits,
}

pub fn build_library<T: Scalar>(
    raceline: &RaceLine<T>,
    mu_min: T,
    mu_max: T,
    n_profiles: usize,
    limits: &ProfileLimits,
) -> Result<VelocityProfileLibrary<T>> {
    if !(mu_min > T::zero() && mu_min < mu_max && mu_max.is_finite()) {
        return Err(Error::Config(format!("friction range must satisfy 0 < mu_min < mu_max, got [{mu_min}, {mu_max}]")));
    }
    if n_profiles < 2 {
        return Err(Error::Config(format!("library needs at least 2 profiles, got {n_profiles}")));
    }
    let span = mu_max - mu_min;
    let last = T::lit((n_profiles - 1) as f64);
    let mu_grid: Vec<T> = (0..n_profiles)
        .map(|k| if k + 1 == n_profiles { mu_max } else { mu_min + span * T::lit(k as f64) / last })
        .collect();
    let profiles = mu_grid.iter().map(|mu| velocity_profile(raceline, *mu, limits)).collect();
    Ok(VelocityProfileLibrary { mu_grid, profiles, limits: *limits })
}

impl<T: Scalar> VelocityProfileLibrary<T> {
    pub fn mu_min(&self) -> T {
        self.mu_grid[0]
    }

    pub fn mu_max(&self) -> T {
        *self.mu_grid.last().expect("non-empty grid")
    }

    /// Bracketing profile index and blend weight for `mu`, clamped into the grid.
    pub fn bracket(&self, mu: T) -> (usize, T) {
        let mu = mu.max(self.mu_min()).min(self.mu_max());
        let k = self.mu_grid.partition_point(|g| *g <= mu).saturating_sub(1).min(self.mu_grid.len() - 2);
        let (a, b) = (self.mu_grid[k], self.mu_grid[k + 1]);
        (k, ((mu - a) / (b - a)).max(T::zero()).min(T::one()))
    }

    /// Per-vertex speeds for `mu`.
    pub fn profile_for(&self, mu: T) -> Vec<T> {
        let (k, w) = self.bracket(mu);
        self.profiles[k].iter().zip(&self.profiles[k + 1]).map(|(a, b)| lerp(*a, *b, w)).collect()
    }

    /// Reference speed at raceline arc length `s` for friction `mu`.
    pub fn speed_at(&self, raceline: &RaceLine<T>, mu: T, s: T) -> T {
        let (k, w) = self.bracket(mu);
        let (i, t) = raceline.path.locate(s);
        let j = (i + 1) % raceline.path.len();
        let at = |p: &[T]| lerp(p[i], p[j], t);
        lerp(at(&self.profiles[k]), at(&self.profiles[k + 1]), w)
    }

    /// Writes `s,kappa,v_mu<grid>...` rows, one per raceline vertex.
    pub fn dump_csv(&self, raceline: &RaceLine<T>, mut out: impl Write) -> Result<()> {
        let cols: Vec<String> = self.mu_grid.iter().map(|m| format!("v_mu{}", fmt_mu(m.to_f64_lossy()))).collect();
        writeln!(out, "s,kappa,{}", cols.join(","))?;
        for i in 0..raceline.path.len() {
            let speeds: Vec<String> = self.profiles.iter().map(|p| p[i].to_f64_lossy().to_string()).collect();
            writeln!(
                out,
                "{},{},{}",
                raceline.path.s[i].to_f64_lossy(),
                raceline.path.curvature[i].to_f64_lossy(),
                speeds.join(",")
            )?;
        }
        Ok(())
    }
}

fn fmt_mu(mu: f64) -> String {
    let s = format!("{mu:.3}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::min_curvature_raceline;
    use crate::track::{generate_synthetic_track, Track, TrackKind};

    fn oval_raceline() -> RaceLine<f64> {
        let t: Track<f64> = generate_synthetic_track(TrackKind::Oval, 1.0, 300).unwrap();
        min_curvature_raceline(&t, 0.02, 100, 0.01).unwrap()
    }

    #[test]
    fn circle_steady_state_speed() {
        let t: Track<f64> = generate_synthetic_track(TrackKind::Circle, 1.0, 360).unwrap();
        let rl = RaceLine::centerline(&t);
        let limits = ProfileLimits { v_max: 1e9, ..Default::default() };
        let v = velocity_profile(&rl, 0.8, &limits);
        for (vi, k) in v.iter().zip(&rl.path.curvature) {
            assert!((vi - (0.8 * 9.81 / k).sqrt()).abs() < 1e-9);
            assert!((vi - (0.8_f64 * 9.81).sqrt()).abs() < 1e-4);
        }
        let v2 = velocity_profile(&rl, 1.6, &limits);
        for (a, b) in v.iter().zip(&v2) {
            assert!((b / a - 2.0_f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn long_straight_reaches_cap() {
        // very large circle: kappa tiny, lateral limit above the cap everywhere
        let t: Track<f64> = generate_synthetic_track(TrackKind::Circle, 500.0, 400).unwrap();
        let rl = RaceLine::centerline(&t);
        let v = velocity_profile(&rl, 1.0, &ProfileLimits::default());
        assert!(v.iter().all(|x| *x == 3.5));
    }

    #[test]
    fn feasibility_and_periodicity() {
        let rl = oval_raceline();
        let limits = ProfileLimits::default();
        for mu in [0.2, 0.5, 1.2] {
            let v = velocity_profile(&rl, mu, &limits);
            let n = v.len();
            let (a_acc, a_brake) = (0.5 * mu * 9.81, 0.6 * mu * 9.81);
            for i in 0..n {
                let k = rl.path.curvature[i].abs();
                assert!(v[i] * v[i] * k <= mu * 9.81 * (1.0 + 1e-6));
                let j = (i + 1) % n;
                let ds = rl.path.segment_length(i);
                let acc = (v[j] * v[j] - v[i] * v[i]) / (2.0 * ds);
                assert!(acc <= a_acc + 1e-9 && -acc <= a_brake + 1e-9, "i={i} acc={acc}");
            }
            // a third pass changes nothing
            let again = {
                let mut w = v.clone();
                for i in 0..n {
                    let j = (i + 1) % n;
                    w[j] = w[j].min((w[i] * w[i] + 2.0 * a_acc * rl.path.segment_length(i)).sqrt());
                }
                w
            };
            assert!(v.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-6));
        }
    }

    #[test]
    fn library_grid_and_monotonicity() {
        let rl = oval_raceline();
        let lib = build_library(&rl, 0.4, 1.2, 5, &ProfileLimits::default()).unwrap();
        let want = [0.4, 0.6, 0.8, 1.0, 1.2];
        for (g, w) in lib.mu_grid.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        for w in lib.profiles.windows(2) {
            assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
        }
        assert!(build_library(&rl, 1.2, 0.4, 5, &ProfileLimits::default()).is_err());
        assert!(build_library(&rl, 0.4, 1.2, 1, &ProfileLimits::default()).is_err());
    }

    #[test]
    fn interpolation_between_profiles() {
        let rl = oval_raceline();
        let lib = build_library(&rl, 0.4, 1.2, 2, &ProfileLimits::default()).unwrap();
        let mid = lib.profile_for(0.8);
        for i in 0..mid.len() {
            assert!((mid[i] - 0.5 * (lib.profiles[0][i] + lib.profiles[1][i])).abs() < 1e-12);
        }
        assert_eq!(lib.profile_for(0.4), lib.profiles[0]);
        assert_eq!(lib.profile_for(5.0), lib.profiles[1]);
        let s = rl.path.s[10];
        assert!((lib.speed_at(&rl, 1.2, s) - lib.profiles[1][10]).abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let rl = oval_raceline();
        let lib = build_library(&rl, 0.3, 1.2, 10, &ProfileLimits::default()).unwrap();
        let mut buf = Vec::new();
        lib.dump_csv(&rl, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "s,kappa,v_mu0.3,v_mu0.4,v_mu0.5,v_mu0.6,v_mu0.7,v_mu0.8,v_mu0.9,v_mu1,v_mu1.1,v_mu1.2");
        assert_eq!(text.lines().count(), rl.path.len() + 1);
    }
}
