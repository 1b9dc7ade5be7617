use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Track;

/// Half-width of a synthetic track per metre of scale (1:43-class track).
pub const HALF_WIDTH_PER_SCALE: f64 = 0.185;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackKind {
    /// Circle of radius `scale`.
    Circle,
    /// Two semicircles of radius `0.5 * scale` joined by straights of length `1.5 * scale`.
    Oval,
    /// Oval with longer straights and a double-bend dent in the back straight.
    Chicane,
}

impl FromStr for TrackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Self::Circle),
            "oval" => Ok(Self::Oval),
            "chicane" => Ok(Self::Chicane),
            other => Err(Error::UnsupportedKind(other.to_string())),
        }
    }
}

/// Generates a closed counter-clockwise track whose start line lies on the
/// bottom edge (on a straight, for oval and chicane).
pub fn generate_synthetic_track<T: Scalar>(kind: TrackKind, scale: f64, n_points: usize) -> Result<Track<T>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Validation(format!("scale must be positive, got {scale}")));
    }
    if n_points < 50 {
        return Err(Error::Validation(format!("need at least 50 points, got {n_points}")));
    }
    let pts: Vec<[f64; 2]> = match kind {
        TrackKind::Circle => (0..n_points)
            .map(|i| {
                let a = -FRAC_PI_2 + 2.0 * PI * i as f64 / n_points as f64;
                [scale * a.cos(), scale * a.sin()]
            })
            .collect(),
        TrackKind::Oval => stadium(0.5 * scale, 1.5 * scale, n_points, None),
        TrackKind::Chicane => stadium(0.5 * scale, 2.0 * scale, n_points, Some(0.3 * scale)),
    };
    let hw = T::lit(HALF_WIDTH_PER_SCALE * scale);
    let n = pts.len();
    Track::new(pts.into_iter().map(|p| [T::lit(p[0]), T::lit(p[1])]).collect(), vec![hw; n], vec![hw; n])
}

/// Stadium curve sampled uniformly in the nominal arc length, starting at the
/// middle of the bottom straight. `dent` pushes the top straight inward with a
/// raised-cosine profile, producing curvature of both signs.
fn stadium(radius: f64, straight: f64, n: usize, dent: Option<f64>) -> Vec<[f64; 2]> {
    let half = 0.5 * straight;
    let arc = PI * radius;
    let total = 2.0 * straight + 2.0 * arc;
    (0..n)
        .map(|i| {
            let mut u = total * i as f64 / n as f64;
            // bottom straight, right half
            if u < half {
                return [u, -radius];
            }
            u -= half;
            if u < arc {
                let a = -FRAC_PI_2 + u / radius;
                return [half + radius * a.cos(), radius * a.sin()];
            }
            u -= arc;
            if u < straight {
                let x = half - u;
                let y = match dent {
                    Some(depth) => radius - depth * 0.5 * (1.0 - (2.0 * PI * u / straight).cos()),
                    None => radius,
                };
                return [x, y];
            }
            u -= straight;
            if u < arc {
                let a = FRAC_PI_2 + u / radius;
                return [-half + radius * a.cos(), radius * a.sin()];
            }
            u -= arc;
            [-half + u, -radius]
        })
        .collect()
}
