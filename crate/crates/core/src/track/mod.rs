//! Track geometry, curvilinear coordinates, lap accounting and track files.

mod io;
mod path;
mod synthetic;

pub use io::{dump_track, load_track, read_track};
pub use path::{Path, Projection};
pub use synthetic::{generate_synthetic_track, TrackKind, HALF_WIDTH_PER_SCALE};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};

/// Minimum number of centerline points accepted.
pub const MIN_POINTS: usize = 10;

/// A closed race track. The start/finish line sits at `s = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Track<T> {
    pub centerline: Path<T>,
    pub half_width_left: Vec<T>,
    pub half_width_right: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvilinearPose<T> {
    /// Arc length in `[0, L)`.
    pub s: T,
    /// Lateral deviation, left positive.
    pub e_y: T,
    /// Heading error in `(-pi, pi]`.
    pub e_phi: T,
}

impl<T: Scalar> Track<T> {
    pub fn new(points: Vec<[T; 2]>, half_width_left: Vec<T>, half_width_right: Vec<T>) -> Result<Self> {
        let n = points.len();
        if n < MIN_POINTS {
            return Err(Error::DegenerateTrack(format!("{n} points, need at least {MIN_POINTS}")));
        }
        if half_width_left.len() != n || half_width_right.len() != n {
            return Err(Error::Validation("width arrays must match point count".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite centerline coordinate".into()));
        }
        for (i, (l, r)) in half_width_left.iter().zip(&half_width_right).enumerate() {
            if !(*l > T::zero()) || !(*r > T::zero()) {
                return Err(Error::Validation(format!("non-positive half-width at point {i}")));
            }
        }
        for i in 0..n {
            let a = points[i];
            let b = points[(i + 1) % n];
            if !((b[0] - a[0]).abs() + (b[1] - a[1]).abs() > T::zero()) {
                return Err(Error::DegenerateTrack(format!("zero-length segment after point {i}")));
            }
        }
        Ok(Self { centerline: Path::from_points(points), half_width_left, half_width_right })
    }

    pub fn length(&self) -> T {
        self.centerline.length
    }

    pub fn len(&self) -> usize {
        self.centerline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centerline.is_empty()
    }

    /// Smallest half-width on either side anywhere on the track.
    pub fn min_half_width(&self) -> T {
        self.half_width_left
            .iter()
            .chain(&self.half_width_right)
            .fold(T::infinity(), |m, &w| m.min(w))
    }

    /// Half-width on the side of the signed lateral offset `e_y` at arc length `s`.
    pub fn half_width_at(&self, s: T, e_y: T) -> T {
        if e_y >= T::zero() {
            self.centerline.interp(&self.half_width_left, s)
        } else {
            self.centerline.interp(&self.half_width_right, s)
        }
    }

    pub fn project(&self, point: [T; 2], hint_s: Option<T>) -> CurvilinearPose<T> {
        let p = self.centerline.project(point, hint_s);
        CurvilinearPose { s: p.s, e_y: p.e_y, e_phi: T::zero() }
    }

    /// Curvilinear pose of a vehicle at `(x, y)` with heading `phi`.
    pub fn curvilinear(&self, x: T, y: T, phi: T, hint_s: Option<T>) -> CurvilinearPose<T> {
        let p = self.centerline.project([x, y], hint_s);
        CurvilinearPose { s: p.s, e_y: p.e_y, e_phi: wrap_angle(phi - p.heading) }
    }

    /// Whether `|e_y|` exceeds the local half-width.
    pub fn is_outside(&self, pose: &CurvilinearPose<T>) -> bool {
        pose.e_y.abs() > self.half_width_at(pose.s, pose.e_y)
    }
}

/// Returns 1 iff the arc length wrapped forward through the start line.
pub fn lap_counter<T: Scalar>(prev_s: T, new_s: T, length: T) -> u32 {
    u32::from(prev_s > T::lit(0.8) * length && new_s < T::lit(0.2) * length)
}
