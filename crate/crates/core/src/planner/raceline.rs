use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::track::{Path, Track};

/// A closed path inside the track, described by lateral offsets from the
/// centerline along the centerline normals.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceLine<T> {
    pub path: Path<T>,
    /// Offset of each raceline vertex from its centerline vertex, left positive.
    pub lateral_offset: Vec<T>,
    /// Track half-widths at the matching centerline vertex.
    pub half_width_left: Vec<T>,
    pub half_width_right: Vec<T>,
}

impl<T: Scalar> RaceLine<T> {
    /// The centerline itself.
    pub fn centerline(track: &Track<T>) -> Self {
        Self::from_offsets(track, vec![T::zero(); track.len()])
    }

    pub fn from_offsets(track: &Track<T>, offsets: Vec<T>) -> Self {
        let pts = offset_points(&track.centerline, &offsets);
        Self {
            path: Path::from_points(pts),
            lateral_offset: offsets,
            half_width_left: track.half_width_left.clone(),
            half_width_right: track.half_width_right.clone(),
        }
    }

    pub fn length(&self) -> T {
        self.path.length
    }

    pub fn max_abs_curvature(&self) -> T {
        self.path.curvature.iter().fold(T::zero(), |m, k| m.max(k.abs()))
    }
}

fn offset_points<T: Scalar>(center: &Path<T>, offsets: &[T]) -> Vec<[T; 2]> {
    center
        .points
        .iter()
        .zip(&center.heading)
        .zip(offsets)
        .map(|((p, h), a)| {
            let (s, c) = h.sin_cos();
            [p[0] - *a * s, p[1] + *a * c]
        })
        .collect()
}

/// Signed Menger curvature of the triangle `(a, b, c)`.
#[inline]
fn menger<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let (bcx, bcy) = (c[0] - b[0], c[1] - b[1]);
    let (acx, acy) = (c[0] - a[0], c[1] - a[1]);
    let cross = abx * bcy - aby * bcx;
    let denom = (abx * abx + aby * aby).sqrt() * (bcx * bcx + bcy * bcy).sqrt() * (acx * acx + acy * acy).sqrt();
    if denom > T::zero() {
        T::lit(2.0) * cross / denom
    } else {
        T::zero()
    }
}

/// Sum of squared vertex curvatures of the closed polyline.
pub fn raceline_objective<T: Scalar>(points: &[[T; 2]]) -> T {
    let n = points.len();
    (0..n)
        .map(|i| {
            let k = menger(points[(i + n - 1) % n], points[i], points[(i + 1) % n]);
            k * k
        })
        .sum()
}

/// Projected gradient descent on the lateral offsets, minimizing the summed
/// squared curvature while keeping `|offset| <= half_width - margin`.
///
/// The raw gradient is smoothed along the loop (two passes of
/// `(I - lambda * D2)^-1`, a Sobolev preconditioner); without it the descent
/// crawls, since curvature is a second difference of the offsets. Each
/// iteration moves the offsets by at most `step` metres, halving the step until
/// the objective does not increase, so the objective is non-increasing.
pub fn min_curvature_raceline<T: Scalar>(track: &Track<T>, margin: T, iters: usize, step: T) -> Result<RaceLine<T>> {
    min_curvature_raceline_traced(track, margin, iters, step).map(|(rl, _)| rl)
}

/// As [`min_curvature_raceline`], also returning the objective after each iteration
/// (entry 0 is the centerline).
pub fn min_curvature_raceline_traced<T: Scalar>(track: &Track<T>, margin: T, iters: usize, step: T) -> Result<(RaceLine<T>, Vec<T>)> {
    let n = track.len();
    for i in 0..n {
        let hw = track.half_width_left[i].min(track.half_width_right[i]);
        if margin >= hw {
            return Err(Error::TrackTooNarrow { index: i, margin: margin.to_f64_lossy(), half_width: hw.to_f64_lossy() });
        }
    }
    if !(step > T::zero()) {
        return Err(Error::Config("raceline step must be positive".into()));
    }
    let center = &track.centerline;
    let lo: Vec<T> = track.half_width_right.iter().map(|w| -(*w - margin)).collect();
    let hi: Vec<T> = track.half_width_left.iter().map(|w| *w - margin).collect();
    let normals: Vec<[T; 2]> = center.heading.iter().map(|h| [-h.sin(), h.cos()]).collect();

    let mut alpha = vec![T::zero(); n];
    let mut pts = center.points.clone();
    let mut obj = raceline_objective(&pts);
    let mut history = vec![obj];
    let mut step = step;
    let h = T::lit(1e-6);
    // smoothing length of about 1/20 of the loop, in vertex units
    let lambda = T::lit((n as f64 / 20.0).powi(2));

    for _ in 0..iters {
        // Offset i only moves curvatures i-1, i, i+1.
        let local = |pts: &[[T; 2]], i: usize| -> T {
            (0..3)
                .map(|d| {
                    let c = (i + n - 1 + d) % n;
                    let k = menger(pts[(c + n - 1) % n], pts[c], pts[(c + 1) % n]);
                    k * k
                })
                .sum()
        };
        let mut grad = vec![T::zero(); n];
        let mut probe = pts.clone();
        for i in 0..n {
            let base = probe[i];
            probe[i] = [base[0] + h * normals[i][0], base[1] + h * normals[i][1]];
            let up = local(&probe, i);
            probe[i] = [base[0] - h * normals[i][0], base[1] - h * normals[i][1]];
            let down = local(&probe, i);
            probe[i] = base;
            grad[i] = (up - down) / (h + h);
        }
        // Offsets resting on a bound with the gradient pushing outward stay
        // put; the preconditioner acts on the free runs between them.
        let tol = T::lit(1e-9);
        let active: Vec<bool> = (0..n)
            .map(|i| (alpha[i] >= hi[i] - tol && grad[i] < T::zero()) || (alpha[i] <= lo[i] + tol && grad[i] > T::zero()))
            .collect();
        let grad = smooth_free(&smooth_free(&grad, &active, lambda), &active, lambda);
        let gmax = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if !(gmax > T::zero()) {
            history.push(obj);
            continue;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = (0..n).map(|i| (alpha[i] - step * grad[i] / gmax).max(lo[i]).min(hi[i])).collect();
            let trial_pts = offset_points(center, &trial);
            let trial_obj = raceline_objective(&trial_pts);
            if trial_obj <= obj {
                alpha = trial;
                pts = trial_pts;
                obj = trial_obj;
                accepted = true;
                break;
            }
            step = step * T::lit(0.5);
        }
        if accepted {
            step = step * T::lit(1.25);
        }
        history.push(obj);
    }
    Ok((RaceLine::from_offsets(track, alpha), history))
}

/// Applies `(I - lambda * D2)^-1` to `g` over the vertices not marked
/// `fixed`, treating fixed vertices as zero. Fixed vertices split the loop into
/// open runs with zero ends; with none fixed the system is cyclic.
fn smooth_free<T: Scalar>(g: &[T], fixed: &[bool], lambda: T) -> Vec<T> {
    let n = g.len();
    let Some(first) = fixed.iter().position(|f| *f) else {
        return smooth_periodic(g, lambda);
    };
    let mut out = vec![T::zero(); n];
    let mut run: Vec<usize> = Vec::new();
    for k in 1..=n {
        let i = (first + k) % n;
        if fixed[i] {
            if !run.is_empty() {
                let rhs: Vec<T> = run.iter().map(|&j| g[j]).collect();
                for (j, v) in run.iter().zip(tridiag_solve(&rhs, lambda)) {
                    out[*j] = v;
                }
                run.clear();
            }
        } else {
            run.push(i);
        }
    }
    out
}

/// Thomas algorithm for `(1 + 2 lambda) x_i - lambda (x_{i-1} + x_{i+1}) = r_i`
/// with `x_{-1} = x_m = 0`.
fn tridiag_solve<T: Scalar>(r: &[T], lambda: T) -> Vec<T> {
    let m = r.len();
    let a = -lambda;
    let b = T::one() + lambda + lambda;
    let mut c = vec![T::zero(); m];
    let mut d = vec![T::zero(); m];
    c[0] = a / b;
    d[0] = r[0] / b;
    for i in 1..m {
        let den = b - a * c[i - 1];
        c[i] = a / den;
        d[i] = (r[i] - a * d[i - 1]) / den;
    }
    let mut x = vec![T::zero(); m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Cyclic version of [`tridiag_solve`] via a Sherman-Morrison correction.
fn smooth_periodic<T: Scalar>(g: &[T], lambda: T) -> Vec<T> {
    let n = g.len();
    let a = -lambda;
    let b = T::one() + lambda + lambda;
    // cyclic matrix = A' + u v^T, u = (gamma, 0.., a), v = (1, 0.., a / gamma)
    let gamma = -b;
    let mut diag = vec![b; n];
    diag[0] = b - gamma;
    diag[n - 1] = b - a * a / gamma;
    let solve = |rhs: &[T]| -> Vec<T> {
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        c[0] = a / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - a * c[i - 1];
            c[i] = a / m;
            d[i] = (rhs[i] - a * d[i - 1]) / m;
        }
        let mut x = vec![T::zero(); n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    };
    let y = solve(g);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = a;
    let z = solve(&u);
    let fact = (y[0] + a / gamma * y[n - 1]) / (T::one() + z[0] + a / gamma * z[n - 1]);
    y.iter().zip(&z).map(|(yi, zi)| *yi - fact * *zi).collect()
}
