use crate::scalar::{wrap_angle, Scalar};

/// Closed planar polyline with arc length, tangent heading and signed curvature
/// precomputed per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub points: Vec<[T; 2]>,
    /// Cumulative arc length at each vertex; `s[0] = 0`.
    pub s: Vec<T>,
    /// Tangent angle at each vertex, wrapped to `(-pi, pi]`.
    pub heading: Vec<T>,
    /// Signed curvature, left turns positive.
    pub curvature: Vec<T>,
    /// Loop length including the closing segment.
    pub length: T,
}

/// Closest point on a path to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T> {
    /// Arc length of the foot point, in `[0, L)`.
    pub s: T,
    /// Signed lateral offset, left of the direction of travel positive.
    pub e_y: T,
    /// Heading of the segment containing the foot point.
    pub heading: T,
    pub segment: usize,
}

impl<T: Scalar> Path<T> {
    /// Builds the arc-length parameterization. Callers validate point count and
    /// segment lengths; see [`Path::validate`].
    pub fn from_points(points: Vec<[T; 2]>) -> Self {
        let n = points.len();
        let mut s = Vec::with_capacity(n);
        let mut acc = T::zero();
        s.push(acc);
        for i in 1..n {
            acc += seg_len(points[i - 1], points[i]);
            s.push(acc);
        }
        let length = acc + seg_len(points[n - 1], points[0]);

        // Central differences on the closed loop.
        let heading: Vec<T> = (0..n)
            .map(|i| {
                let prev = points[(i + n - 1) % n];
                let next = points[(i + 1) % n];
                (next[1] - prev[1]).atan2(next[0] - prev[0])
            })
            .collect();
        let curvature = (0..n)
            .map(|i| {
                let ip = (i + n - 1) % n;
                let inx = (i + 1) % n;
                let dh = wrap_angle(heading[inx] - heading[ip]);
                let ds = seg_len(points[ip], points[i]) + seg_len(points[i], points[inx]);
                dh / ds
            })
            .collect();
        Self { points, s, heading, curvature, length }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of segment `i` (from vertex `i` to `i + 1`, wrapping).
    pub fn segment_length(&self, i: usize) -> T {
        let n = self.len();
        seg_len(self.points[i], self.points[(i + 1) % n])
    }

    /// Net heading change over one loop; `+-2pi` for a simple closed curve.
    pub fn total_turning(&self) -> T {
        let n = self.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[(i + 1) % n];
                let c = self.points[(i + 2) % n];
                let h0 = (b[1] - a[1]).atan2(b[0] - a[0]);
                let h1 = (c[1] - b[1]).atan2(c[0] - b[0]);
                wrap_angle(h1 - h0)
            })
            .sum()
    }

    /// Wraps an arc length into `[0, L)`.
    pub fn wrap_s(&self, s: T) -> T {
        let mut r = s % self.length;
        if r < T::zero() {
            r += self.length;
        }
        if r >= self.length {
            r = T::zero();
        }
        r
    }

    /// Segment index containing arc length `s` and the fraction along it.
    pub fn locate(&self, s: T) -> (usize, T) {
        let s = self.wrap_s(s);
        let i = match self.s.binary_search_by(|v| v.partial_cmp(&s).expect("finite arc length")) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let len = self.segment_length(i);
        let t = if len > T::zero() { (s - self.s[i]) / len } else { T::zero() };
        (i, t.min(T::one()).max(T::zero()))
    }

    /// Linearly interpolates a per-vertex quantity at arc length `s`.
    pub fn interp(&self, values: &[T], s: T) -> T {
        let (i, t) = self.locate(s);
        let j = (i + 1) % self.len();
        values[i] + (values[j] - values[i]) * t
    }

    /// Position and segment heading at arc length `s`.
    pub fn sample(&self, s: T) -> ([T; 2], T) {
        let (i, t) = self.locate(s);
        let a = self.points[i];
        let b = self.points[(i + 1) % self.len()];
        let p = [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t];
        (p, (b[1] - a[1]).atan2(b[0] - a[0]))
    }

    /// Closest point on the polyline. With a hint, only segments overlapping
    /// `hint +- 5% L` are searched. Equidistant candidates resolve to the lowest `s`.
    pub fn project(&self, point: [T; 2], hint_s: Option<T>) -> Projection<T> {
        let n = self.len();
        let candidates: Vec<usize> = match hint_s {
            None => (0..n).collect(),
            Some(h) => self.window_segments(h, self.length * T::lit(0.05)),
        };

        let mut evals: Vec<(usize, T, T)> = Vec::with_capacity(candidates.len());
        let mut best = T::infinity();
        for &i in &candidates {
            let (t, d2) = foot_on_segment(self.points[i], self.points[(i + 1) % n], point);
            best = best.min(d2);
            evals.push((i, t, d2));
        }
        let tol = best * T::lit(1e-9) + T::lit(1e-18);
        let (seg, t) = evals
            .iter()
            .filter(|(_, _, d2)| *d2 <= best + tol)
            .map(|&(i, t, _)| (i, t, self.wrap_s(self.s[i] + t * self.segment_length(i))))
            .min_by(|a, b| a.2.partial_cmp(&b.2).expect("finite arc length"))
            .map(|(i, t, _)| (i, t))
            .expect("path has at least one segment");

        let a = self.points[seg];
        let b = self.points[(seg + 1) % n];
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        let len = (dx * dx + dy * dy).sqrt();
        let foot = [a[0] + dx * t, a[1] + dy * t];
        let rx = point[0] - foot[0];
        let ry = point[1] - foot[1];
        let cross = if len > T::zero() { (dx * ry - dy * rx) / len } else { T::zero() };
        let dist = (rx * rx + ry * ry).sqrt();
        Projection {
            s: self.wrap_s(self.s[seg] + t * len),
            e_y: if cross < T::zero() { -dist } else { dist },
            heading: dy.atan2(dx),
            segment: seg,
        }
    }

    fn window_segments(&self, hint: T, half: T) -> Vec<usize> {
        let n = self.len();
        let (start, _) = self.locate(hint);
        let mut out = vec![start];
        // forward
        let mut acc = T::zero();
        let mut i = start;
        for _ in 1..n {
            acc += self.segment_length(i);
            i = (i + 1) % n;
            if acc > half {
                break;
            }
            out.push(i);
        }
        // backward
        let mut acc = T::zero();
        let mut i = start;
        for _ in 1..n {
            i = (i + n - 1) % n;
            if out.contains(&i) {
                break;
            }
            out.push(i);
            acc += self.segment_length(i);
            if acc > half {
                break;
            }
        }
        out
    }
}

#[inline]
fn seg_len<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    (dx * dx + dy * dy).sqrt()
}

/// Parameter `t` in `[0, 1]` of the closest point on segment `ab`, and squared distance.
#[inline]
fn foot_on_segment<T: Scalar>(a: [T; 2], b: [T; 2], p: [T; 2]) -> (T, T) {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let l2 = dx * dx + dy * dy;
    let t = if l2 > T::zero() {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let fx = a[0] + dx * t - p[0];
    let fy = a[1] + dy * t - p[1];
    (t, fx * fx + fy * fy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> Path<f64> {
        let pts = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Path::from_points(pts)
    }

    #[test]
    fn circle_curvature_and_turning() {
        let p = circle(2.0, 360);
        for k in &p.curvature {
            assert!((k - 0.5).abs() < 0.005);
        }
        assert!((p.total_turning() - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn center_of_circle_resolves_to_lowest_s() {
        let p = circle(1.0, 90);
        let proj = p.project([0.0, 0.0], None);
        // Brute force: every segment's perpendicular foot is equidistant; the first
        // segment has the smallest arc length.
        let mut best = (f64::INFINITY, f64::INFINITY);
        for i in 0..p.len() {
            let (t, d2) = foot_on_segment(p.points[i], p.points[(i + 1) % p.len()], [0.0, 0.0]);
            let s = p.s[i] + t * p.segment_length(i);
            if d2 < best.0 - 1e-12 || ((d2 - best.0).abs() <= 1e-12 && s < best.1) {
                best = (d2, s);
            }
        }
        assert_eq!(proj.segment, 0);
        assert!((proj.s - best.1).abs() < 1e-12);
    }

    #[test]
    fn hint_restricts_search() {
        let p = circle(1.0, 200);
        // Query near s = pi/2 but hint on the far side: must not find the true foot.
        let q = [0.0, 0.9];
        let free = p.project(q, None);
        assert!((free.s - std::f64::consts::FRAC_PI_2).abs() < 0.02);
        let hinted = p.project(q, Some(3.0 * std::f64::consts::FRAC_PI_2));
        assert!((hinted.s - free.s).abs() > 1.0);
        assert!((hinted.s - 3.0 * std::f64::consts::FRAC_PI_2).abs() <= 0.05 * p.length + 0.04);
        let near = p.project(q, Some(1.5));
        assert!((near.s - free.s).abs() < 1e-12);
    }

    #[test]
    fn interp_wraps() {
        let p = circle(1.0, 100);
        let vals: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let last = p.s[99];
        let mid = 0.5 * (last + p.length);
        assert!((p.interp(&vals, mid) - 49.5).abs() < 1e-9);
        assert!((p.interp(&vals, p.length + p.s[10]) - 10.0).abs() < 1e-9);
    }
}
