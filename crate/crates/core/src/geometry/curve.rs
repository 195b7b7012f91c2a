//! Polylines with arc-length structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::fsum;
use crate::vec3::Vec3;

/// A polyline parametrized by arc length.
///
/// Closed curves do not repeat their first point; the closing chord runs
/// from the last point back to the first and evaluation is periodic with
/// period [`length`](Self::length).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct DiscreteCurve {
    points: Vec<Vec3>,
    closed: bool,
    /// Arc length at each vertex; one extra entry (= length) when closed.
    cumulative: Vec<f64>,
}

/// On-disk form: `{"closed": true, "points": [[x,y,z], ...]}`.
#[derive(Serialize, Deserialize)]
struct CurveRepr {
    closed: bool,
    points: Vec<Vec3>,
}

impl TryFrom<CurveRepr> for DiscreteCurve {
    type Error = Error;
    fn try_from(r: CurveRepr) -> Result<Self> {
        DiscreteCurve::new(r.points, r.closed)
    }
}

impl From<DiscreteCurve> for CurveRepr {
    fn from(c: DiscreteCurve) -> Self {
        CurveRepr { closed: c.closed, points: c.points }
    }
}

impl DiscreteCurve {
    pub fn new(points: Vec<Vec3>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(Error::InvalidCurve(format!("{} points given, at least {min} required", points.len())));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve(format!("point {i} is not finite")));
        }
        let n = points.len();
        let nseg = if closed { n } else { n - 1 };
        let mut cumulative = Vec::with_capacity(nseg + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        let mut lengths = Vec::with_capacity(nseg);
        for i in 0..nseg {
            let d = points[i].distance(points[(i + 1) % n]);
            if d == 0.0 {
                return Err(Error::InvalidCurve(format!("points {i} and {} coincide", (i + 1) % n)));
            }
            acc += d;
            cumulative.push(acc);
            lengths.push(d);
        }
        // exact total so that the length does not depend on traversal order
        *cumulative.last_mut().unwrap() = fsum(lengths);
        Ok(DiscreteCurve { points, closed, cumulative })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn segment(&self, i: usize) -> (Vec3, Vec3) {
        (self.points[i], self.points[(i + 1) % self.points.len()])
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        self.cumulative[i + 1] - self.cumulative[i]
    }

    /// Unit chord direction of segment `i`.
    pub fn segment_direction(&self, i: usize) -> Vec3 {
        let (a, b) = self.segment(i);
        (b - a) / self.segment_length(i)
    }

    /// Arc-length parameter of vertex `i`.
    pub fn vertex_param(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cumulative
    }

    /// Maps `s` into `[0, L)` for closed curves; identity for open ones.
    pub fn wrap(&self, s: f64) -> f64 {
        if !self.closed {
            return s;
        }
        let l = self.length();
        let w = s.rem_euclid(l);
        if w >= l {
            0.0
        } else {
            w
        }
    }

    fn check_range(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::OutOfRange { s, length: self.length() });
        }
        let w = self.wrap(s);
        if !self.closed && !(0.0..=self.length()).contains(&w) {
            return Err(Error::OutOfRange { s, length: self.length() });
        }
        Ok(w)
    }

    /// Segment containing the wrapped parameter `s` and the fraction along it.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let nseg = self.segment_count();
        let i = self.cumulative.partition_point(|&c| c <= s).saturating_sub(1).min(nseg - 1);
        let u = (s - self.cumulative[i]) / self.segment_length(i);
        (i, u)
    }

    /// Point at arc length `s` (wrapped when closed).
    pub fn eval_point(&self, s: f64) -> Result<Vec3> {
        let w = self.check_range(s)?;
        let (i, u) = self.locate(w);
        let (a, b) = self.segment(i);
        Ok(a + (b - a) * u)
    }

    /// Unit tangent at `s`. At a vertex this is the normalized sum of the
    /// two adjacent chord directions.
    pub fn tangent(&self, s: f64) -> Result<Vec3> {
        let w = self.check_range(s)?;
        let (i, _) = self.locate(w);
        if self.cumulative[i] == w {
            if let Some(prev) = self.previous_segment(i) {
                let sum = self.segment_direction(prev) + self.segment_direction(i);
                if let Some(t) = sum.try_normalize() {
                    return Ok(t);
                }
            }
        }
        if !self.closed && w == self.length() {
            return Ok(self.segment_direction(self.segment_count() - 1));
        }
        Ok(self.segment_direction(i))
    }

    fn previous_segment(&self, i: usize) -> Option<usize> {
        match (i, self.closed) {
            (0, true) => Some(self.segment_count() - 1),
            (0, false) => None,
            _ => Some(i - 1),
        }
    }

    /// Same curve traversed backwards, starting from the same point.
    pub fn reversed(&self) -> DiscreteCurve {
        let mut pts = self.points.clone();
        if self.closed {
            pts[1..].reverse();
        } else {
            pts.reverse();
        }
        DiscreteCurve::new(pts, self.closed).expect("reversal keeps validity")
    }

    /// Samples `n` tangents at `s_i = i·L/n` (closed) or `i·L/(n-1)` (open),
    /// walking the segments with a cursor instead of searching per sample.
    pub(crate) fn sampled_tangents(&self, n: usize) -> (f64, Vec<Vec3>) {
        let l = self.length();
        let step = if self.closed { l / n as f64 } else { l / (n - 1).max(1) as f64 };
        let mut out = Vec::with_capacity(n);
        let mut seg = 0usize;
        let nseg = self.segment_count();
        for k in 0..n {
            let s = k as f64 * step;
            while seg + 1 < nseg && self.cumulative[seg + 1] <= s {
                seg += 1;
            }
            out.push(self.segment_direction(seg));
        }
        (step, out)
    }
}

/// Total polyline length.
pub fn arc_length(curve: &DiscreteCurve) -> f64 {
    curve.length()
}

/// Result of the bounded-turning check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningReport {
    pub max_deviation: f64,
    pub ok: bool,
    pub eps: f64,
    pub window: f64,
    pub samples: usize,
}

/// Default sampling density of the turning check (samples per unit length).
pub const TURNING_SAMPLES_PER_UNIT: f64 = 32.0;

/// Largest `|T(x) − T(y)|` over sampled pairs with `dist(x, y) ≤ window`,
/// sampled at [`TURNING_SAMPLES_PER_UNIT`] points per unit length.
pub fn check_turning_condition(curve: &DiscreteCurve, eps: f64, window: f64) -> TurningReport {
    check_turning_condition_with(curve, eps, window, TURNING_SAMPLES_PER_UNIT)
}

pub fn check_turning_condition_with(
    curve: &DiscreteCurve,
    eps: f64,
    window: f64,
    samples_per_unit: f64,
) -> TurningReport {
    let l = curve.length();
    let n = ((samples_per_unit * l).ceil() as usize).max(curve.segment_count()).max(2);
    let (step, tangents) = curve.sampled_tangents(n);
    let reach = ((window / step) * (1.0 + 1e-12)).floor() as usize;
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        let upper = if curve.is_closed() { reach.min(n - 1) } else { reach.min(n - 1 - i) };
        for k in 1..=upper {
            let j = (i + k) % n;
            let d = (tangents[i] - tangents[j]).norm();
            if d > max_dev {
                max_dev = d;
            }
        }
    }
    TurningReport { max_deviation: max_dev, ok: max_dev <= eps, eps, window, samples: n }
}
