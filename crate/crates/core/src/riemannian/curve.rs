//! Polylines in a chart measured with the chart metric, and the
//! total-curvature audit of the turning condition.

use serde::Serialize;

use super::metric::ManifoldChart;
use super::transport::transport_segment;
use crate::error::{Error, Result};
use crate::geometry::DiscreteCurve;
use crate::numeric::fsum;
use crate::vec3::Vec3;

/// Three-point Gauss–Legendre nodes on `[0, 1]` and weights.
const GL3: [(f64, f64); 3] =
    [(0.112_701_665_379_258_31, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.887_298_334_620_741_7, 5.0 / 18.0)];

/// `g`-length of the coordinate segment `a → b`.
pub fn segment_length(chart: &ManifoldChart, a: Vec3, b: Vec3) -> f64 {
    let d = b - a;
    let n = d.norm();
    if chart.is_flat() {
        return chart.scale().sqrt() * n;
    }
    GL3.iter().map(|&(t, w)| w * chart.conformal_factor(a + d * t).sqrt()).sum::<f64>() * n
}

/// A polyline in chart coordinates parametrized by `g`-arc length. Within a
/// segment the coordinate position is interpolated linearly.
#[derive(Debug, Clone)]
pub struct MetricCurve {
    coords: DiscreteCurve,
    cumulative: Vec<f64>,
    length: f64,
}

impl MetricCurve {
    pub fn new(chart: &ManifoldChart, coords: DiscreteCurve) -> Result<MetricCurve> {
        if let Some(p) = coords.points().iter().find(|p| !chart.contains(**p)) {
            return Err(Error::LeftChart(p.to_array()));
        }
        let segs: Vec<f64> = (0..coords.segment_count())
            .map(|i| {
                let (a, b) = coords.segment(i);
                segment_length(chart, a, b)
            })
            .collect();
        let mut cumulative = Vec::with_capacity(segs.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &l in &segs {
            acc += l;
            cumulative.push(acc);
        }
        let length = fsum(segs);
        Ok(MetricCurve { coords, cumulative, length })
    }

    pub fn coords(&self) -> &DiscreteCurve {
        &self.coords
    }

    pub fn is_closed(&self) -> bool {
        self.coords.is_closed()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn segment_count(&self) -> usize {
        self.coords.segment_count()
    }

    /// `g`-arc length at vertex `i`.
    pub fn vertex_param(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// Segment index and fraction along it for arc length `s`.
    pub fn locate(&self, s: f64) -> Result<(usize, f64)> {
        let s = if self.is_closed() {
            s.rem_euclid(self.length)
        } else if (-1e-12 * self.length..=self.length * (1.0 + 1e-12)).contains(&s) {
            s.clamp(0.0, self.length)
        } else {
            return Err(Error::OutOfRange { s, length: self.length });
        };
        let n = self.segment_count();
        let i = self.cumulative.partition_point(|&c| c <= s).saturating_sub(1).min(n - 1);
        let seg = self.cumulative[i + 1] - self.cumulative[i];
        let f = if seg > 0.0 { ((s - self.cumulative[i]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        Ok((i, f))
    }

    pub fn eval(&self, s: f64) -> Result<Vec3> {
        let (i, f) = self.locate(s)?;
        let (a, b) = self.coords.segment(i);
        Ok(a.lerp(b, f))
    }

    /// Coordinate direction of the segment containing `s`, unit in `g`.
    pub fn tangent(&self, chart: &ManifoldChart, s: f64) -> Result<Vec3> {
        let (i, f) = self.locate(s)?;
        let (a, b) = self.coords.segment(i);
        Ok(chart.unit(a.lerp(b, f), b - a))
    }
}

/// Result of comparing transported-tangent deviation with total curvature
/// over every window of a given length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureTurningAudit {
    pub window: f64,
    pub windows: usize,
    /// Largest angle between `P_{y,x}T(y)` and `T(x)` over windows.
    pub max_deviation: f64,
    /// Largest `|P_{y,x}T(y) − T(x)|_g` over windows.
    pub max_chord: f64,
    /// Largest discrete `∫|k| ds` over windows.
    pub max_total_curvature: f64,
    /// Largest `deviation − total curvature` over windows.
    pub worst_excess: f64,
    pub ok: bool,
}

/// For every window starting at a vertex and spanning whole segments of
/// total length at most `window`, compares the angle between the
/// transported start tangent and the end tangent with the discrete total
/// curvature of the window. The discrete curvature counts the exterior
/// angles at vertices and, on curved charts, the covariant turning of the
/// tangent along each coordinate-straight segment.
pub fn total_curvature_to_turning(chart: &ManifoldChart, curve: &MetricCurve, window: f64) -> CurvatureTurningAudit {
    let ns = curve.segment_count();
    let seg = |i: usize| curve.coords().segment(i % ns);
    // per segment: tangent at the start, transported to the end, and the
    // angle it makes there with the segment direction
    let mut seg_angle = Vec::with_capacity(ns);
    for i in 0..ns {
        let (a, b) = seg(i);
        let t = chart.unit(a, b - a);
        let moved = transport_segment(chart, a, b, t);
        seg_angle.push(chart.angle(b, moved, b - a));
    }
    // exterior angle at the vertex ending segment i
    let vertex_angle = |i: usize| {
        let (a, b) = seg(i);
        let (_, c) = seg(i + 1);
        chart.angle(b, b - a, c - b)
    };
    let lens: Vec<f64> = (0..ns).map(|i| curve.vertex_param(i + 1) - curve.vertex_param(i)).collect();
    let mut audit = CurvatureTurningAudit {
        window,
        windows: 0,
        max_deviation: 0.0,
        max_chord: 0.0,
        max_total_curvature: 0.0,
        worst_excess: f64::NEG_INFINITY,
        ok: true,
    };
    let starts = if curve.is_closed() { ns } else { ns.saturating_sub(1) };
    for i in 0..starts {
        let (a0, b0) = seg(i);
        let t0 = chart.unit(a0, b0 - a0);
        let mut v = t0;
        let mut len = 0.0;
        let mut curvature = 0.0;
        let mut j = i;
        loop {
            if !curve.is_closed() && j >= ns {
                break;
            }
            let l = lens[j % ns];
            if len + l > window || j - i >= ns {
                break;
            }
            let (a, b) = seg(j);
            if j > i {
                curvature += vertex_angle(j - 1);
            }
            v = transport_segment(chart, a, b, v);
            curvature += seg_angle[j % ns];
            len += l;
            // compare at the end of segment j with its own direction
            let tj = chart.unit(b, b - a);
            let dev = chart.angle(b, v, tj);
            let chord = chart.norm(b, v - tj);
            audit.windows += 1;
            audit.max_deviation = audit.max_deviation.max(dev);
            audit.max_chord = audit.max_chord.max(chord);
            audit.max_total_curvature = audit.max_total_curvature.max(curvature);
            audit.worst_excess = audit.worst_excess.max(dev - curvature);
            j += 1;
        }
    }
    audit.ok = audit.worst_excess <= 1e-9;
    audit
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::shapes::circle;

    #[test]
    fn euclidean_length_matches_polyline() {
        let c = circle(5.0, 300).unwrap();
        let mc = MetricCurve::new(&ManifoldChart::euclidean(), c.clone()).unwrap();
        assert!((mc.length() - c.length()).abs() < 1e-12);
        for s in [0.0, 1.3, 17.0, 31.0] {
            assert!((mc.eval(s).unwrap() - c.eval_point(s).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn sphere_latitude_length() {
        let radius = 3.0;
        let theta = 1.1;
        let rho = crate::riemannian::metric::sphere::latitude_radius(radius, theta);
        let c = circle(rho, 4000).unwrap();
        let mc = MetricCurve::new(&ManifoldChart::sphere(radius), c).unwrap();
        let want = 2.0 * PI * radius * theta.sin();
        // inscribed polygon deficit ~ (2π/n)²/6
        assert!((mc.length() - want).abs() < 1e-6 * want, "{} vs {want}", mc.length());
    }

    #[test]
    fn straight_line_has_no_turning() {
        let pts = (0..50).map(|i| Vec3::new(i as f64 * 0.1, 0.0, 0.0)).collect();
        let c = DiscreteCurve::new(pts, false).unwrap();
        let mc = MetricCurve::new(&ManifoldChart::euclidean(), c).unwrap();
        let a = total_curvature_to_turning(&ManifoldChart::euclidean(), &mc, 1.0);
        assert!(a.windows > 0);
        assert_eq!(a.max_deviation, 0.0);
        assert_eq!(a.max_total_curvature, 0.0);
        assert!(a.ok);
    }

    #[test]
    fn planar_arc_deviation_equals_total_curvature() {
        let r = 4.0;
        let c = circle(r, 800).unwrap();
        let chart = ManifoldChart::euclidean();
        let mc = MetricCurve::new(&chart, c).unwrap();
        let a = total_curvature_to_turning(&chart, &mc, 1.5);
        assert!((a.max_deviation - a.max_total_curvature).abs() < 1e-12);
        // whole segments only: the turning equals the number of exterior
        // angles times 2π/n
        let step = 2.0 * PI / 800.0;
        let seg = 2.0 * r * (step / 2.0).sin();
        let m = (1.5 / seg).floor();
        assert!((a.max_total_curvature - (m - 1.0) * step).abs() < 1e-9);
        assert!(a.ok);
    }

    #[test]
    fn sphere_great_circle_has_no_covariant_turning() {
        let radius = 2.0;
        let chart = ManifoldChart::sphere(radius);
        // the equator sphere |x| = R is totally geodesic; great circles on
        // it appear as coordinate circles of radius R
        let c = circle(radius, 2000).unwrap();
        let mc = MetricCurve::new(&chart, c).unwrap();
        let a = total_curvature_to_turning(&chart, &mc, 1.0);
        // only the chord-versus-tangent offsets at the two ends remain
        let step = 2.0 * PI / 2000.0;
        assert!(a.max_deviation <= step * (1.0 + 1e-6), "{}", a.max_deviation);
        assert!(a.ok);
    }
}
