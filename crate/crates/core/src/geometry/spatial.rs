//! Uniform hash grids used to accelerate proximity queries on curves and
//! meshes.

use std::collections::HashMap;

use crate::geometry::curve::DiscreteCurve;
use crate::vec3::Vec3;

type Cell = (i64, i64, i64);

/// Buckets item ids by the grid cells their bounding boxes overlap.
#[derive(Debug, Clone)]
pub struct UniformGrid {
    cell: f64,
    buckets: HashMap<Cell, Vec<u32>>,
}

impl UniformGrid {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "grid cell size must be positive");
        UniformGrid { cell, buckets: HashMap::new() }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn cell_of(&self, p: Vec3) -> Cell {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64, (p.z / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, id: u32, lo: Vec3, hi: Vec3) {
        let (a, b) = (self.cell_of(lo), self.cell_of(hi));
        for i in a.0..=b.0 {
            for j in a.1..=b.1 {
                for k in a.2..=b.2 {
                    self.buckets.entry((i, j, k)).or_default().push(id);
                }
            }
        }
    }

    /// Sorted, deduplicated ids whose cells overlap the query box.
    pub fn query(&self, lo: Vec3, hi: Vec3, out: &mut Vec<u32>) {
        out.clear();
        let (a, b) = (self.cell_of(lo), self.cell_of(hi));
        for i in a.0..=b.0 {
            for j in a.1..=b.1 {
                for k in a.2..=b.2 {
                    if let Some(ids) = self.buckets.get(&(i, j, k)) {
                        out.extend_from_slice(ids);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

pub fn bbox(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for p in points {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    (lo, hi)
}

/// Closest point on segment `[a, b]` to `p`, as (point, fraction).
pub fn closest_on_segment(p: Vec3, a: Vec3, b: Vec3) -> (Vec3, f64) {
    let d = b - a;
    let dd = d.norm_squared();
    if dd == 0.0 {
        return (a, 0.0);
    }
    let u = ((p - a).dot(d) / dd).clamp(0.0, 1.0);
    (a + d * u, u)
}

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Nearest point on a curve, reported with its arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveHit {
    pub distance: f64,
    pub s: f64,
    pub point: Vec3,
}

/// Segment grid over a [`DiscreteCurve`] for closest-point queries.
#[derive(Debug, Clone)]
pub struct CurveIndex<'a> {
    curve: &'a DiscreteCurve,
    grid: UniformGrid,
}

impl<'a> CurveIndex<'a> {
    pub fn new(curve: &'a DiscreteCurve) -> Self {
        let nseg = curve.segment_count();
        let cell = (2.0 * curve.length() / nseg as f64).max(1e-9 * curve.length()).max(f64::MIN_POSITIVE);
        let mut grid = UniformGrid::new(cell);
        for i in 0..nseg {
            let (a, b) = curve.segment(i);
            let (lo, hi) = bbox(&[a, b]);
            grid.insert(i as u32, lo, hi);
        }
        CurveIndex { curve, grid }
    }

    pub fn curve(&self) -> &DiscreteCurve {
        self.curve
    }

    /// Closest point among segments within `radius` of `p`.
    pub fn closest_within(&self, p: Vec3, radius: f64) -> Option<CurveHit> {
        let r = Vec3::new(radius, radius, radius);
        let mut ids = Vec::new();
        self.grid.query(p - r, p + r, &mut ids);
        let mut best: Option<CurveHit> = None;
        for id in ids {
            let i = id as usize;
            let (a, b) = self.curve.segment(i);
            let (q, u) = closest_on_segment(p, a, b);
            let d = p.distance(q);
            if d <= radius && best.map_or(true, |h| d < h.distance) {
                let s = self.curve.vertex_param(i) + u * self.curve.segment_length(i);
                best = Some(CurveHit { distance: d, s, point: q });
            }
        }
        best
    }

    /// Closest point on the whole curve, growing the search radius until a
    /// segment is found.
    pub fn closest(&self, p: Vec3) -> CurveHit {
        let mut radius = self.grid.cell_size();
        loop {
            if let Some(hit) = self.closest_within(p, radius) {
                return hit;
            }
            radius *= 4.0;
            if radius > 1e6 * self.curve.length() + p.norm() {
                // far away from everything: brute force
                return self.brute_force(p);
            }
        }
    }

    fn brute_force(&self, p: Vec3) -> CurveHit {
        let mut best = CurveHit { distance: f64::INFINITY, s: 0.0, point: p };
        for i in 0..self.curve.segment_count() {
            let (a, b) = self.curve.segment(i);
            let (q, u) = closest_on_segment(p, a, b);
            let d = p.distance(q);
            if d < best.distance {
                let s = self.curve.vertex_param(i) + u * self.curve.segment_length(i);
                best = CurveHit { distance: d, s, point: q };
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_query_finds_inserted() {
        let mut g = UniformGrid::new(0.5);
        g.insert(7, Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.2, 0.1, 0.1));
        g.insert(9, Vec3::new(5.0, 5.0, 5.0), Vec3::new(5.1, 5.1, 5.1));
        let mut out = Vec::new();
        g.query(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.1, 0.0, 0.0), &mut out);
        assert_eq!(out, vec![7]);
        g.query(Vec3::new(-3.0, -3.0, -3.0), Vec3::new(6.0, 6.0, 6.0), &mut out);
        assert_eq!(out, vec![7, 9]);
    }

    #[test]
    fn closest_point_on_square() {
        let c = DiscreteCurve::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            true,
        )
        .unwrap();
        let idx = CurveIndex::new(&c);
        let hit = idx.closest(Vec3::new(0.5, -0.25, 0.0));
        assert!((hit.distance - 0.25).abs() < 1e-15);
        assert!((hit.s - 0.5).abs() < 1e-15);
        let far = idx.closest(Vec3::new(100.0, 0.5, 0.0));
        assert!((far.distance - 99.0).abs() < 1e-12);
        assert!((far.s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn closest_point_on_triangle_regions() {
        let (a, b, c) = (Vec3::ZERO, Vec3::X, Vec3::Y);
        let inside = closest_on_triangle(Vec3::new(0.2, 0.2, 5.0), a, b, c);
        assert!((inside - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-15);
        assert_eq!(closest_on_triangle(Vec3::new(-1.0, -1.0, 0.0), a, b, c), a);
        assert_eq!(closest_on_triangle(Vec3::new(0.5, -2.0, 1.0), a, b, c), Vec3::new(0.5, 0.0, 0.0));
        let q = closest_on_triangle(Vec3::new(1.0, 1.0, 0.0), a, b, c);
        assert!((q - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
    }
}
