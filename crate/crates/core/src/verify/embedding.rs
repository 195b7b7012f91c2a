//! Exact self-intersection tests for generated surfaces and curves.

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::geometry::mesh::TriMesh;
use crate::geometry::spatial::{bbox, UniformGrid};
use crate::geometry::DiscreteCurve;
use crate::vec3::Vec3;

fn c3(p: Vec3) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

fn sign3(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> i8 {
    let o = orient3d(c3(a), c3(b), c3(c), c3(d));
    (o > 0.0) as i8 - (o < 0.0) as i8
}

/// Drops the coordinate along `axis`.
fn project(p: Vec3, axis: usize) -> Coord<f64> {
    match axis {
        0 => Coord { x: p.y, y: p.z },
        1 => Coord { x: p.z, y: p.x },
        _ => Coord { x: p.x, y: p.y },
    }
}

fn sign2(a: Coord<f64>, b: Coord<f64>, c: Coord<f64>) -> i8 {
    let o = orient2d(a, b, c);
    (o > 0.0) as i8 - (o < 0.0) as i8
}

fn segments_meet_2d(p: Coord<f64>, q: Coord<f64>, a: Coord<f64>, b: Coord<f64>) -> bool {
    let (d1, d2) = (sign2(a, b, p), sign2(a, b, q));
    let (d3, d4) = (sign2(p, q, a), sign2(p, q, b));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    let on = |u: Coord<f64>, v: Coord<f64>, w: Coord<f64>| {
        w.x >= u.x.min(v.x) && w.x <= u.x.max(v.x) && w.y >= u.y.min(v.y) && w.y <= u.y.max(v.y)
    };
    (d1 == 0 && on(a, b, p)) || (d2 == 0 && on(a, b, q)) || (d3 == 0 && on(p, q, a)) || (d4 == 0 && on(p, q, b))
}

fn point_in_triangle_2d(p: Coord<f64>, t: [Coord<f64>; 3]) -> bool {
    let s = [sign2(t[0], t[1], p), sign2(t[1], t[2], p), sign2(t[2], t[0], p)];
    !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0))
}

/// Closed segment `pq` against closed triangle `t`, exactly.
fn segment_hits_triangle(p: Vec3, q: Vec3, t: [Vec3; 3]) -> bool {
    let (op, oq) = (sign3(t[0], t[1], t[2], p), sign3(t[0], t[1], t[2], q));
    if op * oq > 0 {
        return false;
    }
    if op == 0 && oq == 0 {
        let n = (t[1] - t[0]).cross(t[2] - t[0]);
        let axis = if n.x.abs() >= n.y.abs() && n.x.abs() >= n.z.abs() {
            0
        } else if n.y.abs() >= n.z.abs() {
            1
        } else {
            2
        };
        let (p2, q2) = (project(p, axis), project(q, axis));
        let t2 = t.map(|v| project(v, axis));
        return point_in_triangle_2d(p2, t2)
            || point_in_triangle_2d(q2, t2)
            || (0..3).any(|k| segments_meet_2d(p2, q2, t2[k], t2[(k + 1) % 3]));
    }
    let s = [sign3(p, q, t[0], t[1]), sign3(p, q, t[1], t[2]), sign3(p, q, t[2], t[0])];
    !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0))
}

/// Exact closed-triangle intersection test.
pub fn triangles_intersect(a: [Vec3; 3], b: [Vec3; 3]) -> bool {
    (0..3).any(|k| segment_hits_triangle(a[k], a[(k + 1) % 3], b))
        || (0..3).any(|k| segment_hits_triangle(b[k], b[(k + 1) % 3], a))
}

/// First pair of vertex-disjoint triangles that intersect, if any.
pub fn find_self_intersection(mesh: &TriMesh) -> Option<(u32, u32)> {
    let n = mesh.triangles().len();
    let boxes: Vec<(Vec3, Vec3)> = (0..n).map(|t| bbox(&mesh.triangle_points(t))).collect();
    let avg = boxes.iter().map(|(lo, hi)| (*hi - *lo).max_abs()).sum::<f64>() / n as f64;
    let mut grid = UniformGrid::new((2.0 * avg).max(1e-9));
    for (t, (lo, hi)) in boxes.iter().enumerate() {
        grid.insert(t as u32, *lo, *hi);
    }
    let mut cand = Vec::new();
    for t in 0..n {
        let (lo, hi) = boxes[t];
        grid.query(lo, hi, &mut cand);
        let ta = mesh.triangles()[t];
        for &u in &cand {
            if u as usize <= t {
                continue;
            }
            let tb = mesh.triangles()[u as usize];
            if ta.iter().any(|v| tb.contains(v)) {
                continue;
            }
            let (lo2, hi2) = boxes[u as usize];
            let overlap =
                lo.x <= hi2.x && lo2.x <= hi.x && lo.y <= hi2.y && lo2.y <= hi.y && lo.z <= hi2.z && lo2.z <= hi.z;
            if overlap && triangles_intersect(mesh.triangle_points(t), mesh.triangle_points(u as usize)) {
                return Some((t as u32, u));
            }
        }
    }
    None
}

/// Smallest distance between non-adjacent segments of a closed curve.
pub fn curve_self_distance(curve: &DiscreteCurve) -> f64 {
    let m = curve.segment_count();
    let mut grid = UniformGrid::new(curve.length() / m as f64 * 2.0);
    let seg_box = |i: usize| {
        let (a, b) = curve.segment(i);
        bbox(&[a, b])
    };
    for i in 0..m {
        let (lo, hi) = seg_box(i);
        grid.insert(i as u32, lo, hi);
    }
    let reach = grid.cell_size();
    let pad = Vec3::new(reach, reach, reach);
    let mut best = f64::INFINITY;
    let mut cand = Vec::new();
    for i in 0..m {
        let (lo, hi) = seg_box(i);
        grid.query(lo - pad, hi + pad, &mut cand);
        for &j in &cand {
            let j = j as usize;
            let gap = (j + m - i) % m;
            if j <= i || gap <= 1 || gap == m - 1 {
                continue;
            }
            let (a, b) = curve.segment(i);
            let (c, d) = curve.segment(j);
            best = best.min(segment_distance(a, b, c, d));
        }
    }
    best
}

/// Distance between segments `ab` and `cd`.
pub fn segment_distance(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    let d1 = b - a;
    let d2 = d - c;
    let r = a - c;
    let (aa, ee, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(r));
    let cc = d1.dot(r);
    let bb = d1.dot(d2);
    let denom = aa * ee - bb * bb;
    let mut s = if denom > 0.0 { ((bb * f - cc * ee) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (bb * s + f) / ee;
    if t < 0.0 {
        t = 0.0;
        s = (-cc / aa).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((bb - cc) / aa).clamp(0.0, 1.0);
    }
    (a + d1 * s).distance(c + d2 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_and_separate_triangles() {
        let a = [Vec3::ZERO, Vec3::X, Vec3::Y];
        let b = [Vec3::new(0.2, 0.2, -1.0), Vec3::new(0.2, 0.2, 1.0), Vec3::new(2.0, 2.0, 0.5)];
        assert!(triangles_intersect(a, b));
        let c = b.map(|p| p + Vec3::Z * 3.0);
        assert!(!triangles_intersect(a, c));
        // coplanar overlap and coplanar separation
        let d = [Vec3::new(0.1, 0.1, 0.0), Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.1, 1.0, 0.0)];
        assert!(triangles_intersect(a, d));
        let e = d.map(|p| p + Vec3::X * 5.0);
        assert!(!triangles_intersect(a, e));
    }

    #[test]
    fn segment_distances() {
        let d = segment_distance(Vec3::ZERO, Vec3::X, Vec3::new(0.5, 1.0, 1.0), Vec3::new(0.5, -1.0, 1.0));
        assert!((d - 1.0).abs() < 1e-15);
        let d = segment_distance(Vec3::ZERO, Vec3::X, Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15);
    }
}
