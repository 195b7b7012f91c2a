use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::Disk;
use crate::geometry::mesh::{edge_key, EdgeKey, TriMesh};
use crate::geometry::spatial::{bbox, closest_on_triangle, UniformGrid};
use crate::numeric::fsum;
use crate::vec3::Vec3;

/// Smallest dihedral angle (radians) between a triangle and the disk plane,
/// or a boundary edge and the disk plane, that still counts as transversal.
pub const ANGLE_TOL: f64 = 1e-6;

/// Where a crossing segment ends: on a mesh edge or on the disk rim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EndKey {
    Edge(EdgeKey),
    /// Rim clip of segment `i`, end `side`.
    Rim(u32, u8),
}

/// One plane/triangle crossing, clipped to the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingSegment {
    pub a: Vec3,
    pub b: Vec3,
    pub triangle: u32,
}

impl CrossingSegment {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointClass {
    /// On the mesh boundary loop with this index.
    Boundary(usize),
    /// Clipped by the disk rim.
    Rim,
    /// Interior mesh edge whose neighbour does not continue the curve.
    Dangling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub points: Vec<Vec3>,
    /// Indices into [`IntersectionCurve::segments`], in chain order.
    pub segments: Vec<usize>,
    pub closed: bool,
    /// Classes of the first and last point; `None` for closed loops.
    pub ends: Option<[EndpointClass; 2]>,
    pub length: f64,
}

impl Component {
    pub fn first(&self) -> Vec3 {
        self.points[0]
    }

    pub fn last(&self) -> Vec3 {
        *self.points.last().expect("non-empty component")
    }
}

/// `Δ ∩ Σ` as chained crossing segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionCurve {
    pub disk: Disk,
    pub segments: Vec<CrossingSegment>,
    pub components: Vec<Component>,
    /// Triangles (nearly) parallel to and touching the disk.
    pub flagged: Vec<u32>,
    /// Smallest sine of the angle between a crossed triangle or crossed
    /// boundary edge and the disk plane (1 when nothing is crossed).
    pub min_sin_angle: f64,
    pub transversal: bool,
    pub total_length: f64,
}

/// Endpoint of a component together with its far end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarEnd {
    pub component: usize,
    pub point: Vec3,
    pub class: EndpointClass,
}

impl IntersectionCurve {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// The component with an endpoint within `tol` of `x`, and its other end.
    pub fn component_containing(&self, x: Vec3, tol: f64) -> Result<FarEnd> {
        let mut best = f64::INFINITY;
        for (i, c) in self.components.iter().enumerate() {
            let Some(ends) = c.ends else {
                let d = c.points.iter().map(|p| p.distance(x)).fold(f64::INFINITY, f64::min);
                best = best.min(d);
                continue;
            };
            let (d0, d1) = (c.first().distance(x), c.last().distance(x));
            if d0.min(d1) <= tol {
                return Ok(if d0 <= d1 {
                    FarEnd { component: i, point: c.last(), class: ends[1] }
                } else {
                    FarEnd { component: i, point: c.first(), class: ends[0] }
                });
            }
            best = best.min(d0.min(d1));
        }
        Err(Error::NoComponent { distance: best })
    }
}

/// Uniform-grid index over mesh triangles for repeated disk queries.
#[derive(Debug, Clone)]
pub struct MeshIndex<'a> {
    mesh: &'a TriMesh,
    grid: UniformGrid,
}

impl<'a> MeshIndex<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let n = mesh.triangles().len();
        let mut total = 0.0;
        for t in 0..n {
            let (lo, hi) = bbox(&mesh.triangle_points(t));
            total += (hi - lo).max_abs();
        }
        let cell = (2.0 * total / n as f64).max(1e-9);
        let mut grid = UniformGrid::new(cell);
        for t in 0..n {
            let (lo, hi) = bbox(&mesh.triangle_points(t));
            grid.insert(t as u32, lo, hi);
        }
        MeshIndex { mesh, grid }
    }

    pub fn mesh(&self) -> &'a TriMesh {
        self.mesh
    }

    /// Triangles whose bounding boxes meet the bounding box of the disk.
    pub fn candidates(&self, disk: &Disk) -> Vec<u32> {
        let n = disk.normal;
        let ext = Vec3::new(
            (1.0 - n.x * n.x).max(0.0).sqrt(),
            (1.0 - n.y * n.y).max(0.0).sqrt(),
            (1.0 - n.z * n.z).max(0.0).sqrt(),
        ) * disk.radius
            + Vec3::new(1e-9, 1e-9, 1e-9) * (1.0 + disk.center.max_abs());
        let mut out = Vec::new();
        self.grid.query(disk.center - ext, disk.center + ext, &mut out);
        out
    }

    pub fn intersect(&self, disk: &Disk) -> IntersectionCurve {
        slice(disk, self.mesh, &self.candidates(disk))
    }
}

/// Brute-force slice over every triangle.
pub fn disk_mesh_intersect(disk: &Disk, mesh: &TriMesh) -> IntersectionCurve {
    let all: Vec<u32> = (0..mesh.triangles().len() as u32).collect();
    slice(disk, mesh, &all)
}

/// Clips `[p, q]` to the ball `|x − c| ≤ r`; returns the parameter range.
fn clip_to_ball(p: Vec3, q: Vec3, c: Vec3, r: f64) -> Option<(f64, f64)> {
    let d = q - p;
    let f = p - c;
    let a = d.norm_squared();
    let b = f.dot(d);
    let cc = f.norm_squared() - r * r;
    if a == 0.0 {
        return (cc <= 0.0).then_some((0.0, 1.0));
    }
    let disc = b * b - a * cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = ((-b - sq) / a).max(0.0);
    let hi = ((-b + sq) / a).min(1.0);
    (lo <= hi).then_some((lo, hi))
}

fn slice(disk: &Disk, mesh: &TriMesh, candidates: &[u32]) -> IntersectionCurve {
    let verts = mesh.vertices();
    let n = disk.normal;
    let sin_tol = ANGLE_TOL.sin();
    let plane_tol = 1e-12 * (1.0 + disk.center.max_abs());
    let mut segments = Vec::new();
    let mut keys: Vec<[EndKey; 2]> = Vec::new();
    let mut flagged = Vec::new();
    let mut min_sin: f64 = 1.0;

    for &t in candidates {
        let tri = mesh.triangles()[t as usize];
        let pts = tri.map(|i| verts[i as usize]);
        let d = pts.map(|p| disk.plane_distance(p));
        // zero counts as positive: a consistent symbolic perturbation
        let pos = d.map(|x| x >= 0.0);
        let sin = mesh.triangle_normal(t as usize).cross(n).norm();
        if pos[0] == pos[1] && pos[1] == pos[2] {
            let near_plane = d.iter().all(|x| x.abs() <= plane_tol);
            if sin < sin_tol && near_plane {
                let q = closest_on_triangle(disk.center, pts[0], pts[1], pts[2]);
                if q.distance(disk.center) <= disk.radius {
                    flagged.push(t);
                }
            }
            continue;
        }
        let mut ends = Vec::with_capacity(2);
        for k in 0..3 {
            let (i, j) = (k, (k + 1) % 3);
            if pos[i] != pos[j] {
                let (u, v) = if pos[i] { (i, j) } else { (j, i) };
                let w = d[u] / (d[u] - d[v]);
                let p = pts[u] + (pts[v] - pts[u]) * w;
                ends.push((p, edge_key(tri[i], tri[j])));
            }
        }
        debug_assert_eq!(ends.len(), 2);
        let (p, q) = (ends[0].0, ends[1].0);
        let Some((lo, hi)) = clip_to_ball(p, q, disk.center, disk.radius) else {
            continue;
        };
        if sin < sin_tol {
            flagged.push(t);
            continue;
        }
        min_sin = min_sin.min(sin);
        let idx = segments.len() as u32;
        let a = if lo > 0.0 { p + (q - p) * lo } else { p };
        let b = if hi < 1.0 { p + (q - p) * hi } else { q };
        let ka = if lo > 0.0 { EndKey::Rim(idx, 0) } else { EndKey::Edge(ends[0].1) };
        let kb = if hi < 1.0 { EndKey::Rim(idx, 1) } else { EndKey::Edge(ends[1].1) };
        for key in [ka, kb] {
            if let EndKey::Edge(e) = key {
                if mesh.boundary_loop_of_edge(e.0, e.1).is_some() {
                    let dir = (verts[e.1 as usize] - verts[e.0 as usize]).normalize();
                    min_sin = min_sin.min(dir.dot(n).abs());
                }
            }
        }
        segments.push(CrossingSegment { a, b, triangle: t });
        keys.push([ka, kb]);
    }

    let components = chain(mesh, &segments, &keys);
    let total_length = fsum(segments.iter().map(|s| s.length()));
    IntersectionCurve {
        disk: *disk,
        transversal: flagged.is_empty() && min_sin >= sin_tol,
        segments,
        components,
        flagged,
        min_sin_angle: min_sin,
        total_length,
    }
}

fn classify(mesh: &TriMesh, key: EndKey) -> EndpointClass {
    match key {
        EndKey::Rim(..) => EndpointClass::Rim,
        EndKey::Edge((a, b)) => match mesh.boundary_loop_of_edge(a, b) {
            Some(l) => EndpointClass::Boundary(l),
            None => EndpointClass::Dangling,
        },
    }
}

/// Chains segments that share a mesh edge. Open chains start from ends that
/// no other segment shares; what is left are closed loops.
fn chain(mesh: &TriMesh, segs: &[CrossingSegment], keys: &[[EndKey; 2]]) -> Vec<Component> {
    let mut at: HashMap<EndKey, Vec<(usize, usize)>> = HashMap::new();
    for (i, k) in keys.iter().enumerate() {
        for side in 0..2 {
            at.entry(k[side]).or_default().push((i, side));
        }
    }
    let point = |i: usize, side: usize| if side == 0 { segs[i].a } else { segs[i].b };
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();

    let walk = |start: usize, side: usize, used: &mut Vec<bool>| -> Component {
        let mut points = vec![point(start, side)];
        let mut order = Vec::new();
        let (mut cur, mut entry) = (start, side);
        let mut closed = false;
        let exit = loop {
            used[cur] = true;
            order.push(cur);
            let exit = 1 - entry;
            points.push(point(cur, exit));
            let key = keys[cur][exit];
            let next = at[&key].iter().copied().find(|&(j, _)| j != cur && (!used[j] || j == start));
            match next {
                Some((j, _)) if j == start => {
                    closed = true;
                    break exit;
                }
                Some((j, s)) => {
                    cur = j;
                    entry = s;
                }
                None => break exit,
            }
        };
        let length = fsum(points.windows(2).map(|w| w[0].distance(w[1])));
        let ends = (!closed).then(|| [classify(mesh, keys[start][side]), classify(mesh, keys[cur][exit])]);
        Component { points, segments: order, closed, ends, length }
    };

    for i in 0..segs.len() {
        if used[i] {
            continue;
        }
        for side in 0..2 {
            if at[&keys[i][side]].len() == 1 {
                out.push(walk(i, side, &mut used));
                break;
            }
        }
    }
    for i in 0..segs.len() {
        if !used[i] {
            out.push(walk(i, 0, &mut used));
        }
    }
    out
}
