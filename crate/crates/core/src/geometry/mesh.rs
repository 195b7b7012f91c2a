//! Triangle meshes and the annulus surface spanning the two curves.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::fsum;
use crate::vec3::Vec3;

/// Undirected edge key with the smaller vertex first.
pub type EdgeKey = (u32, u32);

#[inline]
pub fn edge_key(a: u32, b: u32) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Triangle mesh with its boundary loops extracted at construction.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    boundary_loops: Vec<Vec<u32>>,
    /// Boundary edge → index of the loop containing it.
    boundary_edges: HashMap<EdgeKey, usize>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
        }
        let nv = vertices.len() as u32;
        let mut edge_count: BTreeMap<EdgeKey, u32> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            if (b - a).cross(c - a).norm() <= 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {t} is degenerate")));
            }
            for k in 0..3 {
                *edge_count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        if let Some((e, _)) = edge_count.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidMesh(format!("edge {e:?} has more than two triangles")));
        }

        // chain boundary edges into loops; every boundary vertex must have
        // exactly two boundary neighbours
        let mut adjacency: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (&(a, b), &c) in &edge_count {
            if c == 1 {
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
        }
        if let Some((v, n)) = adjacency.iter().find(|(_, n)| n.len() != 2) {
            return Err(Error::InvalidMesh(format!("boundary vertex {v} has {} boundary edges", n.len())));
        }
        let mut visited: HashMap<u32, bool> = adjacency.keys().map(|&v| (v, false)).collect();
        let mut boundary_loops = Vec::new();
        let mut boundary_edges = HashMap::new();
        for &start in adjacency.keys() {
            if visited[&start] {
                continue;
            }
            let mut lp = vec![start];
            visited.insert(start, true);
            let mut prev = start;
            let mut cur = *adjacency[&start].iter().min().unwrap();
            while cur != start {
                lp.push(cur);
                visited.insert(cur, true);
                let nb = &adjacency[&cur];
                let next = if nb[0] == prev { nb[1] } else { nb[0] };
                prev = cur;
                cur = next;
            }
            let idx = boundary_loops.len();
            for k in 0..lp.len() {
                boundary_edges.insert(edge_key(lp[k], lp[(k + 1) % lp.len()]), idx);
            }
            boundary_loops.push(lp);
        }
        Ok(TriMesh { vertices, triangles, boundary_loops, boundary_edges })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn boundary_loops(&self) -> &[Vec<u32>] {
        &self.boundary_loops
    }

    /// Loop index when `(a, b)` is a boundary edge.
    pub fn boundary_loop_of_edge(&self, a: u32, b: u32) -> Option<usize> {
        self.boundary_edges.get(&edge_key(a, b)).copied()
    }

    pub fn triangle_points(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.vertices[i as usize])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * (b - a).cross(c - a).norm()
    }

    /// Unit normal of triangle `t` (orientation follows the vertex order).
    pub fn triangle_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle_points(t);
        (b - a).cross(c - a).normalize()
    }

    pub fn area(&self) -> f64 {
        fsum((0..self.triangles.len()).map(|t| self.triangle_area(t)))
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = crate::geometry::spatial::bbox(&self.vertices);
        (hi - lo).norm()
    }

    /// Boundary loop `i` as a closed curve through its vertices.
    pub fn loop_curve(&self, i: usize) -> Result<crate::geometry::DiscreteCurve> {
        let pts = self.boundary_loops[i].iter().map(|&v| self.vertices[v as usize]).collect();
        crate::geometry::DiscreteCurve::new(pts, true)
    }
}

/// A triangulated annulus with two boundary loops.
///
/// `loop0`/`loop1` index into [`TriMesh::boundary_loops`] and name the loops
/// spanning Γ₀ and Γ₁ respectively.
#[derive(Debug, Clone)]
pub struct AnnulusSurface {
    mesh: TriMesh,
    loop0: usize,
    loop1: usize,
    area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopLabels {
    pub loop0: usize,
    pub loop1: usize,
}

impl AnnulusSurface {
    /// Wraps a mesh with exactly two boundary loops; loop 0 is labelled Γ₀.
    pub fn new(mesh: TriMesh) -> Result<Self> {
        Self::with_labels(mesh, 0)
    }

    pub fn with_labels(mesh: TriMesh, loop0: usize) -> Result<Self> {
        let n = mesh.boundary_loops().len();
        if n != 2 {
            return Err(Error::Structural(format!("annulus needs two boundary loops, mesh has {n}")));
        }
        if loop0 > 1 {
            return Err(Error::InvalidArgument(format!("loop index {loop0} out of range")));
        }
        let area = mesh.area();
        Ok(AnnulusSurface { mesh, loop0, loop1: 1 - loop0, area })
    }

    /// Same surface with the loop labels swapped when `loop0` differs.
    pub fn relabeled(&self, loop0: usize) -> AnnulusSurface {
        AnnulusSurface { mesh: self.mesh.clone(), loop0, loop1: 1 - loop0, area: self.area }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn labels(&self) -> LoopLabels {
        LoopLabels { loop0: self.loop0, loop1: self.loop1 }
    }

    pub fn loop0(&self) -> &[u32] {
        &self.mesh.boundary_loops()[self.loop0]
    }

    pub fn loop1(&self) -> &[u32] {
        &self.mesh.boundary_loops()[self.loop1]
    }

    pub fn area(&self) -> f64 {
        self.area
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Square annulus: outer square side 4, inner square side 2.
    fn frame() -> TriMesh {
        let v = vec![
            Vec3::new(-2.0, -2.0, 0.0),
            Vec3::new(2.0, -2.0, 0.0),
            Vec3::new(2.0, 2.0, 0.0),
            Vec3::new(-2.0, 2.0, 0.0),
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(-1.0, 1.0, 0.0),
        ];
        let mut t = Vec::new();
        for i in 0..4u32 {
            let j = (i + 1) % 4;
            t.push([i, j, 4 + i]);
            t.push([j, 4 + j, 4 + i]);
        }
        TriMesh::new(v, t).unwrap()
    }

    #[test]
    fn frame_has_two_loops_and_area() {
        let m = frame();
        assert_eq!(m.boundary_loops().len(), 2);
        assert_eq!(m.boundary_loops()[0], vec![0, 1, 2, 3]);
        assert_eq!(m.boundary_loops()[1], vec![4, 5, 6, 7]);
        assert_eq!(m.area(), 12.0);
        assert_eq!(m.boundary_loop_of_edge(1, 0), Some(0));
        assert_eq!(m.boundary_loop_of_edge(6, 5), Some(1));
        assert_eq!(m.boundary_loop_of_edge(0, 4), None);
        let a = AnnulusSurface::new(m).unwrap();
        assert_eq!(a.area(), 12.0);
        assert_eq!(a.relabeled(1).loop0(), &[4, 5, 6, 7]);
    }

    #[test]
    fn single_triangle_has_one_loop() {
        let m = TriMesh::new(vec![Vec3::ZERO, Vec3::X, Vec3::Y], vec![[0, 1, 2]]).unwrap();
        assert_eq!(m.boundary_loops().len(), 1);
        assert!(AnnulusSurface::new(m).is_err());
    }

    #[test]
    fn rejects_degenerate_and_nonmanifold() {
        assert!(TriMesh::new(vec![Vec3::ZERO, Vec3::X, Vec3::X * 2.0], vec![[0, 1, 2]]).is_err());
        assert!(TriMesh::new(vec![Vec3::ZERO, Vec3::X, Vec3::Y], vec![[0, 1, 3]]).is_err());
        let v = vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z, -Vec3::Y];
        assert!(TriMesh::new(v, vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]]).is_err());
    }
}
