//! Instances of the length-comparison problem and their generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::embedding::{curve_self_distance, find_self_intersection};
use crate::error::{Error, Result};
use crate::geometry::mesh::{AnnulusSurface, TriMesh};
use crate::geometry::DiscreteCurve;
use crate::vec3::Vec3;

/// Geometry in which lengths and areas are measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Euclidean,
    /// A named chart metric such as `sphere:1000`.
    Riemannian(String),
}

impl Backend {
    pub fn parse(id: &str) -> Backend {
        if id == "euclidean" {
            Backend::Euclidean
        } else {
            Backend::Riemannian(id.to_string())
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Backend::Euclidean => "euclidean",
            Backend::Riemannian(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    /// Generator parameters in a fixed order.
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub curve0: DiscreteCurve,
    pub curve1: DiscreteCurve,
    pub sigma: AnnulusSurface,
    pub eps: f64,
    pub backend: Backend,
    pub provenance: Provenance,
}

/// Ruled strip between two closed point lists of equal length `n`:
/// triangles `(i, i+1, n+i)` and `(i+1, n+i+1, n+i)`.
pub fn ruled_annulus(p0: &[Vec3], p1: &[Vec3]) -> Result<AnnulusSurface> {
    let n = p0.len();
    if n != p1.len() || n < 3 {
        return Err(Error::InvalidArgument("ruled annulus needs two point lists of equal length ≥ 3".into()));
    }
    let mut verts = p0.to_vec();
    verts.extend_from_slice(p1);
    let n32 = n as u32;
    let mut tris = Vec::with_capacity(2 * n);
    for i in 0..n32 {
        let j = (i + 1) % n32;
        tris.push([i, j, n32 + i]);
        tris.push([j, n32 + j, n32 + i]);
    }
    let mesh = TriMesh::new(verts, tris)?;
    // loop 0 is the one containing vertex 0
    let loop0 = if mesh.boundary_loops().first().is_some_and(|l| l.contains(&0)) { 0 } else { 1 };
    AnnulusSurface::with_labels(mesh, loop0)
}

fn start_phase(seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.gen_range(0.0..2.0 * PI / n as f64)
}

fn angles(n: usize, phase: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| phase + 2.0 * PI * i as f64 / n as f64)
}

fn assemble(p0: Vec<Vec3>, p1: Vec<Vec3>, eps: f64, provenance: Provenance) -> Result<Instance> {
    let curve0 = DiscreteCurve::new(p0.clone(), true)?;
    let curve1 = DiscreteCurve::new(p1.clone(), true)?;
    let sigma = ruled_annulus(&p0, &p1)?;
    if sigma.area() > eps * eps {
        return Err(Error::Rejected(format!("area {:e} exceeds the budget eps² = {:e}", sigma.area(), eps * eps)));
    }
    if curve_self_distance(&curve1) <= 0.0 {
        return Err(Error::Rejected("curve 1 is not embedded".into()));
    }
    if let Some((a, b)) = find_self_intersection(sigma.mesh()) {
        return Err(Error::Rejected(format!("surface triangles {a} and {b} intersect")));
    }
    Ok(Instance { curve0, curve1, sigma, eps, backend: Backend::Euclidean, provenance })
}

fn check_common(r: f64, delta: f64, n: usize, eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Rejected(format!("eps must be positive, got {eps}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Rejected(format!("delta must be positive, got {delta}")));
    }
    if r < 100.0 / (2.0 * PI) {
        return Err(Error::Rejected(format!("R = {r} gives a curve shorter than 100")));
    }
    if n < 8 {
        return Err(Error::Rejected(format!("need at least 8 spokes, got {n}")));
    }
    Ok(())
}

/// Concentric circles of radii `R` and `R + δ` in the `xy`-plane, joined by
/// a flat strip with `n` spokes. The seed picks the angle of the first spoke.
pub fn gen_offset_annulus(r: f64, delta: f64, n: usize, eps: f64, seed: u64) -> Result<Instance> {
    gen_wiggly(r, delta, 0.0, 0.0, n, eps, seed).map(|mut inst| {
        inst.provenance = Provenance {
            generator: "offset".into(),
            seed,
            params: vec![("R".into(), r), ("delta".into(), delta), ("n".into(), n as f64), ("eps".into(), eps)],
        };
        inst
    })
}

/// Offset annulus whose outer curve also oscillates out of the plane by
/// `amp·sin(freq·θ + phase)`; the phase comes from the seed.
pub fn gen_wiggly(r: f64, delta: f64, amp: f64, freq: f64, n: usize, eps: f64, seed: u64) -> Result<Instance> {
    check_common(r, delta, n, eps)?;
    if 2.0 * PI * r * delta > eps * eps {
        return Err(Error::Rejected(format!("strip area 2πRδ = {:e} exceeds eps²", 2.0 * PI * r * delta)));
    }
    let phase0 = start_phase(seed, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let wphase = if amp != 0.0 { rng.gen_range(0.0..2.0 * PI) } else { 0.0 };
    let p0: Vec<Vec3> = angles(n, phase0).map(|a| Vec3::new(r * a.cos(), r * a.sin(), 0.0)).collect();
    let r1 = r + delta;
    let p1: Vec<Vec3> =
        angles(n, phase0).map(|a| Vec3::new(r1 * a.cos(), r1 * a.sin(), amp * (freq * a + wphase).sin())).collect();
    let provenance = Provenance {
        generator: "wiggly".into(),
        seed,
        params: vec![
            ("R".into(), r),
            ("delta".into(), delta),
            ("amp".into(), amp),
            ("freq".into(), freq),
            ("n".into(), n as f64),
            ("eps".into(), eps),
        ],
    };
    assemble(p0, p1, eps, provenance)
}

/// Smooth compactly supported bump on `(−1, 1)` with peak 1 at 0.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// `∫ bump(u) du` over `(−1, 1)`.
pub const BUMP_INTEGRAL: f64 = 1.206_900_322_437_876_2;

/// Circle of radius `R` carrying an outward planar bump of the given
/// half-width (arc length) and height, with the inner circle of radius
/// `R − δ` cutting it short. The seed places the bump.
pub fn gen_bump(r: f64, delta: f64, half_width: f64, height: f64, n: usize, eps: f64, seed: u64) -> Result<Instance> {
    check_common(r, delta, n, eps)?;
    if !(height >= 0.0) || !(half_width > 0.0) {
        return Err(Error::Rejected("bump height must be ≥ 0 and width > 0".into()));
    }
    let phase0 = start_phase(seed, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let centre = rng.gen_range(0.0..2.0 * PI);
    let arc = |a: f64| {
        let d = (a - centre + PI).rem_euclid(2.0 * PI) - PI;
        d * r / half_width
    };
    let p0: Vec<Vec3> = angles(n, phase0)
        .map(|a| {
            let rr = r + height * bump(arc(a));
            Vec3::new(rr * a.cos(), rr * a.sin(), 0.0)
        })
        .collect();
    let r1 = r - delta;
    let p1: Vec<Vec3> = angles(n, phase0).map(|a| Vec3::new(r1 * a.cos(), r1 * a.sin(), 0.0)).collect();
    let provenance = Provenance {
        generator: "bump".into(),
        seed,
        params: vec![
            ("R".into(), r),
            ("delta".into(), delta),
            ("half_width".into(), half_width),
            ("height".into(), height),
            ("n".into(), n as f64),
            ("eps".into(), eps),
        ],
    };
    assemble(p0, p1, eps, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_integral_constant() {
        let n = 200_000;
        let h = 2.0 / n as f64;
        let s: f64 = (0..n).map(|i| bump(-1.0 + (i as f64 + 0.5) * h) * h).sum();
        assert!((s - BUMP_INTEGRAL).abs() < 1e-9, "{s}");
    }

    #[test]
    fn offset_annulus_area_and_ratio() {
        let inst = gen_offset_annulus(50.0, 1e-9, 2000, 1e-3, 7).unwrap();
        let area = inst.sigma.area();
        let expect = 2.0 * PI * 50.0 * 1e-9;
        assert!((area - expect).abs() / expect < 1e-5, "{area}");
        assert!(inst.curve1.length() / inst.curve0.length() > 1.0);
        assert_eq!(inst.sigma.loop0()[0], 0);
    }

    #[test]
    fn generator_guards() {
        assert!(matches!(gen_offset_annulus(50.0, 0.0, 2000, 1e-3, 1), Err(Error::Rejected(_))));
        assert!(matches!(gen_offset_annulus(5.0, 1e-9, 2000, 1e-3, 1), Err(Error::Rejected(_))));
        assert!(matches!(gen_wiggly(50.0, 1e-9, 1e-3, 7.0, 2000, 1e-3, 1), Err(Error::Rejected(_))));
    }

    #[test]
    fn wiggle_only_adds_length() {
        let flat = gen_offset_annulus(50.0, 1e-9, 2000, 1e-3, 3).unwrap();
        let wig = gen_wiggly(50.0, 1e-9, 2e-9, 11.0, 2000, 1e-3, 3).unwrap();
        assert!(wig.curve1.length() >= flat.curve1.length());
        let same = gen_wiggly(50.0, 1e-9, 0.0, 11.0, 2000, 1e-3, 3).unwrap();
        assert_eq!(same.curve1.points(), flat.curve1.points());
        assert_eq!(same.sigma.mesh().vertices(), flat.sigma.mesh().vertices());
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_wiggly(50.0, 1e-9, 2e-9, 5.0, 1000, 1e-3, 99).unwrap();
        let b = gen_wiggly(50.0, 1e-9, 2e-9, 5.0, 1000, 1e-3, 99).unwrap();
        assert_eq!(a.curve1.points(), b.curve1.points());
        let c = gen_wiggly(50.0, 1e-9, 2e-9, 5.0, 1000, 1e-3, 100).unwrap();
        assert_ne!(a.curve1.points(), c.curve1.points());
    }

    #[test]
    fn bump_shortcut_is_shorter() {
        let inst = gen_bump(50.0, 1e-9, 2.0, 1e-7, 4000, 1e-3, 5).unwrap();
        assert!(inst.curve1.length() < inst.curve0.length());
    }
}
