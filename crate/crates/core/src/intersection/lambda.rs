use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::slice::{EndpointClass, IntersectionCurve, MeshIndex};
use crate::error::{Error, Result};
use crate::foliation::{Disk, DiskAssignment};
use crate::geometry::mesh::AnnulusSurface;
use crate::numeric::fsum;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaConfig {
    pub n_samples: usize,
    /// Allowance for sampling error in the fraction test.
    pub slack: f64,
    /// Distance within which `x` must be an endpoint of its component.
    pub match_tol: f64,
    /// `C` in the co-area bound `∫ℋ¹ ≤ (1 + Cε)·Area`.
    pub c_fit: f64,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        LambdaConfig { n_samples: 64, slack: 0.01, match_tol: 1e-6, c_fit: 50.0 }
    }
}

/// Where `φ(x)` landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhiClass {
    OnGamma1,
    OnGamma0,
    Rim,
    Dangling,
    /// No component ends at `x`.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSample {
    pub t: f64,
    pub len: f64,
    pub transversal: bool,
    pub in_lambda: bool,
    pub phi: Option<Vec3>,
    pub phi_class: PhiClass,
    /// Disk construction failed at this sample.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub window: (f64, f64),
    pub eps: f64,
    pub samples: Vec<LambdaSample>,
    pub fraction: f64,
    /// `1 − 2ε − slack`
    pub threshold: f64,
    pub pass: bool,
}

impl LambdaEstimate {
    /// Width of the parameter stratum each sample stands for.
    pub fn spacing(&self) -> f64 {
        (self.window.1 - self.window.0) / self.samples.len() as f64
    }

    /// Samples in Λ whose far endpoint lies on Γ₁.
    pub fn phi_on_gamma1(&self) -> impl Iterator<Item = (f64, Vec3)> + '_ {
        self.samples
            .iter()
            .filter(|s| s.in_lambda && s.phi_class == PhiClass::OnGamma1)
            .map(|s| (s.t, s.phi.expect("classified sample has an image")))
    }

    pub fn count(&self, class: PhiClass) -> usize {
        self.samples.iter().filter(|s| s.in_lambda && s.phi_class == class).count()
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let w = window.1 - window.0;
    if !(1.0 - 1e-12..=2.0 + 1e-12).contains(&w) {
        return Err(Error::InvalidArgument(format!("window length {w} not in [1, 2]")));
    }
    Ok(())
}

fn classify_phi(sigma: &AnnulusSurface, class: EndpointClass) -> PhiClass {
    let labels = sigma.labels();
    match class {
        EndpointClass::Boundary(l) if l == labels.loop1 => PhiClass::OnGamma1,
        EndpointClass::Boundary(_) => PhiClass::OnGamma0,
        EndpointClass::Rim => PhiClass::Rim,
        EndpointClass::Dangling => PhiClass::Dangling,
    }
}

fn sample_at(
    asg: &DiskAssignment,
    sigma: &AnnulusSurface,
    index: &MeshIndex,
    t: f64,
    eps: f64,
    cfg: &LambdaConfig,
) -> LambdaSample {
    let x = asg.smoothed().source().eval_point(t).expect("closed curve");
    let Ok(disk) = asg.disk(t) else {
        return LambdaSample {
            t,
            len: f64::NAN,
            transversal: false,
            in_lambda: false,
            phi: None,
            phi_class: PhiClass::Missing,
            failed: true,
        };
    };
    let cut: IntersectionCurve = index.intersect(&disk);
    let in_lambda = cut.transversal && cut.total_length <= eps;
    let (phi, phi_class) = match cut.component_containing(x, cfg.match_tol) {
        Ok(far) => (Some(far.point), classify_phi(sigma, far.class)),
        Err(_) => (None, PhiClass::Missing),
    };
    LambdaSample { t, len: cut.total_length, transversal: cut.transversal, in_lambda, phi, phi_class, failed: false }
}

/// Stratified estimate of the share of `J` lying in Λ, the set of `x` whose
/// disk `Δ_x` meets Σ transversally in total length at most ε.
pub fn estimate_lambda(
    asg: &DiskAssignment,
    sigma: &AnnulusSurface,
    window: (f64, f64),
    eps: f64,
    n_samples: usize,
) -> Result<LambdaEstimate> {
    let index = MeshIndex::new(sigma.mesh());
    let cfg = LambdaConfig { n_samples, ..LambdaConfig::default() };
    estimate_lambda_with(asg, sigma, &index, window, eps, &cfg)
}

pub fn estimate_lambda_with(
    asg: &DiskAssignment,
    sigma: &AnnulusSurface,
    index: &MeshIndex,
    window: (f64, f64),
    eps: f64,
    cfg: &LambdaConfig,
) -> Result<LambdaEstimate> {
    check_window(window)?;
    let n = cfg.n_samples.max(1);
    let w = window.1 - window.0;
    let samples: Vec<LambdaSample> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = window.0 + (k as f64 + 0.5) * w / n as f64;
            sample_at(asg, sigma, index, t, eps, cfg)
        })
        .collect();
    let fraction = samples.iter().filter(|s| s.in_lambda).count() as f64 / n as f64;
    let threshold = 1.0 - 2.0 * eps - cfg.slack;
    Ok(LambdaEstimate { window, eps, samples, fraction, threshold, pass: fraction >= threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoareaAudit {
    pub window: (f64, f64),
    /// Midpoint-rule estimate of `∫_J ℋ¹(Δ_{γ₀(t)} ∩ Σ) dt`.
    pub integral_est: f64,
    /// Area of the part of Σ between the end disks of `J`.
    pub area: f64,
    pub total_area: f64,
    /// `integral_est / area` (1 when both vanish).
    pub ratio: f64,
    pub pass: bool,
}

/// Sutherland–Hodgman clip of a convex polygon to `⟨p − c, n⟩ ≥ 0`.
fn clip_half_space(poly: &[Vec3], c: Vec3, n: Vec3) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (dp, dq) = ((p - c).dot(n), (q - c).dot(n));
        if dp >= 0.0 {
            out.push(p);
        }
        if (dp >= 0.0) != (dq >= 0.0) {
            out.push(p + (q - p) * (dp / (dp - dq)));
        }
    }
    out
}

fn polygon_area(poly: &[Vec3]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = Vec3::ZERO;
    for i in 1..poly.len() - 1 {
        acc += (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    }
    0.5 * acc.norm()
}

/// Area of Σ between the planes of the disks at the two ends of `J`,
/// restricted to triangles near any sampled disk.
fn swath_area(asg: &DiskAssignment, index: &MeshIndex, est: &LambdaEstimate) -> Result<f64> {
    let d_lo = asg.disk(est.window.0)?;
    let d_hi = asg.disk(est.window.1)?;
    let mut tris: Vec<u32> = Vec::new();
    for s in &est.samples {
        if let Ok(d) = asg.disk(s.t) {
            tris.extend(index.candidates(&Disk { radius: d.radius + 1.0, ..d }));
        }
    }
    tris.sort_unstable();
    tris.dedup();
    let mesh = index.mesh();
    Ok(fsum(tris.iter().map(|&t| {
        let poly = mesh.triangle_points(t as usize).to_vec();
        let poly = clip_half_space(&poly, d_lo.center, d_lo.normal);
        let poly = clip_half_space(&poly, d_hi.center, -d_hi.normal);
        polygon_area(&poly)
    })))
}

/// Co-area audit on one window, reusing the intersection lengths of `est`.
pub fn coarea_from_estimate(
    asg: &DiskAssignment,
    sigma: &AnnulusSurface,
    index: &MeshIndex,
    est: &LambdaEstimate,
    c_fit: f64,
) -> Result<CoareaAudit> {
    let h = est.spacing();
    let integral_est = fsum(est.samples.iter().map(|s| if s.failed { 0.0 } else { s.len * h }));
    let area = swath_area(asg, index, est)?;
    let ratio = if area > 0.0 {
        integral_est / area
    } else if integral_est == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(CoareaAudit {
        window: est.window,
        integral_est,
        area,
        total_area: sigma.area(),
        ratio,
        pass: integral_est <= (1.0 + c_fit * est.eps) * area,
    })
}

pub fn coarea_audit(
    asg: &DiskAssignment,
    sigma: &AnnulusSurface,
    window: (f64, f64),
    eps: f64,
    n_samples: usize,
) -> Result<CoareaAudit> {
    let index = MeshIndex::new(sigma.mesh());
    let cfg = LambdaConfig { n_samples, ..LambdaConfig::default() };
    let est = estimate_lambda_with(asg, sigma, &index, window, eps, &cfg)?;
    coarea_from_estimate(asg, sigma, &index, &est, cfg.c_fit)
}
