use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::SmoothedCurve;
use crate::vec3::Vec3;

/// Flat disk in ℝ³ given by centre, unit normal and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Vec3,
    pub normal: Vec3,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Vec3, normal: Vec3, radius: f64) -> Result<Self> {
        let n = normal.try_normalize().ok_or_else(|| Error::InvalidArgument("disk normal must be non-zero".into()))?;
        if !(radius > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("bad disk: center {center:?}, radius {radius}")));
        }
        Ok(Disk { center, normal: n, radius })
    }

    /// Signed distance of `p` to the disk plane.
    pub fn plane_distance(&self, p: Vec3) -> f64 {
        (p - self.center).dot(self.normal)
    }

    /// Orthonormal basis `(e1, e2)` of the disk plane.
    pub fn basis(&self) -> (Vec3, Vec3) {
        self.normal.orthonormal_complement()
    }

    /// Point at in-plane polar coordinates `(ρ, θ)`.
    pub fn point(&self, rho: f64, theta: f64) -> Vec3 {
        let (e1, e2) = self.basis();
        self.center + (e1 * theta.cos() + e2 * theta.sin()) * rho
    }

    /// `p` lies within `tol` of the plane and within `radius + tol` of the centre.
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.plane_distance(p).abs() <= tol && (p - self.center).norm() <= self.radius + tol
    }
}

/// The unit normal disk `D_s` of the smoothed curve at parameter `s`.
pub fn disk_at(sc: &SmoothedCurve, s: f64) -> Result<Disk> {
    let d = sc.derivatives(s);
    let speed = d[1].norm();
    if speed < 0.5 {
        return Err(Error::DegenerateTangent { s, speed });
    }
    Ok(Disk { center: d[0], normal: d[1] / speed, radius: 1.0 })
}
