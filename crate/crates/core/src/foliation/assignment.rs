use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::FoliationChart;
use super::disk::{disk_at, Disk};
use crate::error::{Error, Result};
use crate::smoothing::SmoothedCurve;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentConfig {
    /// Upper bound on the t-grid spacing.
    pub max_spacing: f64,
    /// Grid spacing as a fraction of L when that is finer.
    pub rel_spacing: f64,
    /// Tolerance on `|Φ(t, h(t))|`.
    pub phi_tol: f64,
    pub max_iters: usize,
}

impl Default for AssignmentConfig {
    fn default() -> Self {
        AssignmentConfig { max_spacing: 1e-2, rel_spacing: 1e-4, phi_tol: 1e-10, max_iters: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentStats {
    pub grid_points: usize,
    pub spacing: f64,
    /// `sup |h(t) − t|` on the grid.
    pub max_offset: f64,
    pub monotone: bool,
    /// Range of `∂Φ/∂s` at `(t, h(t))`.
    pub dphi_min: f64,
    pub dphi_max: f64,
    /// Range of the grid difference quotients of `h`.
    pub hprime_min: f64,
    pub hprime_max: f64,
}

impl AssignmentStats {
    /// Smallest `C` with both ranges inside `[1 − Cε, 1 + Cε]`.
    pub fn c_fit(&self, eps: f64) -> f64 {
        let lo = self.dphi_min.min(self.hprime_min);
        let hi = self.dphi_max.max(self.hprime_max);
        (1.0 - lo).max(hi - 1.0).max(0.0) / eps
    }
}

/// `Φ(t, s) = ⟨γ̃(s) − γ₀(t), γ̃′(s)⟩` and `∂Φ/∂s`.
pub fn phi(sc: &SmoothedCurve, t: f64, s: f64) -> (f64, f64) {
    let x = sc.source().eval_point(t).expect("closed curve");
    let d = sc.derivatives(s);
    let diff = d[0] - x;
    (diff.dot(d[1]), d[1].norm_squared() + diff.dot(d[2]))
}

/// Solves `Φ(t, s) = 0` for `s` by Newton from `seed`; returns `(s, ∂Φ/∂s)`.
pub fn solve_h(sc: &SmoothedCurve, t: f64, seed: f64, tol: f64, max_iters: usize) -> Result<(f64, f64)> {
    let mut s = seed;
    for _ in 0..=max_iters {
        let (f, df) = phi(sc, t, s);
        if f.abs() <= tol {
            return Ok((s, df));
        }
        if !(df > 0.0) {
            return Err(Error::Assignment { t, reason: format!("∂Φ/∂s = {df} is not positive") });
        }
        s -= f / df;
    }
    Err(Error::Assignment { t, reason: format!("no convergence within {max_iters} iterations") })
}

/// The map `h` (with `Φ(t, h(t)) = 0`) tabulated on a uniform grid and
/// interpolated by monotone cubic Hermite splines. The disk assigned to
/// `x = γ₀(t)` is `Δ_x = D_{h(t)}`.
#[derive(Debug, Clone)]
pub struct DiskAssignment<'a> {
    sc: &'a SmoothedCurve,
    config: AssignmentConfig,
    step: f64,
    /// `h` at `t = j·step`, `j = 0..=n`, with `h[n] = h[0] + L`.
    h: Vec<f64>,
    slopes: Vec<f64>,
    stats: AssignmentStats,
}

pub fn assign_disks(sc: &SmoothedCurve) -> Result<DiskAssignment<'_>> {
    assign_disks_with(sc, &AssignmentConfig::default())
}

pub fn assign_disks_with<'a>(sc: &'a SmoothedCurve, config: &AssignmentConfig) -> Result<DiskAssignment<'a>> {
    let l = sc.length();
    let spacing = config.max_spacing.min(l * config.rel_spacing);
    let n = (l / spacing).ceil() as usize;
    let step = l / n as f64;
    let solved: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * step;
            solve_h(sc, t, t, config.phi_tol, config.max_iters)
        })
        .collect::<Result<_>>()?;

    let mut h: Vec<f64> = solved.iter().map(|r| r.0).collect();
    h.push(h[0] + l);
    let mut stats = AssignmentStats {
        grid_points: n,
        spacing: step,
        max_offset: 0.0,
        monotone: true,
        dphi_min: f64::INFINITY,
        dphi_max: f64::NEG_INFINITY,
        hprime_min: f64::INFINITY,
        hprime_max: f64::NEG_INFINITY,
    };
    for (j, &(s, dphi)) in solved.iter().enumerate() {
        let t = j as f64 * step;
        stats.max_offset = stats.max_offset.max((s - t).abs());
        stats.dphi_min = stats.dphi_min.min(dphi);
        stats.dphi_max = stats.dphi_max.max(dphi);
    }
    let deltas: Vec<f64> = h.windows(2).map(|w| (w[1] - w[0]) / step).collect();
    for &d in &deltas {
        stats.monotone &= d > 0.0;
        stats.hprime_min = stats.hprime_min.min(d);
        stats.hprime_max = stats.hprime_max.max(d);
    }
    if stats.max_offset > 1.0 || !stats.monotone {
        return Err(Error::Assignment {
            t: 0.0,
            reason: format!("h is not a monotone unit-offset map (sup |h − t| = {})", stats.max_offset),
        });
    }
    // Fritsch–Butland slopes (harmonic mean), periodic at the ends
    let m = deltas.len();
    let mut slopes = vec![0.0; m + 1];
    for j in 0..=m {
        let a = deltas[(j + m - 1) % m];
        let b = deltas[j % m];
        slopes[j] = if a * b > 0.0 { 2.0 * a * b / (a + b) } else { 0.0 };
    }
    Ok(DiskAssignment { sc, config: *config, step, h, slopes, stats })
}

impl<'a> DiskAssignment<'a> {
    pub fn smoothed(&self) -> &'a SmoothedCurve {
        self.sc
    }

    pub fn stats(&self) -> &AssignmentStats {
        &self.stats
    }

    pub fn grid_spacing(&self) -> f64 {
        self.step
    }

    /// Interpolated `h(t)`, extended by `h(t + L) = h(t) + L`.
    pub fn h(&self, t: f64) -> f64 {
        let l = self.sc.length();
        let tw = t.rem_euclid(l);
        let shift = t - tw;
        let n = self.h.len() - 1;
        let j = ((tw / self.step).floor() as usize).min(n - 1);
        let u = tw / self.step - j as f64;
        let (y0, y1) = (self.h[j], self.h[j + 1]);
        let (m0, m1) = (self.slopes[j] * self.step, self.slopes[j + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let v =
            (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * m1;
        v + shift
    }

    /// `h(t)` re-solved to the Φ tolerance from the interpolated seed.
    pub fn h_exact(&self, t: f64) -> Result<f64> {
        solve_h(self.sc, t, self.h(t), self.config.phi_tol, self.config.max_iters).map(|r| r.0)
    }

    /// `Δ_x` for `x = γ₀(t)`.
    pub fn disk(&self, t: f64) -> Result<Disk> {
        disk_at(self.sc, self.h_exact(t)?)
    }

    /// `h⁻¹(s)`: the `t` with `γ₀(t)` in the normal plane of γ̃ at `s`.
    pub fn h_inverse(&self, s: f64) -> Result<f64> {
        let src = self.sc.source();
        let d = self.sc.derivatives(s);
        let mut t = s;
        for _ in 0..=self.config.max_iters {
            let (seg, _) = src.locate(src.wrap(t));
            let f = (src.eval_point(t)? - d[0]).dot(d[1]);
            if f.abs() <= self.config.phi_tol {
                return Ok(t);
            }
            let df = src.segment_direction(seg).dot(d[1]);
            if !(df > 0.0) {
                break;
            }
            t -= f / df;
        }
        Err(Error::Assignment { t: s, reason: "inverse of h did not converge".into() })
    }
}

/// Canonical projection `u(x) = h⁻¹(v_J(x))`: the curve parameter `t` with
/// `x ∈ Δ_{γ₀(t)}`.
pub fn canonical_u(chart: &FoliationChart, asg: &DiskAssignment, x: Vec3) -> Result<f64> {
    let c = chart.inverse(x).map_err(|_| Error::OutOfChart)?;
    if !chart.in_cylinder(c) {
        return Err(Error::OutOfChart);
    }
    asg.h_inverse(c.s)
}

/// Central-difference gradient of [`canonical_u`].
pub fn canonical_u_gradient(chart: &FoliationChart, asg: &DiskAssignment, x: Vec3, step: f64) -> Result<Vec3> {
    let mut g = [0.0; 3];
    for (k, e) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
        let plus = canonical_u(chart, asg, x + e * step)?;
        let minus = canonical_u(chart, asg, x - e * step)?;
        g[k] = (plus - minus) / (2.0 * step);
    }
    Ok(Vec3::new(g[0], g[1], g[2]))
}
