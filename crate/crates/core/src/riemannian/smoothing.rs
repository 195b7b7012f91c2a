//! Cutoff smoothing with geodesic chords, the tangent estimate for
//! `ξ(s) = exp⁻¹_{γ₀(s₀)} γ₀(s)`, and metric rescaling.

use rayon::prelude::*;
use serde::Serialize;

use super::curve::MetricCurve;
use super::geodesic::{exp_point, log_map};
use super::metric::ManifoldChart;
use crate::error::{Error, Result};
use crate::smoothing::{blend_weight, CutoffFunction};
use crate::vec3::Vec3;

/// The curve obtained by blending the geodesic chords between `k` equally
/// spaced nodes: on piece `i`, with `r = ks/L − (i + 1/2)`,
///
/// `γ̃(s) = exp_{N_i}( r·χ(r)·A_i − r·(1 − χ(r))·B_i )`
///
/// where `A_i = exp⁻¹_{N_i} N_{i+1}` and `B_i = exp⁻¹_{N_i} N_{i−1}`.
#[derive(Debug, Clone)]
pub struct RiemannianSmoothedCurve {
    chart: ManifoldChart,
    chi: CutoffFunction,
    k: usize,
    length: f64,
    nodes: Vec<Vec3>,
    to_next: Vec<Vec3>,
    to_prev: Vec<Vec3>,
}

/// Builds the geodesic smoothing with `k = ceil(L)` pieces, `L` the
/// `g`-length of the closed curve.
pub fn smooth_riemannian(
    chart: &ManifoldChart,
    curve: &MetricCurve,
    chi: CutoffFunction,
) -> Result<RiemannianSmoothedCurve> {
    if !curve.is_closed() {
        return Err(Error::InvalidCurve("smoothing requires a closed curve".into()));
    }
    let length = curve.length();
    if length < 1.0 {
        return Err(Error::InvalidCurve(format!("smoothing requires L >= 1, got {length}")));
    }
    let k = length.ceil() as usize;
    if k < 3 {
        return Err(Error::InvalidArgument(format!("piece count {k} is below 3")));
    }
    let h = length / k as f64;
    if h >= chart.injectivity_floor() {
        return Err(Error::InvalidArgument("node spacing exceeds the injectivity floor".into()));
    }
    let nodes: Vec<Vec3> = (0..k).map(|i| curve.eval((i as f64 + 0.5) * h)).collect::<Result<_>>()?;
    let logs: Vec<(Vec3, Vec3)> = (0..k)
        .into_par_iter()
        .map(|i| {
            let n = nodes[i];
            Ok((log_map(chart, n, nodes[(i + 1) % k])?, log_map(chart, n, nodes[(i + k - 1) % k])?))
        })
        .collect::<Result<_>>()?;
    let (to_next, to_prev) = logs.into_iter().unzip();
    Ok(RiemannianSmoothedCurve { chart: *chart, chi, k, length, nodes, to_next, to_prev })
}

impl RiemannianSmoothedCurve {
    pub fn chart(&self) -> &ManifoldChart {
        &self.chart
    }

    pub fn pieces(&self) -> usize {
        self.k
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.k as f64
    }

    pub fn node(&self, i: usize) -> Vec3 {
        self.nodes[i % self.k]
    }

    /// `exp⁻¹_{N_i} N_{i+1}` and `exp⁻¹_{N_i} N_{i−1}`.
    pub fn node_logs(&self, i: usize) -> (Vec3, Vec3) {
        (self.to_next[i % self.k], self.to_prev[i % self.k])
    }

    pub fn locate(&self, s: f64) -> (usize, f64) {
        let x = s.rem_euclid(self.length) / self.spacing();
        let i = (x.floor() as usize).min(self.k - 1);
        (i, x - i as f64 - 0.5)
    }

    /// Tangent vector at `N_i` whose exponential is the point of piece `i`
    /// at local coordinate `r`.
    pub fn xi_piece(&self, i: usize, r: f64) -> Vec3 {
        let g = blend_weight(&self.chi, r)[0];
        let (a, b) = self.node_logs(i);
        a * g + b * (g - r)
    }

    pub fn eval_piece(&self, i: usize, r: f64) -> Result<Vec3> {
        exp_point(&self.chart, self.node(i), self.xi_piece(i, r))
    }

    pub fn eval(&self, s: f64) -> Result<Vec3> {
        let (i, r) = self.locate(s);
        self.eval_piece(i, r)
    }

    /// Central difference of the coordinate position in `s`.
    pub fn derivative(&self, s: f64, step: f64) -> Result<Vec3> {
        Ok((self.eval(s + step)? - self.eval(s - step)?) / (2.0 * step))
    }

    /// Largest coordinate gaps between adjacent pieces at their common end:
    /// positions, and central difference quotients (with parameter step
    /// `step`) of the two piece formulas.
    pub fn joint_gaps(&self, step: f64) -> Result<(f64, f64)> {
        let dr = step / self.spacing();
        let gaps = (0..self.k)
            .into_par_iter()
            .map(|i| {
                let j = (i + 1) % self.k;
                let gap = (self.eval_piece(i, 0.5)? - self.eval_piece(j, -0.5)?).norm();
                let di = self.eval_piece(i, 0.5 + dr)? - self.eval_piece(i, 0.5 - dr)?;
                let dj = self.eval_piece(j, -0.5 + dr)? - self.eval_piece(j, -0.5 - dr)?;
                Ok((gap, (di - dj).norm() / (2.0 * step)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(gaps.into_iter().fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA1Config {
    /// Half-width of the parameter window around `s₀`, clipped to
    /// `L/2 − 1` on closed curves.
    pub window: f64,
    pub samples_per_unit: f64,
    /// `ok` iff `M_sup ≤ c_fit·ε`; `None` uses `2·(window + 1)`.
    pub c_fit: Option<f64>,
}

impl Default for LemmaA1Config {
    fn default() -> Self {
        LemmaA1Config { window: 100.0, samples_per_unit: 4.0, c_fit: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA1Certificate {
    pub s0: f64,
    pub window: f64,
    pub eps: f64,
    /// `sup |ξ′(s) − γ₀′(s₀)|_g` over the window.
    pub m_sup: f64,
    /// `sup |ξ(s) − (s − s₀)γ₀′(s₀)|_g` over the window.
    pub xi_dev: f64,
    pub samples: usize,
    pub c_fit: f64,
    pub ok: bool,
}

impl LemmaA1Certificate {
    pub fn ratio(&self) -> f64 {
        self.m_sup / self.eps
    }
}

pub fn lemma_a1_certificate(
    chart: &ManifoldChart,
    curve: &MetricCurve,
    s0: f64,
    eps: f64,
) -> Result<LemmaA1Certificate> {
    lemma_a1_certificate_with(chart, curve, s0, eps, &LemmaA1Config::default())
}

/// Samples `ξ(s) = exp⁻¹_{γ₀(s₀)} γ₀(s)` on a uniform grid and measures
/// `ξ′` by central differences. All vectors live in the tangent space at
/// `γ₀(s₀)`, so they are compared there directly; `γ₀′(s₀)` is taken as the
/// central difference of `ξ` at `s₀`, which agrees with it to second order.
pub fn lemma_a1_certificate_with(
    chart: &ManifoldChart,
    curve: &MetricCurve,
    s0: f64,
    eps: f64,
    cfg: &LemmaA1Config,
) -> Result<LemmaA1Certificate> {
    if !(eps > 0.0) || !(cfg.window > 0.0) || !(cfg.samples_per_unit > 0.0) {
        return Err(Error::InvalidArgument("eps, window and sampling density must be positive".into()));
    }
    let l = curve.length();
    let (lo, hi) = if curve.is_closed() {
        let w = cfg.window.min(l / 2.0 - 1.0);
        (s0 - w, s0 + w)
    } else {
        ((s0 - cfg.window).max(0.0), (s0 + cfg.window).min(l))
    };
    let ds = 1.0 / cfg.samples_per_unit;
    let n_lo = ((s0 - lo) / ds).floor() as i64;
    let n_hi = ((hi - s0) / ds).floor() as i64;
    if n_lo < 1 || n_hi < 1 {
        return Err(Error::InvalidArgument("window too short around s0".into()));
    }
    let p = curve.eval(s0)?;
    let xi: Vec<Vec3> = (-n_lo..=n_hi)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return Ok(Vec3::ZERO);
            }
            log_map(chart, p, curve.eval(s0 + j as f64 * ds)?)
        })
        .collect::<Result<_>>()?;
    let c = n_lo as usize;
    let t0 = (xi[c + 1] - xi[c - 1]) / (2.0 * ds);
    let mut m_sup: f64 = 0.0;
    for j in 1..xi.len() - 1 {
        let d = (xi[j + 1] - xi[j - 1]) / (2.0 * ds);
        m_sup = m_sup.max(chart.norm(p, d - t0));
    }
    let mut xi_dev: f64 = 0.0;
    for (j, x) in xi.iter().enumerate() {
        let s = (j as f64 - c as f64) * ds;
        xi_dev = xi_dev.max(chart.norm(p, *x - t0 * s));
    }
    let window = (hi - s0).max(s0 - lo);
    let c_fit = cfg.c_fit.unwrap_or(2.0 * (cfg.window + 1.0));
    Ok(LemmaA1Certificate { s0, window, eps, m_sup, xi_dev, samples: xi.len(), c_fit, ok: m_sup <= c_fit * eps })
}

/// The chart with metric `(1000·K/r²)·g`.
pub fn rescale_metric(chart: &ManifoldChart, k: f64, r: f64) -> Result<ManifoldChart> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("curvature bound must be positive, got {k}")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("window r must lie in (0, 1], got {r}")));
    }
    Ok(chart.rescaled(rescale_factor(k, r)))
}

pub fn rescale_factor(k: f64, r: f64) -> f64 {
    1000.0 * k / (r * r)
}
