use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::SmoothedCurve;
use crate::vec3::{Mat3, Vec3};

/// Longest admissible interval for one chart (strict bound).
pub const MAX_INTERVAL: f64 = 20.0;

/// Half-length in `s` of the chart cylinder.
pub const CYLINDER_HALF_LENGTH: f64 = 50.0;

/// Bound on `t₁² + t₂²` inside the chart cylinder.
pub const CYLINDER_RADIUS_SQ: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartConfig {
    /// Probes per axis of the `(s, t₁, t₂)` grid.
    pub probes_per_axis: usize,
    pub max_newton_iters: usize,
    /// Largest `|Ψ(Ψ⁻¹(x)) − x|` accepted at a probe.
    pub roundtrip_tol: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig { probes_per_axis: 20, max_newton_iters: 50, roundtrip_tol: 1e-8 }
    }
}

/// Chart coordinates `(s, t₁, t₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartCoords {
    pub s: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Extremes measured over the probe grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub probes: usize,
    /// `max |Ψ(Ψ⁻¹(x)) − x|`
    pub max_roundtrip: f64,
    /// `max |v_J(Ψ(s,t)) − s|`
    pub max_leaf_error: f64,
    pub grad_min: f64,
    pub grad_max: f64,
    pub max_newton_iters: usize,
}

impl GridReport {
    /// Smallest `C` with `1 − Cε ≤ |Dv_J| ≤ 1 + Cε` on the grid.
    pub fn c_fit(&self, eps: f64) -> f64 {
        (1.0 - self.grad_min).max(self.grad_max - 1.0).max(0.0) / eps
    }
}

/// Normal-disk chart `Ψ(s, t₁, t₂) = γ̃(s) + Σ tᵢ(|γ̃′|² eᵢ − ⟨γ̃′, eᵢ⟩ γ̃′)`
/// around a sub-interval `J` of the smoothed curve. Level sets of the `s`
/// coordinate are the normal planes of γ̃.
#[derive(Debug, Clone)]
pub struct FoliationChart<'a> {
    sc: &'a SmoothedCurve,
    interval: (f64, f64),
    frame: [Vec3; 3],
    config: ChartConfig,
    report: GridReport,
}

pub fn build_chart(sc: &SmoothedCurve, interval: (f64, f64)) -> Result<FoliationChart<'_>> {
    build_chart_with(sc, interval, &ChartConfig::default())
}

/// Builds the chart and certifies it on the probe grid.
pub fn build_chart_with<'a>(
    sc: &'a SmoothedCurve,
    interval: (f64, f64),
    config: &ChartConfig,
) -> Result<FoliationChart<'a>> {
    let (lo, hi) = interval;
    if !(hi > lo) || hi - lo >= MAX_INTERVAL {
        return Err(Error::InvalidArgument(format!("chart interval [{lo}, {hi}] must have length in (0, 20)")));
    }
    let mid = 0.5 * (lo + hi);
    let e3 = sc.derivative(mid).normalize();
    let (e1, e2) = e3.orthonormal_complement();
    let mut chart = FoliationChart {
        sc,
        interval,
        frame: [e1, e2, e3],
        config: *config,
        report: GridReport {
            probes: 0,
            max_roundtrip: 0.0,
            max_leaf_error: 0.0,
            grad_min: f64::INFINITY,
            grad_max: 0.0,
            max_newton_iters: 0,
        },
    };
    chart.report = chart.probe_grid()?;
    Ok(chart)
}

impl<'a> FoliationChart<'a> {
    pub fn smoothed(&self) -> &'a SmoothedCurve {
        self.sc
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.interval.0 + self.interval.1)
    }

    /// `[e₁, e₂, e₃]` with `e₃` the unit tangent at the middle of `J`.
    pub fn frame(&self) -> [Vec3; 3] {
        self.frame
    }

    pub fn report(&self) -> &GridReport {
        &self.report
    }

    pub fn in_cylinder(&self, c: ChartCoords) -> bool {
        (c.s - self.mid()).abs() < CYLINDER_HALF_LENGTH && c.t1 * c.t1 + c.t2 * c.t2 < CYLINDER_RADIUS_SQ
    }

    fn psi_and_jacobian(&self, c: ChartCoords) -> (Vec3, Mat3) {
        let d = self.sc.derivatives(c.s);
        let (g, g1, g2) = (d[0], d[1], d[2]);
        let speed2 = g1.norm_squared();
        let mut x = g;
        let mut ds = g1;
        let mut dt = [Vec3::ZERO; 2];
        for (i, &t) in [c.t1, c.t2].iter().enumerate() {
            let e = self.frame[i];
            let ge = g1.dot(e);
            let dir = e * speed2 - g1 * ge;
            x += dir * t;
            dt[i] = dir;
            ds += (e * (2.0 * g1.dot(g2)) - g1 * g2.dot(e) - g2 * ge) * t;
        }
        (x, Mat3::from_cols(ds, dt[0], dt[1]))
    }

    pub fn psi(&self, c: ChartCoords) -> Vec3 {
        self.psi_and_jacobian(c).0
    }

    /// `DΨ` with columns `∂/∂s, ∂/∂t₁, ∂/∂t₂`.
    pub fn jacobian(&self, c: ChartCoords) -> Mat3 {
        self.psi_and_jacobian(c).1
    }

    /// Straight-line approximation of the inverse.
    fn initial_guess(&self, x: Vec3) -> ChartCoords {
        let mid = self.mid();
        let d = x - self.sc.eval(mid);
        ChartCoords { s: mid + d.dot(self.frame[2]), t1: d.dot(self.frame[0]), t2: d.dot(self.frame[1]) }
    }

    /// Damped Newton inversion of Ψ; returns the coordinates and the
    /// iteration count.
    pub fn inverse_with_iters(&self, x: Vec3) -> Result<(ChartCoords, usize)> {
        let mut c = self.initial_guess(x);
        let scale = 1.0 + x.max_abs();
        let (mut p, mut jac) = self.psi_and_jacobian(c);
        let mut res = (p - x).norm();
        let mut iters = 0;
        while iters < self.config.max_newton_iters && res > 1e-15 * scale {
            iters += 1;
            let step =
                jac.solve(x - p).ok_or_else(|| Error::ChartFailure(format!("singular Jacobian at s = {}", c.s)))?;
            let mut lambda = 1.0;
            let (trial, tp, tj, tres) = loop {
                let trial =
                    ChartCoords { s: c.s + lambda * step.x, t1: c.t1 + lambda * step.y, t2: c.t2 + lambda * step.z };
                let (tp, tj) = self.psi_and_jacobian(trial);
                let tres = (tp - x).norm();
                if tres < res || lambda < 1e-6 {
                    break (trial, tp, tj, tres);
                }
                lambda *= 0.5;
            };
            if tres >= res {
                // stalled at rounding level
                break;
            }
            (c, p, jac, res) = (trial, tp, tj, tres);
        }
        if res <= 1e-11 * scale {
            Ok((c, iters))
        } else {
            Err(Error::ChartFailure(format!("Newton did not converge at {x:?} (residual {res:e})")))
        }
    }

    pub fn inverse(&self, x: Vec3) -> Result<ChartCoords> {
        self.inverse_with_iters(x).map(|r| r.0)
    }

    /// Level function `v_J(x)`: the `s` coordinate of `x`.
    pub fn v_j(&self, x: Vec3) -> Result<f64> {
        self.inverse(x).map(|c| c.s)
    }

    /// `Dv_J` at the point with chart coordinates `c`: first row of `(DΨ)⁻¹`.
    pub fn grad_v_j(&self, c: ChartCoords) -> Result<Vec3> {
        let inv = self
            .jacobian(c)
            .inverse()
            .ok_or_else(|| Error::ChartFailure(format!("singular Jacobian at s = {}", c.s)))?;
        Ok(inv.row(0))
    }

    fn probe_grid(&self) -> Result<GridReport> {
        let n = self.config.probes_per_axis.max(1);
        let mid = self.mid();
        let rt = CYLINDER_RADIUS_SQ.sqrt();
        let cell = |i: usize, half: f64| -half + (2.0 * half) * (i as f64 + 0.5) / n as f64;
        let mut rep = GridReport {
            probes: 0,
            max_roundtrip: 0.0,
            max_leaf_error: 0.0,
            grad_min: f64::INFINITY,
            grad_max: 0.0,
            max_newton_iters: 0,
        };
        for i in 0..n {
            let s = mid + cell(i, CYLINDER_HALF_LENGTH);
            for j in 0..n {
                let t1 = cell(j, rt);
                for k in 0..n {
                    let t2 = cell(k, rt);
                    let c = ChartCoords { s, t1, t2 };
                    if !self.in_cylinder(c) {
                        continue;
                    }
                    let x = self.psi(c);
                    let (back, iters) = self.inverse_with_iters(x)?;
                    let rt_err = (self.psi(back) - x).norm();
                    if rt_err > self.config.roundtrip_tol {
                        return Err(Error::ChartFailure(format!("round trip error {rt_err:e} at {c:?}")));
                    }
                    let g = self.grad_v_j(c)?.norm();
                    rep.probes += 1;
                    rep.max_roundtrip = rep.max_roundtrip.max(rt_err);
                    rep.max_leaf_error = rep.max_leaf_error.max((back.s - s).abs());
                    rep.grad_min = rep.grad_min.min(g);
                    rep.grad_max = rep.grad_max.max(g);
                    rep.max_newton_iters = rep.max_newton_iters.max(iters);
                }
            }
        }
        Ok(rep)
    }
}
