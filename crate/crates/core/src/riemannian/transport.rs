//! Parallel transport along paths and Jacobi fields along geodesics.

use serde::Serialize;

use super::geodesic::{rk4_step, GEODESIC_STEPS};
use super::metric::ManifoldChart;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Minimum RK4 substeps per path segment; long segments get one substep
/// per `10⁻²` of coordinate length.
pub const TRANSPORT_SUBSTEPS: usize = 4;

/// Transports `v` along one coordinate-straight segment `a → b`.
pub(crate) fn transport_segment(chart: &ManifoldChart, a: Vec3, b: Vec3, v: Vec3) -> Vec3 {
    if chart.is_flat() {
        return v;
    }
    let d = b - a;
    let n = TRANSPORT_SUBSTEPS.max((d.norm() * 100.0).ceil() as usize);
    let dt = 1.0 / n as f64;
    let mut y = [a, v];
    for _ in 0..n {
        rk4_step(&mut y, dt, |s| [d, -chart.contract(s[0], d, s[1])]);
    }
    y[1]
}

/// Solves `∇ₜX = 0` along the polyline through `path`, starting from `v`
/// at `path[0]`.
pub fn parallel_transport(chart: &ManifoldChart, path: &[Vec3], v: Vec3) -> Result<Vec3> {
    if let Some(p) = path.iter().find(|p| !chart.contains(**p)) {
        return Err(Error::LeftChart(p.to_array()));
    }
    Ok(path.windows(2).fold(v, |x, w| transport_segment(chart, w[0], w[1], x)))
}

/// Jacobi field `V` with `V(0) = 0`, `∇ₜV(0) = v₀` along `t ↦ exp_p(tξ)`,
/// the parallel field `X` with `X(0) = v₀`, and `W = V − tX`, sampled at
/// `t = j/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    pub t: Vec<f64>,
    pub points: Vec<Vec3>,
    pub x: Vec<Vec3>,
    pub v: Vec<Vec3>,
    pub w: Vec<Vec3>,
    /// `∇ₜV` along the geodesic.
    pub dv: Vec<Vec3>,
    /// `|v₀ ∧ ξ|_g` at the base point.
    pub wedge: f64,
}

impl TransportResult {
    pub fn v_end(&self) -> Vec3 {
        *self.v.last().expect("non-empty")
    }

    pub fn x_end(&self) -> Vec3 {
        *self.x.last().expect("non-empty")
    }

    pub fn w_end(&self) -> Vec3 {
        *self.w.last().expect("non-empty")
    }

    pub fn endpoint(&self) -> Vec3 {
        *self.points.last().expect("non-empty")
    }

    /// `|W(1)|_g`.
    pub fn w_norm_end(&self, chart: &ManifoldChart) -> f64 {
        chart.norm(self.endpoint(), self.w_end())
    }

    /// Largest relative change of `|X|_g` along the geodesic.
    pub fn x_norm_drift(&self, chart: &ManifoldChart) -> f64 {
        let n0 = chart.norm(self.points[0], self.x[0]);
        self.points.iter().zip(&self.x).map(|(&p, &x)| (chart.norm(p, x) - n0).abs() / n0).fold(0.0, f64::max)
    }
}

/// Integrates the Jacobi equation `∇ₜ²V + R(V, γ′)γ′ = 0` together with
/// the geodesic and the parallel field, using `∇ₜV` as a state variable.
pub fn jacobi_field(chart: &ManifoldChart, p: Vec3, xi: Vec3, v0: Vec3) -> Result<TransportResult> {
    let n = GEODESIC_STEPS;
    let dt = 1.0 / n as f64;
    // state: point, velocity, V, ∇V, X
    let mut y = [p, xi, Vec3::ZERO, v0, v0];
    let mut out = TransportResult {
        t: Vec::with_capacity(n + 1),
        points: Vec::with_capacity(n + 1),
        x: Vec::with_capacity(n + 1),
        v: Vec::with_capacity(n + 1),
        w: Vec::with_capacity(n + 1),
        dv: Vec::with_capacity(n + 1),
        wedge: chart.wedge_norm(p, v0, xi),
    };
    let record = |out: &mut TransportResult, t: f64, y: &[Vec3; 5]| {
        out.t.push(t);
        out.points.push(y[0]);
        out.v.push(y[2]);
        out.dv.push(y[3]);
        out.x.push(y[4]);
        out.w.push(y[2] - y[4] * t);
    };
    record(&mut out, 0.0, &y);
    for j in 1..=n {
        rk4_step(&mut y, dt, |s| {
            let (x, u, jv, pv, xv) = (s[0], s[1], s[2], s[3], s[4]);
            [
                u,
                -chart.contract(x, u, u),
                pv - chart.contract(x, u, jv),
                -chart.contract(x, u, pv) - chart.riemann(x, jv, u, u),
                -chart.contract(x, u, xv),
            ]
        });
        if !chart.contains(y[0]) {
            return Err(Error::LeftChart(y[0].to_array()));
        }
        record(&mut out, j as f64 * dt, &y);
    }
    Ok(out)
}
