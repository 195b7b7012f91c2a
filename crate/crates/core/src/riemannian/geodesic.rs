//! Geodesic integration, the exponential map and its inverse by shooting.

use serde::Serialize;

use super::metric::ManifoldChart;
use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};

/// RK4 steps over `t ∈ [0, 1]`, i.e. a step of `10⁻³·|v|` in arc length.
pub const GEODESIC_STEPS: usize = 1000;

/// Newton iteration cap of the shooting solver.
pub const LOG_MAX_ITERS: usize = 50;

/// One classical Runge–Kutta step for a state of `N` vectors.
pub(crate) fn rk4_step<const N: usize>(y: &mut [Vec3; N], dt: f64, f: impl Fn(&[Vec3; N]) -> [Vec3; N]) {
    let add = |y: &[Vec3; N], k: &[Vec3; N], s: f64| -> [Vec3; N] { std::array::from_fn(|i| y[i] + k[i] * s) };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, dt / 2.0));
    let k3 = f(&add(y, &k2, dt / 2.0));
    let k4 = f(&add(y, &k3, dt));
    for i in 0..N {
        y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Geodesic flow with `n` transported vectors riding along.
fn flow_with<const N: usize>(chart: &ManifoldChart, init: [Vec3; N], steps: usize) -> Result<[Vec3; N]> {
    let dt = 1.0 / steps as f64;
    let mut y = init;
    for _ in 0..steps {
        rk4_step(&mut y, dt, |s| {
            let (x, u) = (s[0], s[1]);
            std::array::from_fn(|i| match i {
                0 => u,
                1 => -chart.contract(x, u, u),
                _ => -chart.contract(x, u, s[i]),
            })
        });
        if !chart.contains(y[0]) {
            return Err(Error::LeftChart(y[0].to_array()));
        }
    }
    Ok(y)
}

/// Endpoint and final velocity of `t ↦ exp_p(t·v)` at `t = 1` with the
/// default step.
pub fn geodesic_endpoint(chart: &ManifoldChart, p: Vec3, v: Vec3) -> Result<(Vec3, Vec3)> {
    let [x, u] = flow_with(chart, [p, v], GEODESIC_STEPS)?;
    Ok((x, u))
}

/// `exp_p(v)` as a point only.
pub fn exp_point(chart: &ManifoldChart, p: Vec3, v: Vec3) -> Result<Vec3> {
    geodesic_endpoint(chart, p, v).map(|r| r.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicResult {
    pub endpoint: Vec3,
    pub velocity: Vec3,
    /// Parallel transport of the `g`-orthonormal coordinate frame at `p`.
    pub frame: [Vec3; 3],
    /// `| |γ′(1)|_g − |v|_g | / |v|_g`.
    pub speed_drift: f64,
    /// Richardson estimate of the endpoint error at the default step.
    pub richardson_error: f64,
}

/// Integrates the geodesic equation from `(p, v)` over `t ∈ [0, 1]`.
pub fn exp_map(chart: &ManifoldChart, p: Vec3, v: Vec3) -> Result<GeodesicResult> {
    if !chart.contains(p) {
        return Err(Error::LeftChart(p.to_array()));
    }
    let s = 1.0 / chart.conformal_factor(p).sqrt();
    let init = [p, v, Vec3::X * s, Vec3::Y * s, Vec3::Z * s];
    let coarse = flow_with(chart, init, GEODESIC_STEPS)?;
    let fine = flow_with(chart, [p, v], 2 * GEODESIC_STEPS)?;
    let speed0 = chart.norm(p, v);
    let speed1 = chart.norm(coarse[0], coarse[1]);
    Ok(GeodesicResult {
        endpoint: coarse[0],
        velocity: coarse[1],
        frame: [coarse[2], coarse[3], coarse[4]],
        speed_drift: if speed0 > 0.0 { (speed1 - speed0).abs() / speed0 } else { 0.0 },
        richardson_error: (coarse[0] - fine[0]).norm() * 16.0 / 15.0,
    })
}

/// `exp_p⁻¹(q)` by Newton shooting on the initial velocity, seeded with the
/// coordinate difference.
pub fn log_map(chart: &ManifoldChart, p: Vec3, q: Vec3) -> Result<Vec3> {
    let d = chart.displacement(p, q);
    let target = p + d;
    let mut v = d;
    if d == Vec3::ZERO {
        return Ok(Vec3::ZERO);
    }
    let scale = 1.0 + p.max_abs() + target.max_abs();
    let tol = 1e-12 * scale;
    let mut res = exp_point(chart, p, v)? - target;
    for _ in 0..LOG_MAX_ITERS {
        let r = res.norm();
        if r <= tol {
            return Ok(v);
        }
        let h = 1e-7 * v.norm().max(1e-3 * d.norm());
        let base = res + target;
        let cols: Vec<Vec3> = [Vec3::X, Vec3::Y, Vec3::Z]
            .iter()
            .map(|&e| exp_point(chart, p, v + e * h).map(|x| (x - base) / h))
            .collect::<Result<_>>()?;
        let step = Mat3::from_cols(cols[0], cols[1], cols[2]).solve(res).ok_or(Error::LogFailure { residual: r })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = v - step * lambda;
            if let Ok(x) = exp_point(chart, p, trial) {
                let tr = x - target;
                if tr.norm() < r {
                    v = trial;
                    res = tr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // stalled at the round-off floor
            if r <= 1e-9 * scale {
                return Ok(v);
            }
            return Err(Error::LogFailure { residual: r });
        }
    }
    let r = res.norm();
    if r <= 1e-9 * scale {
        Ok(v)
    } else {
        Err(Error::LogFailure { residual: r })
    }
}
