//! Closed test curves with known geometry.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::DiscreteCurve;
use crate::vec3::Vec3;

/// Points of the regular `n`-gon inscribed in the circle of radius `r` in
/// the `xy`-plane, starting at angle `phase`.
pub fn circle_points(r: f64, n: usize, phase: f64) -> Vec<Vec3> {
    (0..n)
        .map(|i| {
            let a = phase + 2.0 * PI * i as f64 / n as f64;
            Vec3::new(r * a.cos(), r * a.sin(), 0.0)
        })
        .collect()
}

pub fn circle(r: f64, n: usize) -> Result<DiscreteCurve> {
    DiscreteCurve::new(circle_points(r, n, 0.0), true)
}

/// Stadium in the `xz`-plane: the straight side `x = 0`, `z ∈ [−a, a]`
/// joined to `x = 2ρ` by half circles of radius `ρ`. Arc length 0 is the
/// origin and the curve runs towards `+z`, so `γ₀(t) = (0, 0, t)` for
/// `t ∈ [0, a]` and `γ₀(t) = (0, 0, t − L)` for `t ∈ [L − a, L]`.
pub fn stadium(a: f64, rho: f64, arc_points: usize) -> Result<DiscreteCurve> {
    let mut pts = vec![Vec3::ZERO];
    for i in 0..=arc_points {
        let th = PI - PI * i as f64 / arc_points as f64;
        pts.push(Vec3::new(rho + rho * th.cos(), 0.0, a + rho * th.sin()));
    }
    for i in 0..=arc_points {
        let th = -PI * i as f64 / arc_points as f64;
        pts.push(Vec3::new(rho + rho * th.cos(), 0.0, -a + rho * th.sin()));
    }
    DiscreteCurve::new(pts, true)
}
