//! Conformally flat chart metrics `g = λ·e^{2w(x)}·δ` on a coordinate box.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};

/// `Γ[k][i][j] = Γᵏᵢⱼ`.
pub type Christoffel = [[[f64; 3]; 3]; 3];

/// `R[l][i][j][k] = Rˡᵢⱼₖ`, so that `R(∂ᵢ, ∂ⱼ)∂ₖ = Rˡᵢⱼₖ ∂ₗ`.
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

/// Finite-difference step for derivatives of the Christoffel symbols.
pub const CURVATURE_FD_STEP: f64 = 1e-4;

/// Built-in model metrics, selectable by identifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricModel {
    /// `euclidean`: `g = δ`.
    Euclidean,
    /// `sphere:<R>`: round 3-sphere of radius `R` in stereographic
    /// coordinates from the north pole; the origin is the south pole and
    /// `w = ln(2R² / (R² + |x|²))`.
    Sphere { radius: f64 },
    /// `flat-torus:<L>`: `g = δ` with period `L` in every coordinate.
    /// Points are kept unwrapped.
    FlatTorus { period: f64 },
    /// `perturbed:<a>`: `w = a·sin x·sin y·sin z`.
    Perturbed { amplitude: f64 },
}

impl MetricModel {
    pub fn parse(id: &str) -> Result<MetricModel> {
        let bad = || Error::UnknownMetric(id.to_string());
        let (name, arg) = match id.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<f64>().map_err(|_| bad())?)),
            None => (id, None),
        };
        let model = match (name, arg) {
            ("euclidean", None) => MetricModel::Euclidean,
            ("sphere", Some(r)) if r > 0.0 && r.is_finite() => MetricModel::Sphere { radius: r },
            ("flat-torus", Some(l)) if l > 0.0 && l.is_finite() => MetricModel::FlatTorus { period: l },
            ("perturbed", Some(a)) if a.is_finite() => MetricModel::Perturbed { amplitude: a },
            _ => return Err(bad()),
        };
        Ok(model)
    }

    pub fn id(&self) -> String {
        match *self {
            MetricModel::Euclidean => "euclidean".into(),
            MetricModel::Sphere { radius } => format!("sphere:{radius}"),
            MetricModel::FlatTorus { period } => format!("flat-torus:{period}"),
            MetricModel::Perturbed { amplitude } => format!("perturbed:{amplitude}"),
        }
    }

    /// `w(p)` and `∇w(p)`.
    #[inline]
    fn log_factor(&self, p: Vec3) -> (f64, Vec3) {
        match *self {
            MetricModel::Euclidean | MetricModel::FlatTorus { .. } => (0.0, Vec3::ZERO),
            MetricModel::Sphere { radius } => {
                let r2 = radius * radius;
                let d = r2 + p.norm_squared();
                ((2.0 * r2 / d).ln(), p * (-2.0 / d))
            }
            MetricModel::Perturbed { amplitude: a } => {
                let (sx, cx) = p.x.sin_cos();
                let (sy, cy) = p.y.sin_cos();
                let (sz, cz) = p.z.sin_cos();
                (a * sx * sy * sz, Vec3::new(a * cx * sy * sz, a * sx * cy * sz, a * sx * sy * cz))
            }
        }
    }

    /// Declared bound on `|Sect|` for the unscaled model.
    fn curvature_bound(&self) -> f64 {
        match *self {
            MetricModel::Euclidean | MetricModel::FlatTorus { .. } => 0.0,
            MetricModel::Sphere { radius } => 1.0 / (radius * radius),
            // |K| ≤ e^{-2w}(2|Hess w| + |∇w|²) with |Hess w| ≤ 3|a|, |∇w|² ≤ 3a²
            MetricModel::Perturbed { amplitude: a } => (2.0 * a.abs()).exp() * (6.0 * a.abs() + 3.0 * a * a),
        }
    }

    /// Declared injectivity-radius floor for the unscaled model.
    fn injectivity_floor(&self) -> f64 {
        match *self {
            MetricModel::Euclidean => f64::INFINITY,
            MetricModel::Sphere { radius } => PI * radius,
            MetricModel::FlatTorus { period } => period / 2.0,
            // conjugate-radius bound π/√K
            MetricModel::Perturbed { .. } => {
                let k = self.curvature_bound();
                if k > 0.0 {
                    PI / k.sqrt()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Half-width of the coordinate box on which the chart is used.
    fn half_width(&self) -> f64 {
        match *self {
            MetricModel::Sphere { radius } => 20.0 * radius,
            _ => 1e6,
        }
    }
}

/// A metric on a coordinate box of ℝ³ together with its declared curvature
/// bound `K` and injectivity-radius floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldChart {
    model: MetricModel,
    /// Constant factor multiplying the model metric.
    scale: f64,
    curvature_bound: f64,
    injectivity_floor: f64,
    half_width: f64,
}

impl ManifoldChart {
    pub fn new(model: MetricModel) -> ManifoldChart {
        ManifoldChart {
            model,
            scale: 1.0,
            curvature_bound: model.curvature_bound(),
            injectivity_floor: model.injectivity_floor(),
            half_width: model.half_width(),
        }
    }

    /// Chart for an identifier such as `sphere:1000`.
    pub fn from_id(id: &str) -> Result<ManifoldChart> {
        MetricModel::parse(id).map(ManifoldChart::new)
    }

    pub fn euclidean() -> ManifoldChart {
        ManifoldChart::new(MetricModel::Euclidean)
    }

    pub fn sphere(radius: f64) -> ManifoldChart {
        ManifoldChart::new(MetricModel::Sphere { radius })
    }

    pub fn flat_torus(period: f64) -> ManifoldChart {
        ManifoldChart::new(MetricModel::FlatTorus { period })
    }

    pub fn perturbed(amplitude: f64) -> ManifoldChart {
        ManifoldChart::new(MetricModel::Perturbed { amplitude })
    }

    pub fn model(&self) -> MetricModel {
        self.model
    }

    /// Identifier of the underlying model (the scale is not encoded).
    pub fn id(&self) -> String {
        self.model.id()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn curvature_bound(&self) -> f64 {
        self.curvature_bound
    }

    pub fn injectivity_floor(&self) -> f64 {
        self.injectivity_floor
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// The same chart with metric `factor·g`.
    pub fn rescaled(&self, factor: f64) -> ManifoldChart {
        ManifoldChart {
            scale: self.scale * factor,
            curvature_bound: self.curvature_bound / factor,
            injectivity_floor: self.injectivity_floor * factor.sqrt(),
            ..*self
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.model, MetricModel::Euclidean | MetricModel::FlatTorus { .. })
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.is_finite() && p.max_abs() <= self.half_width
    }

    /// Coordinate displacement from `p` to the nearest copy of `q`.
    pub fn displacement(&self, p: Vec3, q: Vec3) -> Vec3 {
        let d = q - p;
        match self.model {
            MetricModel::FlatTorus { period } => {
                let w = |x: f64| x - period * (x / period).round();
                Vec3::new(w(d.x), w(d.y), w(d.z))
            }
            _ => d,
        }
    }

    /// `g = φ(p)·δ`; returns `φ(p)`.
    #[inline]
    pub fn conformal_factor(&self, p: Vec3) -> f64 {
        self.scale * (2.0 * self.model.log_factor(p).0).exp()
    }

    /// `∇w` where `g = λ·e^{2w}·δ`.
    #[inline]
    pub fn log_factor_gradient(&self, p: Vec3) -> Vec3 {
        self.model.log_factor(p).1
    }

    pub fn metric(&self, p: Vec3) -> Mat3 {
        Mat3::IDENTITY.scale(self.conformal_factor(p))
    }

    #[inline]
    pub fn inner(&self, p: Vec3, u: Vec3, v: Vec3) -> f64 {
        self.conformal_factor(p) * u.dot(v)
    }

    #[inline]
    pub fn norm(&self, p: Vec3, v: Vec3) -> f64 {
        self.inner(p, v, v).sqrt()
    }

    /// `|u ∧ v|_g = √(|u|²|v|² − ⟨u,v⟩²)`.
    pub fn wedge_norm(&self, p: Vec3, u: Vec3, v: Vec3) -> f64 {
        let (uu, vv, uv) = (self.inner(p, u, u), self.inner(p, v, v), self.inner(p, u, v));
        (uu * vv - uv * uv).max(0.0).sqrt()
    }

    /// Unit vector along `v` in the metric at `p`.
    pub fn unit(&self, p: Vec3, v: Vec3) -> Vec3 {
        v / self.norm(p, v)
    }

    /// Angle between two tangent vectors at `p`.
    pub fn angle(&self, p: Vec3, u: Vec3, v: Vec3) -> f64 {
        // conformal metrics preserve Euclidean angles
        let _ = p;
        let c = u.cross(v).norm();
        c.atan2(u.dot(v))
    }

    /// `Γᵏᵢⱼ uⁱ vʲ`.
    #[inline]
    pub fn contract(&self, p: Vec3, u: Vec3, v: Vec3) -> Vec3 {
        let dw = self.model.log_factor(p).1;
        u * v.dot(dw) + v * u.dot(dw) - dw * u.dot(v)
    }

    /// `Γᵏᵢⱼ = δᵢₖ∂ⱼw + δⱼₖ∂ᵢw − δᵢⱼ∂ₖw`.
    pub fn christoffel(&self, p: Vec3) -> Christoffel {
        let dw = self.model.log_factor(p).1;
        let mut g = [[[0.0; 3]; 3]; 3];
        for (k, gk) in g.iter_mut().enumerate() {
            for (i, gki) in gk.iter_mut().enumerate() {
                for (j, e) in gki.iter_mut().enumerate() {
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    *e = d(i, k) * dw[j] + d(j, k) * dw[i] - d(i, j) * dw[k];
                }
            }
        }
        g
    }

    /// Riemann tensor from central differences of the Christoffel symbols.
    pub fn riemann_tensor(&self, p: Vec3) -> Riemann {
        let h = CURVATURE_FD_STEP;
        let axis = [Vec3::X, Vec3::Y, Vec3::Z];
        // dg[i][l][j][k] = ∂ᵢ Γˡⱼₖ
        let mut dg = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            let plus = self.christoffel(p + axis[i] * h);
            let minus = self.christoffel(p - axis[i] * h);
            for l in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        dg[i][l][j][k] = (plus[l][j][k] - minus[l][j][k]) / (2.0 * h);
                    }
                }
            }
        }
        let g = self.christoffel(p);
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let mut v = dg[i][l][j][k] - dg[j][l][i][k];
                        for m in 0..3 {
                            v += g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k];
                        }
                        r[l][i][j][k] = v;
                    }
                }
            }
        }
        r
    }

    /// `R(u, v)w`.
    pub fn riemann(&self, p: Vec3, u: Vec3, v: Vec3, w: Vec3) -> Vec3 {
        if self.is_flat() {
            return Vec3::ZERO;
        }
        apply_riemann(&self.riemann_tensor(p), u, v, w)
    }

    /// `⟨R(u,v)v, u⟩ / |u ∧ v|²`.
    pub fn sectional_curvature(&self, p: Vec3, u: Vec3, v: Vec3) -> f64 {
        let num = self.inner(p, self.riemann(p, u, v, v), u);
        let w = self.wedge_norm(p, u, v);
        num / (w * w)
    }
}

pub(crate) fn apply_riemann(r: &Riemann, u: Vec3, v: Vec3, w: Vec3) -> Vec3 {
    let mut out = Vec3::ZERO;
    for l in 0..3 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    s += r[l][i][j][k] * uv * w[k];
                }
            }
        }
        out[l] = s;
    }
    out
}

/// Sphere helpers used as closed-form oracles.
pub mod sphere {
    use crate::vec3::Vec3;

    /// Inverse stereographic projection onto the sphere of radius `r` in ℝ⁴.
    pub fn embed(radius: f64, p: Vec3) -> [f64; 4] {
        let r2 = radius * radius;
        let d = r2 + p.norm_squared();
        let s = 2.0 * r2 / d;
        [s * p.x, s * p.y, s * p.z, radius * (p.norm_squared() - r2) / d]
    }

    /// Great-circle distance between two chart points.
    pub fn distance(radius: f64, p: Vec3, q: Vec3) -> f64 {
        let (a, b) = (embed(radius, p), embed(radius, q));
        let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        // chord → angle, stable for small and large separations
        2.0 * radius * (diff / (2.0 * radius)).min(1.0).asin()
    }

    /// Chart radius of the latitude sphere at polar angle `theta` from the
    /// south pole.
    pub fn latitude_radius(radius: f64, theta: f64) -> f64 {
        radius * (theta / 2.0).tan()
    }
}
