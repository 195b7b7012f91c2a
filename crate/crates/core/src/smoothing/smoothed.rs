use serde::{Deserialize, Serialize};

use super::cutoff::{CutoffFunction, MAX_ORDER};
use crate::error::{Error, Result};
use crate::geometry::DiscreteCurve;
use crate::vec3::Vec3;

/// `[γ̃, γ̃′, …, γ̃⁽⁴⁾]` at one parameter.
pub type Derivatives = [Vec3; MAX_ORDER + 1];

/// Blending weight `G(r) = r·χ(r)` and its derivatives in `r`.
pub(crate) fn blend_weight(chi: &CutoffFunction, r: f64) -> [f64; MAX_ORDER + 1] {
    let d = chi.derivatives(r);
    let mut g = [0.0; MAX_ORDER + 1];
    g[0] = r * d[0];
    for m in 1..=MAX_ORDER {
        g[m] = r * d[m] + m as f64 * d[m - 1];
    }
    g
}

/// Closed curve obtained by replacing Γ₀ with the broken line through
/// `k` equally spaced nodes and blending the corners with the cutoff.
///
/// Node `i` sits at arc length `(i + 1/2)·L/k`; piece `i` covers
/// `[i·L/k, (i+1)·L/k]` and on it, with `r = ks/L − (i + 1/2)`,
///
/// `γ̃(s) = N_i + r·χ(r)·(N_{i+1} − N_i) − r·(1 − χ(r))·(N_{i−1} − N_i)`.
#[derive(Debug, Clone)]
pub struct SmoothedCurve {
    source: DiscreteCurve,
    chi: CutoffFunction,
    k: usize,
    length: f64,
    nodes: Vec<Vec3>,
}

/// Builds the smoothed curve with `k = ceil(L)` pieces.
pub fn smooth(curve: &DiscreteCurve, chi: CutoffFunction) -> Result<SmoothedCurve> {
    if !curve.is_closed() {
        return Err(Error::InvalidCurve("smoothing requires a closed curve".into()));
    }
    let length = curve.length();
    if length < 1.0 {
        return Err(Error::InvalidCurve(format!("smoothing requires L >= 1, got {length}")));
    }
    let k = length.ceil() as usize;
    SmoothedCurve::with_pieces(curve, chi, k)
}

impl SmoothedCurve {
    /// Explicit piece count; `k` must lie in `[L, 2L]`.
    pub fn with_pieces(curve: &DiscreteCurve, chi: CutoffFunction, k: usize) -> Result<Self> {
        let length = curve.length();
        let kf = k as f64;
        if !(kf >= length && kf <= 2.0 * length) || k < 3 {
            return Err(Error::InvalidArgument(format!("piece count {k} not in [L, 2L] for L = {length}")));
        }
        let h = length / kf;
        let nodes = (0..k).map(|i| curve.eval_point((i as f64 + 0.5) * h)).collect::<Result<Vec<_>>>()?;
        Ok(SmoothedCurve { source: curve.clone(), chi, k, length, nodes })
    }

    pub fn source(&self) -> &DiscreteCurve {
        &self.source
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.chi
    }

    pub fn pieces(&self) -> usize {
        self.k
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node spacing `L/k`, always in `[1/2, 1]`.
    pub fn spacing(&self) -> f64 {
        self.length / self.k as f64
    }

    pub fn node(&self, i: usize) -> Vec3 {
        self.nodes[i % self.k]
    }

    /// Piece index and local coordinate `r ∈ [-1/2, 1/2]` of parameter `s`.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let w = s.rem_euclid(self.length);
        let x = w / self.spacing();
        let i = (x.floor() as usize).min(self.k - 1);
        (i, x - i as f64 - 0.5)
    }

    /// All derivatives of piece `i` at local coordinate `r`, evaluated from
    /// that piece's formula even when `r` lies outside `[-1/2, 1/2]`.
    pub fn eval_piece(&self, i: usize, r: f64) -> Derivatives {
        let k = self.k;
        let i = i % k;
        let n = self.nodes[i];
        let b = self.nodes[(i + k - 1) % k] - n;
        let second = self.nodes[(i + 1) % k] - n + b;
        let g = blend_weight(&self.chi, r);
        let inv_h = 1.0 / self.spacing();
        let mut out = [Vec3::ZERO; MAX_ORDER + 1];
        out[0] = n - b * r + second * g[0];
        out[1] = (second * g[1] - b) * inv_h;
        let mut scale = inv_h;
        for m in 2..=MAX_ORDER {
            scale *= inv_h;
            out[m] = second * (g[m] * scale);
        }
        out
    }

    pub fn derivatives(&self, s: f64) -> Derivatives {
        let (i, r) = self.locate(s);
        self.eval_piece(i, r)
    }

    pub fn eval(&self, s: f64) -> Vec3 {
        self.derivatives(s)[0]
    }

    pub fn derivative(&self, s: f64) -> Vec3 {
        self.derivatives(s)[1]
    }

    pub fn nth_derivative(&self, s: f64, m: usize) -> Vec3 {
        self.derivatives(s)[m]
    }
}

/// `sup |G⁽ᵐ⁾(r)|` over `r ∈ [-1/2, 1/2]` for `m = 0..=4`, by dense sampling.
pub fn blend_bounds(chi: &CutoffFunction) -> [f64; MAX_ORDER + 1] {
    let n = 4000;
    let mut out = [0.0f64; MAX_ORDER + 1];
    for j in 0..=n {
        let r = -0.5 + j as f64 / n as f64;
        for (o, g) in out.iter_mut().zip(blend_weight(chi, r)) {
            *o = o.max(g.abs());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    pub samples_per_unit: f64,
    /// Per-order multipliers of ε for `[c0, c1, c2, c3, c4]`.
    pub c_cert: [f64; MAX_ORDER + 1],
}

impl Default for CertificateConfig {
    /// `C(m) = 2^(m−1)·(1 + sup|G⁽ᵐ⁾|)`: with `|A + B| ≤ hε` and `h ≥ 1/2`
    /// each piece obeys these bounds up to lower-order sag terms.
    fn default() -> Self {
        let g = blend_bounds(&CutoffFunction);
        let mut c_cert = [0.0; MAX_ORDER + 1];
        for m in 0..=MAX_ORDER {
            c_cert[m] = 2f64.powi(m.max(1) as i32 - 1) * (1.0 + g[m]);
        }
        CertificateConfig { samples_per_unit: 32.0, c_cert }
    }
}

/// Sup-norm deviations between the smoothed curve and its source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosenessCertificate {
    /// `sup |γ̃ − γ₀|`
    pub c0_dev: f64,
    /// `sup |γ̃′ − γ₀′|`
    pub c1_dev: f64,
    /// `sup |γ̃⁽ᵐ⁾|` for `m = 2, 3, 4`
    pub cm_dev: [f64; 3],
    pub eps: f64,
    pub c_cert: [f64; MAX_ORDER + 1],
    pub samples: usize,
    pub ok: bool,
}

impl ClosenessCertificate {
    /// Deviations divided by ε: `[c0, c1, c2, c3, c4] / ε`.
    pub fn ratios(&self) -> [f64; 5] {
        let e = self.eps;
        [self.c0_dev / e, self.c1_dev / e, self.cm_dev[0] / e, self.cm_dev[1] / e, self.cm_dev[2] / e]
    }
}

pub fn closeness_certificate(sc: &SmoothedCurve, eps: f64) -> ClosenessCertificate {
    closeness_certificate_with(sc, eps, &CertificateConfig::default())
}

/// Dense-sampling estimate of the closeness bounds. The raw numbers are
/// returned whether or not the certificate passes.
pub fn closeness_certificate_with(sc: &SmoothedCurve, eps: f64, cfg: &CertificateConfig) -> ClosenessCertificate {
    let src = sc.source();
    let n = ((cfg.samples_per_unit * sc.length()).ceil() as usize).max(1);
    let step = sc.length() / n as f64;
    let mut c0: f64 = 0.0;
    let mut c1: f64 = 0.0;
    let mut cm = [0.0f64; 3];
    let mut seg = 0usize;
    let cum = src.cumulative_arclength();
    for j in 0..n {
        // offset by half a step so samples avoid polyline vertices
        let s = (j as f64 + 0.5) * step;
        while seg + 1 < src.segment_count() && cum[seg + 1] <= s {
            seg += 1;
        }
        let (a, b) = src.segment(seg);
        let u = (s - cum[seg]) / src.segment_length(seg);
        let p = a + (b - a) * u;
        let t = src.segment_direction(seg);
        let d = sc.derivatives(s);
        c0 = c0.max((d[0] - p).norm());
        c1 = c1.max((d[1] - t).norm());
        for m in 0..3 {
            cm[m] = cm[m].max(d[m + 2].norm());
        }
    }
    let devs = [c0, c1, cm[0], cm[1], cm[2]];
    let ok = devs.iter().zip(cfg.c_cert).all(|(&d, c)| d <= c * eps);
    ClosenessCertificate { c0_dev: c0, c1_dev: c1, cm_dev: cm, eps, c_cert: cfg.c_cert, samples: n, ok }
}
