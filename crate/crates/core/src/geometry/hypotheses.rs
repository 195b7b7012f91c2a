//! Checks of the length-comparison hypotheses on a concrete instance, plus
//! audits of the length bounds those hypotheses imply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curve::{check_turning_condition_with, DiscreteCurve, TurningReport};
use crate::geometry::mesh::AnnulusSurface;
use crate::geometry::spatial::CurveIndex;

/// Largest admissible ε in the theorem statement (strict upper bound).
pub const EPS_UPPER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConfig {
    /// Arc-length window of the turning condition.
    pub window: f64,
    pub samples_per_unit: f64,
    /// Boundary tolerance relative to the curve length.
    pub tol_boundary_rel: f64,
    /// Sample spacing of the short-loop audit.
    pub subsegment_spacing: f64,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        HypothesisConfig {
            window: 1.0,
            samples_per_unit: crate::geometry::curve::TURNING_SAMPLES_PER_UNIT,
            tol_boundary_rel: 1e-9,
            subsegment_spacing: 0.125,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryMatch {
    /// Index of the boundary loop matched to curve 0.
    pub loop_for_curve0: usize,
    /// Largest distance from a loop vertex to its matched curve.
    pub max_distance0: f64,
    pub max_distance1: f64,
    pub tolerance: f64,
}

/// Sampled audit of the "short chord implies long arc" consequence: a
/// sub-segment with `Length ≥ 1` whose endpoints are within `10ε` must have
/// length at least 50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsegmentAudit {
    pub pairs_checked: usize,
    pub violations: usize,
    /// Smallest chord among sampled sub-segments of length in `[1, 50)`.
    pub min_chord: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub eps: f64,
    /// `0 < ε < 1/10000`; informational, the checks run for any ε.
    pub eps_admissible: bool,
    pub turning: TurningReport,
    pub length0: f64,
    pub length1: f64,
    pub length_ok: bool,
    pub boundary: BoundaryMatch,
    pub area: f64,
    pub area_ok: bool,
    /// Consequence audit: `Length(Γ₀) ≥ 100`.
    pub long_curve_ok: bool,
    pub subsegments: SubsegmentAudit,
}

impl HypothesisReport {
    /// Turning, length, boundary and area hypotheses all hold.
    pub fn all_pass(&self) -> bool {
        self.turning.ok && self.length_ok && self.area_ok
    }

    /// The proved consequences hold as well.
    pub fn consequences_ok(&self) -> bool {
        self.long_curve_ok && self.subsegments.ok
    }
}

fn max_loop_distance(sigma: &AnnulusSurface, loop_idx: usize, index: &CurveIndex, probe: f64) -> f64 {
    let mesh = sigma.mesh();
    let mut worst: f64 = 0.0;
    for &v in &mesh.boundary_loops()[loop_idx] {
        let d = index.closest_within(mesh.vertices()[v as usize], probe).map_or(f64::INFINITY, |h| h.distance);
        worst = worst.max(d);
        if worst.is_infinite() {
            break;
        }
    }
    worst
}

/// Matches the two boundary loops to the curves by Hausdorff-type distance.
pub fn match_boundary(
    curve0: &DiscreteCurve,
    curve1: &DiscreteCurve,
    sigma: &AnnulusSurface,
    tol_rel: f64,
) -> Result<BoundaryMatch> {
    let tol = tol_rel * curve0.length().max(curve1.length());
    let (i0, i1) = (CurveIndex::new(curve0), CurveIndex::new(curve1));
    // distances beyond the probe radius are reported as infinite
    let probe = tol.max(1e-300) * 1e3;
    let straight = (max_loop_distance(sigma, 0, &i0, probe), max_loop_distance(sigma, 1, &i1, probe));
    let swapped = (max_loop_distance(sigma, 1, &i0, probe), max_loop_distance(sigma, 0, &i1, probe));
    let (loop_for_curve0, (d0, d1)) =
        if straight.0.max(straight.1) <= swapped.0.max(swapped.1) { (0, straight) } else { (1, swapped) };
    if d0.max(d1) > tol {
        return Err(Error::Structural(format!(
            "best loop/curve matching has distance {} > tolerance {tol}",
            d0.max(d1)
        )));
    }
    Ok(BoundaryMatch { loop_for_curve0, max_distance0: d0, max_distance1: d1, tolerance: tol })
}

/// Sampled check that sub-segments of length in `[1, 50)` never have
/// endpoints within `10ε`.
pub fn audit_subsegments(curve: &DiscreteCurve, eps: f64, spacing: f64) -> SubsegmentAudit {
    let l = curve.length();
    let n = ((l / spacing).ceil() as usize).max(2);
    let step = if curve.is_closed() { l / n as f64 } else { l / (n - 1) as f64 };
    let pts: Vec<_> = (0..n).map(|i| curve.eval_point(i as f64 * step).expect("in range")).collect();
    let k_lo = (1.0 / step).ceil() as usize;
    let k_hi = (((50.0 / step) * (1.0 - 1e-12)).floor() as usize).min(n - 1);
    let mut pairs = 0;
    let mut violations = 0;
    let mut min_chord = f64::INFINITY;
    for i in 0..n {
        for k in k_lo..=k_hi {
            let j = if curve.is_closed() {
                (i + k) % n
            } else if i + k < n {
                i + k
            } else {
                break;
            };
            pairs += 1;
            let d = pts[i].distance(pts[j]);
            min_chord = min_chord.min(d);
            if d <= 10.0 * eps {
                violations += 1;
            }
        }
    }
    SubsegmentAudit { pairs_checked: pairs, violations, min_chord, ok: violations == 0 }
}

/// Evaluates hypotheses (i)–(iii) and the two consequence audits.
pub fn check_hypotheses(
    curve0: &DiscreteCurve,
    curve1: &DiscreteCurve,
    sigma: &AnnulusSurface,
    eps: f64,
    config: &HypothesisConfig,
) -> Result<HypothesisReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let boundary = match_boundary(curve0, curve1, sigma, config.tol_boundary_rel)?;
    let turning = check_turning_condition_with(curve0, eps, config.window, config.samples_per_unit);
    let length0 = curve0.length();
    let area = sigma.area();
    Ok(HypothesisReport {
        eps,
        eps_admissible: eps < EPS_UPPER,
        turning,
        length0,
        length1: curve1.length(),
        length_ok: length0 >= 1.0,
        boundary,
        area,
        area_ok: area <= eps * eps,
        long_curve_ok: length0 >= 100.0,
        subsegments: audit_subsegments(curve0, eps, config.subsegment_spacing),
    })
}
