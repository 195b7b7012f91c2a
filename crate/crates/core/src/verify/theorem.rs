//! End-to-end check of `Length(Γ₁) ≥ (1 − Cε)·Length(Γ₀)` on one instance,
//! and its curvature-bounded variant through metric rescaling.

use super::instance::{Backend, Instance};
use super::report::{
    verdict_for, CCandidates, CorollaryCheck, PhiCounts, PhiSummary, VerificationReport, VerifyConfig, WindowReport,
    REPORT_SCHEMA_VERSION,
};
use crate::error::Result;
use crate::foliation::assign_disks;
use crate::geometry::curve::TurningReport;
use crate::geometry::hypotheses::{audit_subsegments, match_boundary, EPS_UPPER};
use crate::geometry::mesh::{AnnulusSurface, TriMesh};
use crate::geometry::spatial::CurveIndex;
use crate::geometry::{check_hypotheses, DiscreteCurve, HypothesisReport};
use crate::intersection::{coarea_from_estimate, estimate_lambda_with, MeshIndex, PhiClass};
use crate::numeric::fsum;
use crate::riemannian::{rescale_metric, total_curvature_to_turning, ManifoldChart, MetricCurve, MetricModel};
use crate::smoothing::{make_cutoff, smooth};

/// Length of the union of the arcs `[s − hw, s + hw]` on a circle of
/// circumference `l`.
pub fn circular_union_length(centres: &[f64], hw: f64, l: f64) -> f64 {
    if centres.is_empty() || hw <= 0.0 {
        return 0.0;
    }
    if 2.0 * hw >= l {
        return l;
    }
    let mut iv: Vec<(f64, f64)> = Vec::with_capacity(centres.len() + 1);
    for &s in centres {
        let a = (s - hw).rem_euclid(l);
        let b = a + 2.0 * hw;
        if b > l {
            iv.push((a, l));
            iv.push((0.0, b - l));
        } else {
            iv.push((a, b));
        }
    }
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let (mut lo, mut hi) = iv[0];
    for &(a, b) in &iv[1..] {
        if a > hi {
            total += hi - lo;
            lo = a;
            hi = b;
        } else {
            hi = hi.max(b);
        }
    }
    total += hi - lo;
    total.min(l)
}

/// Smallest circular gap between sorted-or-not parameters on a circle of
/// circumference `l`.
fn min_circular_gap(params: &mut [f64], l: f64) -> f64 {
    if params.len() < 2 {
        return f64::INFINITY;
    }
    params.sort_by(f64::total_cmp);
    let mut gap = l - params[params.len() - 1] + params[0];
    for w in params.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    gap
}

/// Windows of `[0, L]` of equal length `L / floor(L)`, all in `[1, 2)`.
pub fn partition_windows(length: f64) -> Vec<(f64, f64)> {
    let m = length.floor() as usize;
    if m == 0 {
        return Vec::new();
    }
    let w = length / m as f64;
    (0..m).map(|j| (j as f64 * w, if j + 1 == m { length } else { (j + 1) as f64 * w })).collect()
}

fn selected(total: usize, max: Option<usize>) -> Vec<usize> {
    match max {
        Some(k) if k < total => (0..k).map(|i| i * total / k).collect(),
        _ => (0..total).collect(),
    }
}

struct Audit {
    windows: Vec<WindowReport>,
    total: usize,
    phi: PhiSummary,
    from_phi: Option<f64>,
    from_lambda: Option<f64>,
}

/// Runs the smoothing, foliation, Λ, co-area and φ stages in coordinates.
/// `eps_coord` is the Λ threshold in coordinate length and `to_length1`
/// converts coordinate length along Γ₁ into reported length.
fn audit_windows(inst: &Instance, eps_coord: f64, length1: f64, to_length1: f64, cfg: &VerifyConfig) -> Result<Audit> {
    let windows = partition_windows(inst.curve0.length());
    let total = windows.len();
    let picks = selected(total, cfg.max_windows);
    let l1 = inst.curve1.length();
    let mut reports = Vec::with_capacity(picks.len());
    let mut all_s = Vec::new();
    let mut measure_sum = Vec::with_capacity(picks.len());
    let mut from_phi: Option<f64> = None;
    let mut from_lambda: Option<f64> = None;
    if !picks.is_empty() {
        let sc = smooth(&inst.curve0, make_cutoff())?;
        let asg = assign_disks(&sc)?;
        let index = MeshIndex::new(inst.sigma.mesh());
        let target = CurveIndex::new(&inst.curve1);
        for &j in &picks {
            let window = windows[j];
            let est = estimate_lambda_with(&asg, &inst.sigma, &index, window, eps_coord, &cfg.lambda)?;
            let co = coarea_from_estimate(&asg, &inst.sigma, &index, &est, cfg.lambda.c_fit)?;
            let s: Vec<f64> = est.phi_on_gamma1().map(|(_, p)| target.closest(p).s).collect();
            let coord_measure = circular_union_length(&s, est.spacing() / 2.0, l1);
            all_s.extend_from_slice(&s);
            let len_j = window.1 - window.0;
            let phi_fraction = coord_measure / len_j;
            let cp = ((1.0 - phi_fraction) / inst.eps).max(0.0);
            let cl = ((1.0 - est.fraction) / inst.eps).max(0.0);
            from_phi = Some(from_phi.map_or(cp, |c| c.max(cp)));
            from_lambda = Some(from_lambda.map_or(cl, |c| c.max(cl)));
            measure_sum.push(coord_measure * to_length1);
            reports.push(WindowReport {
                index: j,
                window,
                lambda_fraction: est.fraction,
                lambda_threshold: est.threshold,
                lambda_pass: est.pass,
                failed_samples: est.samples.iter().filter(|s| s.failed).count(),
                phi: PhiCounts {
                    on_gamma1: est.count(PhiClass::OnGamma1),
                    on_gamma0: est.count(PhiClass::OnGamma0),
                    rim: est.count(PhiClass::Rim),
                    dangling: est.count(PhiClass::Dangling),
                    missing: est.count(PhiClass::Missing),
                },
                coarea_ratio: co.ratio,
                coarea_pass: co.pass,
                phi_measure: coord_measure * to_length1,
                phi_fraction,
            });
        }
    }
    let samples = all_s.len();
    let min_separation = min_circular_gap(&mut all_s, l1) * to_length1;
    let measure_sum = fsum(measure_sum);
    let measure_bound = length1 * (1.0 + cfg.phi_slack);
    Ok(Audit {
        windows: reports,
        total,
        phi: PhiSummary {
            samples,
            injective: min_separation > 0.0,
            min_separation,
            measure_sum,
            measure_bound,
            measure_ok: measure_sum <= measure_bound,
        },
        from_phi,
        from_lambda,
    })
}

fn chart_label(chart: &ManifoldChart) -> String {
    if chart.scale() == 1.0 {
        chart.id()
    } else {
        format!("{}*{}", chart.id(), chart.scale())
    }
}

fn empty_report(inst: &Instance, backend: String, cfg: &VerifyConfig) -> VerificationReport {
    VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        library_version: crate::VERSION.to_string(),
        backend,
        provenance: inst.provenance.clone(),
        eps: inst.eps,
        c_budget: cfg.c_budget,
        hypotheses: None,
        hypotheses_pass: false,
        length0: f64::NAN,
        length1: f64::NAN,
        ratio: f64::NAN,
        threshold: 1.0 - cfg.c_budget * inst.eps,
        windows: Vec::new(),
        windows_total: 0,
        phi: None,
        c_candidates: CCandidates { from_ratio: f64::NAN, from_phi: None, from_lambda: None },
        corollary: None,
        errors: Vec::new(),
        verdict: super::report::Verdict::Fail,
    }
}

fn finish(mut rep: VerificationReport, audit: Result<Audit>) -> VerificationReport {
    rep.ratio = rep.length1 / rep.length0;
    rep.c_candidates.from_ratio = ((1.0 - rep.ratio) / rep.eps).max(0.0);
    match audit {
        Ok(a) => {
            rep.windows = a.windows;
            rep.windows_total = a.total;
            rep.phi = Some(a.phi);
            rep.c_candidates.from_phi = a.from_phi;
            rep.c_candidates.from_lambda = a.from_lambda;
        }
        Err(e) => rep.errors.push(format!("pipeline: {e}")),
    }
    rep.verdict = verdict_for(rep.ratio, rep.eps, rep.c_budget);
    rep
}

/// Chart for an instance backend.
pub fn chart_for(backend: &Backend) -> Result<ManifoldChart> {
    match backend {
        Backend::Euclidean => Ok(ManifoldChart::euclidean()),
        Backend::Riemannian(id) => ManifoldChart::from_id(id),
    }
}

/// Checks the hypotheses, runs every audit and compares lengths. Failures
/// of individual stages are recorded in the report; the verdict depends on
/// the length ratio alone.
pub fn verify_theorem(inst: &Instance, cfg: &VerifyConfig) -> VerificationReport {
    match chart_for(&inst.backend) {
        Ok(chart) => verify_in_chart(inst, &chart, cfg),
        Err(e) => {
            let mut rep = empty_report(inst, inst.backend.id().to_string(), cfg);
            rep.errors.push(format!("backend: {e}"));
            rep
        }
    }
}

fn is_plain_euclidean(chart: &ManifoldChart) -> bool {
    chart.model() == MetricModel::Euclidean && chart.scale() == 1.0
}

/// [`verify_theorem`] with lengths, areas and turning measured in `chart`.
pub fn verify_in_chart(inst: &Instance, chart: &ManifoldChart, cfg: &VerifyConfig) -> VerificationReport {
    if is_plain_euclidean(chart) {
        return verify_euclidean(inst, cfg);
    }
    let mut rep = empty_report(inst, chart_label(chart), cfg);
    let curves = MetricCurve::new(chart, inst.curve0.clone())
        .and_then(|a| MetricCurve::new(chart, inst.curve1.clone()).map(|b| (a, b)));
    let (mc0, mc1) = match curves {
        Ok(c) => c,
        Err(e) => {
            rep.errors.push(format!("chart: {e}"));
            return rep;
        }
    };
    rep.length0 = mc0.length();
    rep.length1 = mc1.length();
    let eps = inst.eps;
    let max_factor = inst.curve0.points().iter().map(|&p| chart.conformal_factor(p)).fold(0.0, f64::max);
    let eps_coord = eps / max_factor.sqrt();
    match riemannian_hypotheses(inst, chart, &mc0, &mc1, eps_coord, cfg) {
        Ok(h) => {
            rep.hypotheses_pass = h.all_pass();
            rep.hypotheses = Some(h);
        }
        Err(e) => rep.errors.push(format!("hypotheses: {e}")),
    }
    let to_length1 = rep.length1 / inst.curve1.length();
    let audit = audit_windows(inst, eps_coord, rep.length1, to_length1, cfg);
    finish(rep, audit)
}

fn verify_euclidean(inst: &Instance, cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = empty_report(inst, "euclidean".into(), cfg);
    rep.length0 = inst.curve0.length();
    rep.length1 = inst.curve1.length();
    match check_hypotheses(&inst.curve0, &inst.curve1, &inst.sigma, inst.eps, &cfg.hypotheses) {
        Ok(h) => {
            rep.hypotheses_pass = h.all_pass();
            rep.hypotheses = Some(h);
        }
        Err(e) => rep.errors.push(format!("hypotheses: {e}")),
    }
    let audit = audit_windows(inst, inst.eps, rep.length1, 1.0, cfg);
    finish(rep, audit)
}

/// Area of Σ in the chart metric, one conformal factor per triangle taken
/// at its centroid.
pub fn chart_area(chart: &ManifoldChart, sigma: &AnnulusSurface) -> f64 {
    let mesh = sigma.mesh();
    fsum((0..mesh.triangles().len()).map(|t| {
        let [a, b, c] = mesh.triangle_points(t);
        mesh.triangle_area(t) * chart.conformal_factor((a + b + c) / 3.0)
    }))
}

fn riemannian_hypotheses(
    inst: &Instance,
    chart: &ManifoldChart,
    mc0: &MetricCurve,
    mc1: &MetricCurve,
    eps_coord: f64,
    cfg: &VerifyConfig,
) -> Result<HypothesisReport> {
    let eps = inst.eps;
    let boundary = match_boundary(&inst.curve0, &inst.curve1, &inst.sigma, cfg.hypotheses.tol_boundary_rel)?;
    let audit = total_curvature_to_turning(chart, mc0, cfg.hypotheses.window);
    let area = chart_area(chart, &inst.sigma);
    Ok(HypothesisReport {
        eps,
        eps_admissible: eps < EPS_UPPER,
        turning: TurningReport {
            max_deviation: audit.max_chord,
            ok: audit.max_chord <= eps,
            eps,
            window: cfg.hypotheses.window,
            samples: audit.windows,
        },
        length0: mc0.length(),
        length1: mc1.length(),
        length_ok: mc0.length() >= 1.0,
        boundary,
        area,
        area_ok: area <= eps * eps,
        long_curve_ok: mc0.length() >= 100.0,
        subsegments: audit_subsegments(&inst.curve0, eps_coord, cfg.hypotheses.subsegment_spacing),
    })
}

fn scaled_instance(inst: &Instance, s: f64) -> Result<Instance> {
    let scale = |c: &DiscreteCurve| DiscreteCurve::new(c.points().iter().map(|&p| p * s).collect(), c.is_closed());
    let mesh = inst.sigma.mesh();
    let verts = mesh.vertices().iter().map(|&p| p * s).collect();
    let sigma =
        AnnulusSurface::with_labels(TriMesh::new(verts, mesh.triangles().to_vec())?, inst.sigma.labels().loop0)?;
    Ok(Instance {
        curve0: scale(&inst.curve0)?,
        curve1: scale(&inst.curve1)?,
        sigma,
        eps: inst.eps,
        backend: Backend::Euclidean,
        provenance: inst.provenance.clone(),
    })
}

/// Checks the curvature-bounded preconditions (total curvature at most ε on
/// windows of length `r`, area at most `r²ε²/(1000K)`), rescales the metric
/// by `1000K/r²` and verifies the rescaled instance. On a Euclidean chart
/// the rescaling is carried out on coordinates.
pub fn verify_corollary_13(inst: &Instance, k: f64, r: f64, cfg: &VerifyConfig) -> VerificationReport {
    let chart = match chart_for(&inst.backend) {
        Ok(c) => c,
        Err(e) => {
            let mut rep = empty_report(inst, inst.backend.id().to_string(), cfg);
            rep.errors.push(format!("backend: {e}"));
            return rep;
        }
    };
    let rescaled = match rescale_metric(&chart, k, r) {
        Ok(c) => c,
        Err(e) => {
            let mut rep = empty_report(inst, chart_label(&chart), cfg);
            rep.errors.push(format!("rescale: {e}"));
            return rep;
        }
    };
    let factor = rescaled.scale() / chart.scale();
    let check = MetricCurve::new(&chart, inst.curve0.clone()).map(|mc0| {
        let tc = total_curvature_to_turning(&chart, &mc0, r).max_total_curvature;
        let area = chart_area(&chart, &inst.sigma);
        let area_budget = r * r * inst.eps * inst.eps / (1000.0 * k);
        CorollaryCheck {
            curvature_bound: k,
            r,
            factor,
            total_curvature: tc,
            total_curvature_ok: tc <= inst.eps,
            area,
            area_budget,
            area_ok: area <= area_budget,
        }
    });
    let mut rep = if is_plain_euclidean(&chart) {
        match scaled_instance(inst, factor.sqrt()) {
            Ok(big) => {
                let mut rep = verify_euclidean(&big, cfg);
                rep.backend = chart_label(&rescaled);
                rep
            }
            Err(e) => {
                let mut rep = empty_report(inst, chart_label(&rescaled), cfg);
                rep.errors.push(format!("rescale: {e}"));
                rep
            }
        }
    } else {
        verify_in_chart(inst, &rescaled, cfg)
    };
    match check {
        Ok(c) => rep.corollary = Some(c),
        Err(e) => rep.errors.push(format!("corollary: {e}")),
    }
    rep
}
