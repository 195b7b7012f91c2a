//! One function per subcommand. Each writes its outputs into `out` and
//! returns the exit code.

use std::f64::consts::PI;
use std::path::Path;

use coarea_core::foliation::{assign_disks, build_chart, AssignmentStats, GridReport};
use coarea_core::intersection::{estimate_lambda_with, LambdaConfig, LambdaEstimate, MeshIndex};
use coarea_core::smoothing::ClosenessCertificate;
use coarea_core::verify::{
    chart_for, estimate_C, gen_bump, gen_offset_annulus, gen_wiggly, search_counterexample, verify_corollary_13,
    verify_theorem, Backend, CEstimate, FamilySpec, SearchConfig, SearchFamily, SearchOutcome, TrialOutcome,
    VerificationReport, VerifyConfig, BUMP_INTEGRAL,
};
use coarea_core::{check_hypotheses, closeness_certificate, make_cutoff, smooth, HypothesisConfig, HypothesisReport};
use serde::Serialize;

use crate::config::{
    CheckArgs, Command, Family, FoliateArgs, GenerateArgs, IntersectArgs, Meta, SearchArgs, SmoothArgs, SweepArgs,
    VerifyArgs,
};
use crate::error::{CliError, EXIT_FAIL, EXIT_PASS};
use crate::io::{
    csv_doc, curve_doc, json_doc, load_instance, obj_doc, sha256_hex, write_file, FileRef, InstanceFiles, Manifest,
};

pub fn run(cmd: &Command, out: &Path) -> Result<u8, CliError> {
    let meta = Meta::new(cmd);
    match cmd {
        Command::Generate(a) => generate(a, &meta, out),
        Command::Check(a) => check(a, &meta, out),
        Command::Smooth(a) => smooth_cmd(a, &meta, out),
        Command::Foliate(a) => foliate(a, &meta, out),
        Command::Intersect(a) => intersect(a, &meta, out),
        Command::Verify(a) => verify(a, &meta, out),
        Command::Sweep(a) => sweep(a, &meta, out),
        Command::Search(a) => search(a, &meta, out),
    }
}

fn exit_if(pass: bool) -> u8 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn generate(a: &GenerateArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let backend = Backend::parse(&a.backend);
    chart_for(&backend)?;
    let n = a.n.unwrap_or_else(|| (2.0 * PI * a.r).ceil() as usize);
    let mut inst = match a.family {
        Family::Offset => gen_offset_annulus(a.r, a.delta, n, a.eps, a.seed),
        Family::Wiggly => gen_wiggly(a.r, a.delta, a.amp, a.freq, n, a.eps, a.seed),
        Family::Bump => {
            let height = a.height.unwrap_or(a.eps * a.eps / (4.0 * a.half_width * BUMP_INTEGRAL));
            gen_bump(a.r, a.delta, a.half_width, height, n, a.eps, a.seed)
        }
    }?;
    inst.backend = backend;
    let put = |name: &str, bytes: Vec<u8>| -> Result<FileRef, CliError> {
        write_file(out, name, &bytes)?;
        Ok(FileRef { path: name.into(), sha256: sha256_hex(&bytes) })
    };
    let files = InstanceFiles {
        curve0: put("curve0.json", curve_doc(meta, &inst.curve0))?,
        curve1: put("curve1.json", curve_doc(meta, &inst.curve1))?,
        sigma: put("sigma.obj", obj_doc(meta, inst.sigma.mesh()))?,
    };
    let manifest = Manifest { eps: inst.eps, backend: inst.backend, provenance: inst.provenance, files };
    write_file(out, "instance.json", &json_doc(meta, &manifest))?;
    println!(
        "generated {} instance: {} spokes, area {:e}, written to {}",
        manifest.provenance.generator,
        n,
        inst.sigma.area(),
        out.display()
    );
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct CheckOut<'a> {
    all_pass: bool,
    consequences_ok: bool,
    hypotheses: &'a HypothesisReport,
}

fn check(a: &CheckArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let inst = load_instance(&a.instance, None)?;
    let cfg = HypothesisConfig { window: a.window, subsegment_spacing: a.subsegment_spacing, ..Default::default() };
    let h = check_hypotheses(&inst.curve0, &inst.curve1, &inst.sigma, inst.eps, &cfg)?;
    let doc = CheckOut { all_pass: h.all_pass(), consequences_ok: h.consequences_ok(), hypotheses: &h };
    write_file(out, "hypotheses.json", &json_doc(meta, &doc))?;
    println!(
        "turning {} (max deviation {:e}), length {}, area {} ({:e})",
        h.turning.ok, h.turning.max_deviation, h.length_ok, h.area_ok, h.area
    );
    Ok(exit_if(h.all_pass()))
}

#[derive(Serialize)]
struct SmoothOut<'a> {
    pieces: usize,
    length: f64,
    certificate: &'a ClosenessCertificate,
    /// Deviations divided by ε, orders 0 to 4.
    ratios: [f64; 5],
}

fn smooth_cmd(a: &SmoothArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let inst = load_instance(&a.instance, None)?;
    let sc = smooth(&inst.curve0, make_cutoff())?;
    let cert = closeness_certificate(&sc, inst.eps);
    let doc = SmoothOut { pieces: sc.pieces(), length: sc.length(), certificate: &cert, ratios: cert.ratios() };
    write_file(out, "smooth.json", &json_doc(meta, &doc))?;
    let n = a.samples.max(1);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let s = sc.length() * i as f64 / n as f64;
        let p = sc.eval(s);
        let d = sc.derivative(s);
        let dev = inst.curve0.eval_point(s)?.distance(p);
        rows.push(vec![num(s), num(p.x), num(p.y), num(p.z), num(d.x), num(d.y), num(d.z), num(dev)]);
    }
    let header = ["s", "x", "y", "z", "dx", "dy", "dz", "deviation"];
    write_file(out, "smooth.csv", &csv_doc(meta, &header, &rows))?;
    println!("certificate {}: ratios/eps {:?}", if cert.ok { "ok" } else { "violated" }, cert.ratios());
    Ok(exit_if(cert.ok))
}

#[derive(Serialize)]
struct FoliateOut<'a> {
    interval: (f64, f64),
    grid: &'a GridReport,
    grid_c_fit: f64,
    assignment: &'a AssignmentStats,
    assignment_c_fit: f64,
}

fn foliate(a: &FoliateArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let inst = load_instance(&a.instance, None)?;
    let sc = smooth(&inst.curve0, make_cutoff())?;
    let interval = (a.s0, a.s0 + a.length);
    let chart = build_chart(&sc, interval)?;
    let asg = assign_disks(&sc)?;
    let doc = FoliateOut {
        interval,
        grid: chart.report(),
        grid_c_fit: chart.report().c_fit(inst.eps),
        assignment: asg.stats(),
        assignment_c_fit: asg.stats().c_fit(inst.eps),
    };
    write_file(out, "foliation.json", &json_doc(meta, &doc))?;
    let n = a.samples.max(1);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let t = interval.0 + a.length * i as f64 / n as f64;
            let h = asg.h(t);
            vec![num(t), num(h), num(h - t)]
        })
        .collect();
    write_file(out, "foliation.csv", &csv_doc(meta, &["t", "h", "offset"], &rows))?;
    println!(
        "chart: {} probes, round trip {:e}; assignment monotone {}, max offset {:e}",
        doc.grid.probes, doc.grid.max_roundtrip, doc.assignment.monotone, doc.assignment.max_offset
    );
    Ok(exit_if(doc.assignment.monotone))
}

#[derive(Serialize)]
struct IntersectOut<'a> {
    lambda: &'a LambdaEstimate,
}

fn intersect(a: &IntersectArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let inst = load_instance(&a.instance, None)?;
    let sc = smooth(&inst.curve0, make_cutoff())?;
    let asg = assign_disks(&sc)?;
    let index = MeshIndex::new(inst.sigma.mesh());
    let cfg = LambdaConfig { n_samples: a.samples, ..Default::default() };
    let est = estimate_lambda_with(&asg, &inst.sigma, &index, (a.t0, a.t1), inst.eps, &cfg)?;
    write_file(out, "intersect.json", &json_doc(meta, &IntersectOut { lambda: &est }))?;
    let rows: Vec<Vec<String>> = est
        .samples
        .iter()
        .map(|s| {
            let phi = s.phi.map(|p| p.to_array());
            vec![
                num(s.t),
                num(s.len),
                s.transversal.to_string(),
                s.in_lambda.to_string(),
                format!("{:?}", s.phi_class),
                opt_num(phi.map(|p| p[0])),
                opt_num(phi.map(|p| p[1])),
                opt_num(phi.map(|p| p[2])),
                s.failed.to_string(),
            ]
        })
        .collect();
    let header = ["t", "length", "transversal", "in_lambda", "phi_class", "phi_x", "phi_y", "phi_z", "failed"];
    write_file(out, "intersect.csv", &csv_doc(meta, &header, &rows))?;
    println!("Λ fraction {} (threshold {})", est.fraction, est.threshold);
    Ok(exit_if(est.pass))
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    report: &'a VerificationReport,
}

fn verify(a: &VerifyArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let inst = load_instance(&a.instance, a.backend.as_deref())?;
    chart_for(&inst.backend)?;
    let cfg = VerifyConfig {
        c_budget: a.c_budget,
        lambda: LambdaConfig { n_samples: a.samples, ..Default::default() },
        hypotheses: HypothesisConfig { subsegment_spacing: a.subsegment_spacing, ..Default::default() },
        max_windows: a.max_windows,
        ..Default::default()
    };
    let rep = match (a.corollary_k, a.corollary_r) {
        (Some(k), Some(r)) => verify_corollary_13(&inst, k, r, &cfg),
        _ => verify_theorem(&inst, &cfg),
    };
    write_file(out, "report.json", &json_doc(meta, &VerifyOut { report: &rep }))?;
    let rows: Vec<Vec<String>> = rep
        .windows
        .iter()
        .map(|w| {
            vec![
                w.index.to_string(),
                num(w.window.0),
                num(w.window.1),
                num(w.lambda_fraction),
                num(w.lambda_threshold),
                w.lambda_pass.to_string(),
                num(w.coarea_ratio),
                w.coarea_pass.to_string(),
                num(w.phi_measure),
                num(w.phi_fraction),
            ]
        })
        .collect();
    let header = [
        "index",
        "t0",
        "t1",
        "lambda_fraction",
        "lambda_threshold",
        "lambda_pass",
        "coarea_ratio",
        "coarea_pass",
        "phi_measure",
        "phi_fraction",
    ];
    write_file(out, "windows.csv", &csv_doc(meta, &header, &rows))?;
    let ratio_row = vec![vec![
        num(rep.eps),
        num(rep.length0),
        num(rep.length1),
        num(rep.ratio),
        num(rep.threshold),
        rep.hypotheses_pass.to_string(),
        if rep.passed() { "pass" } else { "fail" }.to_string(),
    ]];
    let header = ["eps", "length0", "length1", "ratio", "threshold", "hypotheses_pass", "verdict"];
    write_file(out, "ratio.csv", &csv_doc(meta, &header, &ratio_row))?;
    for e in &rep.errors {
        eprintln!("warning: {e}");
    }
    println!(
        "{}: ratio {} vs threshold {} ({} of {} windows audited)",
        if rep.passed() { "PASS" } else { "FAIL" },
        rep.ratio,
        rep.threshold,
        rep.windows.len(),
        rep.windows_total
    );
    Ok(exit_if(rep.passed()))
}

fn search_family(f: Family) -> SearchFamily {
    match f {
        Family::Offset => SearchFamily::Offset,
        Family::Wiggly => SearchFamily::Wiggly,
        Family::Bump => SearchFamily::Bump,
    }
}

fn search_config(eps: f64, families: &[Family], c_budget: f64) -> SearchConfig {
    let mut cfg =
        SearchConfig { eps, families: families.iter().map(|&f| search_family(f)).collect(), ..Default::default() };
    cfg.verify.c_budget = c_budget;
    cfg
}

#[derive(Serialize)]
struct SweepSummary {
    c_hat: f64,
    stability: f64,
    worst_margin: Option<f64>,
}

#[derive(Serialize)]
struct SweepOut<'a> {
    summary: SweepSummary,
    estimate: &'a CEstimate,
    search: Option<&'a SearchOutcome>,
}

fn sweep(a: &SweepArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let family = match a.family {
        Family::Offset => FamilySpec::Offset,
        Family::Wiggly => FamilySpec::Wiggly { freq: a.freq },
        Family::Bump => FamilySpec::Bump { half_width: a.half_width },
    };
    let cfg = VerifyConfig { c_budget: a.c_budget, max_windows: Some(a.max_windows), ..Default::default() };
    let est = estimate_C(&family, &a.eps, a.seed, &cfg)?;
    let search = if a.search_budget > 0 {
        let eps = a.eps.iter().copied().fold(f64::INFINITY, f64::min);
        Some(search_counterexample(a.search_budget, a.seed, &search_config(eps, &[a.family], a.c_budget))?)
    } else {
        None
    };
    let worst_margin = search.as_ref().and_then(|s| s.worst_margin);
    let doc = SweepOut {
        summary: SweepSummary { c_hat: est.c_hat, stability: est.stability, worst_margin },
        estimate: &est,
        search: search.as_ref(),
    };
    write_file(out, "sweep.json", &json_doc(meta, &doc))?;
    let rows: Vec<Vec<String>> = est
        .points
        .iter()
        .map(|p| {
            vec![
                family.name().to_string(),
                num(p.eps),
                num(p.length0),
                num(p.length1),
                num(p.ratio),
                num(p.c_hat),
                p.hypotheses_pass.to_string(),
                format!("{:?}", p.verdict).to_lowercase(),
            ]
        })
        .collect();
    let header = ["family", "eps", "length0", "length1", "ratio", "c_hat", "hypotheses_pass", "verdict"];
    write_file(out, "sweep.csv", &csv_doc(meta, &header, &rows))?;
    match worst_margin {
        Some(m) => println!("C_hat {} stability {} worst margin {m}", est.c_hat, est.stability),
        None => println!("C_hat {} stability {}", est.c_hat, est.stability),
    }
    let pass = est.points.iter().all(|p| p.verdict == coarea_core::verify::Verdict::Pass)
        && worst_margin.is_none_or(|m| m <= 0.0);
    Ok(exit_if(pass))
}

#[derive(Serialize)]
struct SearchOut<'a> {
    outcome: &'a SearchOutcome,
}

fn search(a: &SearchArgs, meta: &Meta, out: &Path) -> Result<u8, CliError> {
    let cfg = search_config(a.eps, &a.families, a.c_budget);
    let res = search_counterexample(a.budget, a.seed, &cfg)?;
    write_file(out, "search.json", &json_doc(meta, &SearchOut { outcome: &res }))?;
    let rows: Vec<Vec<String>> = res
        .trials
        .iter()
        .map(|t| {
            let (outcome, reason) = match &t.outcome {
                TrialOutcome::Rejected(r) => ("rejected", r.as_str()),
                TrialOutcome::Excluded => ("excluded", ""),
                TrialOutcome::Scored => ("scored", ""),
            };
            vec![
                t.index.to_string(),
                format!("{:?}", t.family).to_lowercase(),
                outcome.to_string(),
                opt_num(t.ratio),
                opt_num(t.margin),
                reason.to_string(),
            ]
        })
        .collect();
    let header = ["index", "family", "outcome", "ratio", "margin", "reason"];
    write_file(out, "trials.csv", &csv_doc(meta, &header, &rows))?;
    println!(
        "{} scored, {} excluded, {} rejected; worst margin {}",
        res.scored,
        res.excluded,
        res.rejected,
        opt_num(res.worst_margin)
    );
    Ok(exit_if(res.worst_margin.is_none_or(|m| m <= 0.0)))
}
