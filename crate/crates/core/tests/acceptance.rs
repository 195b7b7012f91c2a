//! Acceptance criteria 1–10. Runs without the libtest harness so every
//! criterion prints one `PASS`/`FAIL` line to stdout, in order. A non-flag
//! argument filters criteria by name. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use coarea_core::foliation::{build_chart, Disk};
use coarea_core::geometry::shapes::{circle, stadium};
use coarea_core::intersection::disk_mesh_intersect;
use coarea_core::riemannian::metric::sphere;
use coarea_core::riemannian::{
    exp_point, jacobi_field, log_map, parallel_transport, rescale_metric, smooth_riemannian, ManifoldChart, MetricCurve,
};
use coarea_core::smoothing::closeness_certificate;
use coarea_core::verify::{
    estimate_C, search_counterexample, shipped_fixtures, verify_theorem, FamilySpec, SearchConfig, VerificationReport,
    VerifyConfig, FIXTURE_SEED,
};
use coarea_core::{make_cutoff, smooth, DiscreteCurve, TriMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// tolerances
const C1_TOL: f64 = 1e-12;
const C1_TIME: Duration = Duration::from_secs(1);
const C2_SPREAD: f64 = 4.0;
const C2_TIME: Duration = Duration::from_secs(10);
const C3_GRAD: f64 = 50.0;
const C3_ROUNDTRIP: f64 = 1e-8;
const C3_TIME: Duration = Duration::from_secs(30);
const C4_TOL: f64 = 1e-9;
const C4_PAIRS: usize = 1000;
const C4_TIME: Duration = Duration::from_secs(5);
const C5_SLACK: f64 = 0.01;
const C5_TIME: Duration = Duration::from_secs(60);
const C6_BUDGET: f64 = 1000.0;
const C6_TRIALS: usize = 1000;
const C6_SEED: u64 = 20_240_601;
const C6_TIME: Duration = Duration::from_secs(600);
const C7_ROUNDTRIP: f64 = 1e-7;
const C7_HOLONOMY: f64 = 1e-5;
const C7_JACOBI: f64 = 1e-4;
const C7_TIME: Duration = Duration::from_secs(30);
const C8_LENGTH: f64 = 1e-9;
const C8_SECTIONAL: f64 = 1e-8;
const C8_TIME: Duration = Duration::from_secs(1);
const C9_TOL: f64 = 1e-9;
const C9_TIME: Duration = Duration::from_secs(5);

/// Bit n is set once criterion n has printed its line.
static REPORTED: AtomicU32 = AtomicU32::new(0);

fn report(n: u32, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("{tag} criterion {n}: {detail}");
    REPORTED.fetch_or(1 << n, Ordering::SeqCst);
}

fn within(start: Instant, limit: Duration) -> (bool, f64) {
    let t = start.elapsed();
    (t <= limit, t.as_secs_f64())
}

fn criterion_01_straight_fixed_point() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    // rectangles with long straight sides, one tilted out of the axes
    let dir = Vec3::new(1.0, 2.0, -0.5).normalize();
    let side = Vec3::new(0.0, 0.3, 1.2).normalize();
    let side = (side - dir * side.dot(dir)).normalize();
    for (len, width) in [(40.0, 1.0), (123.0, 2.5), (500.0, 3.0)] {
        let pts = vec![Vec3::ZERO, dir * len, dir * len + side * width, side * width];
        let c = DiscreteCurve::new(pts, true).unwrap();
        let sc = smooth(&c, make_cutoff()).unwrap();
        let mut s = 2.0;
        while s < len - 2.0 {
            worst = worst.max((sc.eval(s) - c.eval_point(s).unwrap()).norm());
            s += 0.01;
        }
    }
    let (fast, secs) = within(start, C1_TIME);
    let ok = worst <= C1_TOL && fast;
    report(1, ok, format!("sup|smoothed − source| = {worst:.3e} (≤ {C1_TOL:e}), {secs:.2}s"));
    assert!(ok);
}

fn circle_family(eps: f64) -> DiscreteCurve {
    let r = 2.0 / eps;
    circle(r, (2.0 * PI * r).ceil() as usize).unwrap()
}

fn criterion_02_closeness_scaling() {
    let start = Instant::now();
    let mut ratios = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let c = circle_family(eps);
        let sc = smooth(&c, make_cutoff()).unwrap();
        ratios.push(closeness_certificate(&sc, eps).ratios());
    }
    let mut spreads = [0.0; 3];
    for (m, spread) in spreads.iter_mut().enumerate() {
        let vals: Vec<f64> = ratios.iter().map(|r| r[m]).collect();
        let hi = vals.iter().cloned().fold(0.0, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        *spread = hi / lo;
    }
    let (fast, secs) = within(start, C2_TIME);
    let ok = spreads.iter().all(|&s| s <= C2_SPREAD) && fast;
    report(2, ok, format!("max/min of deviation/ε for C⁰, C¹, C²: {spreads:.3?} (≤ {C2_SPREAD}), {secs:.2}s"));
    assert!(ok);
}

fn criterion_03_foliation_sandwich() {
    let start = Instant::now();
    let mut worst_c: f64 = 0.0;
    let mut worst_rt: f64 = 0.0;
    let mut probes = 0;
    for eps in [1e-2, 1e-3, 1e-4] {
        let sc = smooth(&circle_family(eps), make_cutoff()).unwrap();
        let chart = build_chart(&sc, (0.0, 10.0)).unwrap();
        let rep = chart.report();
        probes = rep.probes;
        worst_c = worst_c.max(rep.c_fit(eps));
        worst_rt = worst_rt.max(rep.max_roundtrip);
    }
    let (fast, secs) = within(start, C3_TIME);
    // the 20³ grid is masked to the cylinder t₁² + t₂² ≤ 10
    let cell = |i: usize| -(10f64.sqrt()) + 2.0 * 10f64.sqrt() * (i as f64 + 0.5) / 20.0;
    let inside =
        (0..20).flat_map(|j| (0..20).map(move |k| (j, k))).filter(|&(j, k)| cell(j).powi(2) + cell(k).powi(2) <= 10.0);
    let expected = 20 * inside.count();
    let ok = worst_c <= C3_GRAD && worst_rt <= C3_ROUNDTRIP && probes == expected && fast;
    report(
        3,
        ok,
        format!("| |Dv_J| − 1 | ≤ {worst_c:.3}·ε (≤ {C3_GRAD}ε), Ψ round trip {worst_rt:.2e}, {probes} probes of a 20³ grid, {secs:.2}s"),
    );
    assert!(ok);
}

/// Independent oracle: crossings of the triangle's edges with the disk
/// plane, joined and clipped to the disk's circle.
fn oracle_cut(tri: [Vec3; 3], c: Vec3, n: Vec3, radius: f64) -> f64 {
    let d: Vec<f64> = tri.iter().map(|&p| (p - c).dot(n)).collect();
    let mut pts = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        if (d[i] < 0.0) != (d[j] < 0.0) {
            let t = d[i] / (d[i] - d[j]);
            pts.push(tri[i] + (tri[j] - tri[i]) * t);
        }
    }
    if pts.len() != 2 {
        return 0.0;
    }
    let (p, q) = (pts[0], pts[1]);
    let e = q - p;
    let f = p - c;
    let a = e.dot(e);
    let b = 2.0 * f.dot(e);
    let cc = f.dot(f) - radius * radius;
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return 0.0;
    }
    let t0 = ((-b - disc.sqrt()) / (2.0 * a)).max(0.0);
    let t1 = ((-b + disc.sqrt()) / (2.0 * a)).min(1.0);
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * a.sqrt()
    }
}

fn criterion_04_intersection_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut hits = 0;
    for _ in 0..C4_PAIRS {
        let mut v = || Vec3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let tri = [v(), v(), v()];
        let c = v() * 0.3;
        let n = v();
        let mesh = TriMesh::new(tri.to_vec(), vec![[0, 1, 2]]).unwrap();
        let disk = Disk::new(c, n, 1.0).unwrap();
        let got = disk_mesh_intersect(&disk, &mesh).total_length;
        let want = oracle_cut(tri, c, disk.normal, 1.0);
        if want > 0.0 {
            hits += 1;
        }
        worst = worst.max((got - want).abs());
    }
    // analytic fixture: triangle crossing the unit disk in a segment of length 1/2
    let mesh = TriMesh::new(
        vec![Vec3::new(-0.5, 0.0, -1.0), Vec3::new(0.5, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let analytic = disk_mesh_intersect(&Disk::new(Vec3::ZERO, Vec3::Z, 1.0).unwrap(), &mesh).total_length;
    let (fast, secs) = within(start, C4_TIME);
    let ok = worst <= C4_TOL && analytic == 0.5 && hits > C4_PAIRS / 10 && fast;
    report(
        4,
        ok,
        format!("{C4_PAIRS} pairs ({hits} crossing), max |Δlength| = {worst:.2e} (≤ {C4_TOL:e}); analytic = {analytic}, {secs:.2}s"),
    );
    assert!(ok);
}

/// Full-audit report of the ε = 10⁻³ offset fixture, shared by criteria 5
/// and 6, with its wall time.
fn offset_report() -> &'static (VerificationReport, f64) {
    static CELL: OnceLock<(VerificationReport, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let inst = FamilySpec::Offset.instance(1e-3, FIXTURE_SEED).unwrap();
        let rep = verify_theorem(&inst, &VerifyConfig::default());
        (rep, start.elapsed().as_secs_f64())
    })
}

fn criterion_05_lambda_audit() {
    let (rep, secs) = offset_report();
    let eps = rep.eps;
    let area = rep.hypotheses.as_ref().map_or(f64::NAN, |h| h.area);
    let threshold = 1.0 - 2.0 * eps - C5_SLACK;
    let min = rep.min_lambda_fraction().unwrap_or(f64::NAN);
    let ok = rep.errors.is_empty()
        && rep.windows.len() == rep.windows_total
        && rep.windows.iter().all(|w| w.lambda_fraction >= threshold)
        && (area / (eps * eps) - 0.5).abs() < 1e-3
        && *secs <= C5_TIME.as_secs_f64();
    report(
        5,
        ok,
        format!(
            "{} windows, area = {:.4}ε², min Λ fraction {min} (≥ {threshold}), {secs:.1}s",
            rep.windows.len(),
            area / (eps * eps)
        ),
    );
    assert!(ok, "{:?}", rep.errors);
}

fn criterion_06_theorem_end_to_end() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut all_ok = true;
    let mut passing = 0;
    for (family, eps) in shipped_fixtures() {
        let rep = if family == FamilySpec::Offset && eps == 1e-3 {
            offset_report().0.clone()
        } else {
            verify_theorem(&family.instance(eps, FIXTURE_SEED).unwrap(), &VerifyConfig::default())
        };
        if rep.hypotheses_pass {
            passing += 1;
            let ok = rep.ratio >= 1.0 - C6_BUDGET * eps;
            all_ok &= ok;
            lines.push(format!("{}@{eps:e}: ratio {:.12}", family.name(), rep.ratio));
        }
    }
    let search = search_counterexample(C6_TRIALS, C6_SEED, &SearchConfig::default()).unwrap();
    let worst = search.worst_margin.unwrap_or(f64::INFINITY);
    let (fast, secs) = within(start, C6_TIME);
    let ok = all_ok && passing == shipped_fixtures().len() && worst <= 0.0 && search.scored > 0 && fast;
    report(
        6,
        ok,
        format!(
            "{passing} fixtures [{}]; search {} scored / {} excluded / {} rejected, worst margin {worst:.6}, {secs:.1}s",
            lines.join(", "),
            search.scored,
            search.excluded,
            search.rejected
        ),
    );
    assert!(ok);
}

fn criterion_07_riemannian_kernel() {
    let start = Instant::now();
    let r = 10.0;
    let chart = ManifoldChart::sphere(r);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut roundtrip: f64 = 0.0;
    for _ in 0..20 {
        let p = Vec3::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let q = exp_point(&chart, p, v).unwrap();
        let back = log_map(&chart, p, q).unwrap();
        roundtrip = roundtrip.max((back - v).norm() / v.norm());
    }
    let theta = PI / 3.0;
    let n = 20_000;
    let rho = sphere::latitude_radius(1.0, theta);
    let path: Vec<Vec3> = (0..=n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Vec3::new(rho * a.cos(), rho * a.sin(), 0.0)
        })
        .collect();
    let w = parallel_transport(&ManifoldChart::sphere(1.0), &path, Vec3::Y).unwrap();
    let got = Vec3::Y.cross(w).z.atan2(Vec3::Y.dot(w)).rem_euclid(2.0 * PI);
    let want = 2.0 * PI * (1.0 - theta.cos());
    let holonomy = ((got - want + PI).rem_euclid(2.0 * PI) - PI).abs();
    let sph = ManifoldChart::sphere(2.0);
    let (p, xi, v0) = (Vec3::new(0.3, -0.1, 0.2), Vec3::new(0.6, 0.3, -0.2), Vec3::new(-0.2, 0.5, 0.4));
    let jac = jacobi_field(&sph, p, xi, v0).unwrap().v_end();
    let h = 1e-4;
    let fd = (exp_point(&sph, p, xi + v0 * h).unwrap() - exp_point(&sph, p, xi - v0 * h).unwrap()) / (2.0 * h);
    let jrel = (jac - fd).norm() / fd.norm();
    let (fast, secs) = within(start, C7_TIME);
    let ok = roundtrip <= C7_ROUNDTRIP && holonomy <= C7_HOLONOMY && jrel <= C7_JACOBI && fast;
    report(
        7,
        ok,
        format!("exp/log rel {roundtrip:.2e} (≤ {C7_ROUNDTRIP:e}), holonomy err {holonomy:.2e} (≤ {C7_HOLONOMY:e}), Jacobi rel {jrel:.2e} (≤ {C7_JACOBI:e}), {secs:.2}s"),
    );
    assert!(ok);
}

fn criterion_08_rescaling() {
    let start = Instant::now();
    let flat = ManifoldChart::euclidean();
    let pts: Vec<Vec3> = (0..=10).map(|i| Vec3::new(0.2 * i as f64, 0.1 * i as f64, 0.0)).collect();
    let c = DiscreteCurve::new(pts, false).unwrap();
    let before = MetricCurve::new(&flat, c.clone()).unwrap().length();
    let after = MetricCurve::new(&rescale_metric(&flat, 1.0, 1.0).unwrap(), c).unwrap().length();
    let factor = after / before;
    let len_err = (factor / 1000f64.sqrt() - 1.0).abs();
    let r = 7.0;
    let sph = rescale_metric(&ManifoldChart::sphere(r), 1.0 / (r * r), 1.0).unwrap();
    let k = sph.sectional_curvature(Vec3::new(1.0, 2.0, 0.5), Vec3::X, Vec3::new(0.0, 1.0, 1.0));
    let (fast, secs) = within(start, C8_TIME);
    let ok = len_err <= C8_LENGTH && (k - 1e-3).abs() <= C8_SECTIONAL && fast;
    report(8, ok, format!("length factor {factor:.10} (rel err {len_err:.1e}), sectional {k:.12}, {secs:.3}s"));
    assert!(ok);
}

fn criterion_09_euclidean_reduction() {
    let start = Instant::now();
    let chart = ManifoldChart::euclidean();
    let c = stadium(20.0, 8.0, 300).unwrap();
    let flat = smooth(&c, make_cutoff()).unwrap();
    let curved = smooth_riemannian(&chart, &MetricCurve::new(&chart, c).unwrap(), make_cutoff()).unwrap();
    let mut worst: f64 = 0.0;
    let n = 5000;
    for j in 0..n {
        let s = flat.length() * (j as f64 + 0.5) / n as f64;
        worst = worst.max((flat.eval(s) - curved.eval(s).unwrap()).norm());
    }
    let (fast, secs) = within(start, C9_TIME);
    let ok = worst <= C9_TOL && flat.pieces() == curved.pieces() && fast;
    report(9, ok, format!("sup |geodesic − chordal| = {worst:.2e} (≤ {C9_TOL:e}) over {n} points, {secs:.2}s"));
    assert!(ok);
}

fn criterion_10_determinism() {
    // library side of the contract; the CLI re-run check lives in the cli
    // crate's integration tests
    let cfg = VerifyConfig { max_windows: Some(16), ..Default::default() };
    let run = || {
        let inst = FamilySpec::Wiggly { freq: 40.0 }.instance(1e-2, FIXTURE_SEED).unwrap();
        serde_json::to_vec(&verify_theorem(&inst, &cfg)).unwrap()
    };
    let sweep = || {
        let est =
            estimate_C(&FamilySpec::Bump { half_width: 5.0 }, &[0.1, 0.01, 0.001], 3, &VerifyConfig::ratio_only());
        serde_json::to_vec(&est.unwrap()).unwrap()
    };
    let search = || {
        let cfg = SearchConfig { eps: 1e-2, ..Default::default() };
        serde_json::to_vec(&search_counterexample(40, 99, &cfg).unwrap()).unwrap()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let same = run() == pool.install(run) && sweep() == pool.install(sweep) && search() == pool.install(search);
    report(10, same, "verify, sweep and search reports byte-identical across runs and thread counts".into());
    assert!(same);
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 10] = [
        ("criterion_01_straight_fixed_point", criterion_01_straight_fixed_point),
        ("criterion_02_closeness_scaling", criterion_02_closeness_scaling),
        ("criterion_03_foliation_sandwich", criterion_03_foliation_sandwich),
        ("criterion_04_intersection_oracle", criterion_04_intersection_oracle),
        ("criterion_05_lambda_audit", criterion_05_lambda_audit),
        ("criterion_06_theorem_end_to_end", criterion_06_theorem_end_to_end),
        ("criterion_07_riemannian_kernel", criterion_07_riemannian_kernel),
        ("criterion_08_rescaling", criterion_08_rescaling),
        ("criterion_09_euclidean_reduction", criterion_09_euclidean_reduction),
        ("criterion_10_determinism", criterion_10_determinism),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, (name, run)) in (1u32..).zip(criteria) {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        if panic::catch_unwind(run).is_err() {
            failed += 1;
            if REPORTED.load(Ordering::SeqCst) & (1 << n) == 0 {
                println!("FAIL criterion {n}: panicked before reporting");
            }
        }
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
