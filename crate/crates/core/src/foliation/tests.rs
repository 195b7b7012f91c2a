use super::*;
use crate::geometry::shapes::{circle, stadium};
use crate::smoothing::{make_cutoff, smooth, SmoothedCurve};
use crate::vec3::Vec3;

fn smoothed_circle(r: f64) -> SmoothedCurve {
    let n = (2.0 * std::f64::consts::PI * r / 0.25).ceil() as usize;
    smooth(&circle(r, n).unwrap(), make_cutoff()).unwrap()
}

fn smoothed_stadium() -> SmoothedCurve {
    smooth(&stadium(100.0, 50.0, 600).unwrap(), make_cutoff()).unwrap()
}

#[test]
fn disk_on_straight_portion() {
    let sc = smoothed_stadium();
    for s in [3.0, 10.25, 60.0] {
        let d = disk_at(&sc, s).unwrap();
        assert!((d.center - Vec3::new(0.0, 0.0, s)).norm() < 1e-12);
        assert!((d.normal - Vec3::Z).norm() < 1e-12);
        assert_eq!(d.radius, 1.0);
        assert_eq!(d.center, sc.eval(s));
    }
}

#[test]
fn disk_normal_follows_circle_tangent() {
    let sc = smoothed_circle(100.0);
    let d = disk_at(&sc, 0.0).unwrap();
    assert!((d.normal - Vec3::Y).norm() < 1e-2);
    assert!((d.normal.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn straight_chart_is_a_translation() {
    let sc = smoothed_stadium();
    let chart = build_chart(&sc, (0.0, 10.0)).unwrap();
    let [e1, e2, e3] = chart.frame();
    assert_eq!((e1, e2, e3), (Vec3::X, Vec3::Y, Vec3::Z));
    let c = ChartCoords { s: 7.0, t1: 0.3, t2: -1.2 };
    assert!((chart.psi(c) - Vec3::new(0.3, -1.2, 7.0)).norm() < 1e-12);
    assert!((chart.v_j(Vec3::new(0.5, 0.5, 3.0)).unwrap() - 3.0).abs() < 1e-12);
    let rep = chart.report();
    assert!((rep.grad_min - 1.0).abs() < 1e-9 && (rep.grad_max - 1.0).abs() < 1e-9, "{rep:?}");
}

#[test]
fn psi_on_axis_is_the_curve() {
    let sc = smoothed_circle(300.0);
    let chart = build_chart(&sc, (5.0, 15.0)).unwrap();
    for s in [-30.0, 0.0, 9.9, 44.0] {
        assert_eq!(chart.psi(ChartCoords { s, t1: 0.0, t2: 0.0 }), sc.eval(s));
    }
}

#[test]
fn circle_chart_round_trip() {
    let sc = smoothed_circle(1000.0);
    let chart = build_chart(&sc, (0.0, 10.0)).unwrap();
    let rep = chart.report();
    assert!(rep.probes > 5000, "{rep:?}");
    assert!(rep.max_roundtrip <= 1e-8, "{rep:?}");
    assert!(rep.max_leaf_error <= 1e-8, "{rep:?}");
    // level planes at distance |t| < √10 from a curve of curvature at most
    // sup|G''|·κ give |Dv_J| − 1 ≈ √10·sup|G''|·κ
    let kappa_max = crate::smoothing::blend_bounds(&make_cutoff())[2] / 1000.0;
    let predicted = 1.0 / (1.0 - 10f64.sqrt() * kappa_max) - 1.0;
    assert!(rep.grad_max - 1.0 <= predicted * 1.01, "{rep:?} vs {predicted}");
    assert!(1.0 - rep.grad_min <= predicted * 1.01, "{rep:?} vs {predicted}");
}

#[test]
fn chart_rejects_long_interval() {
    let sc = smoothed_circle(100.0);
    assert!(build_chart(&sc, (0.0, 20.0)).is_err());
    assert!(build_chart(&sc, (3.0, 3.0)).is_err());
}

#[test]
fn leaves_are_disjoint() {
    let sc = smoothed_circle(200.0);
    let chart = build_chart_with(&sc, (0.0, 10.0), &ChartConfig { probes_per_axis: 6, ..Default::default() }).unwrap();
    let ss = [0.0, 0.001, 2.5, 2.502, 9.0];
    for &s in &ss {
        let d = disk_at(&sc, s).unwrap();
        for k in 0..12 {
            let p = d.point(0.9, k as f64 * 0.5);
            let v = chart.v_j(p).unwrap();
            assert!((v - s).abs() < 1e-8);
            for &s2 in &ss {
                if (s2 - s).abs() >= 1e-3 {
                    assert!((v - s2).abs() > 1e-3 - 1e-8);
                }
            }
        }
    }
}

#[test]
fn straight_assignment_is_identity() {
    let sc = smoothed_stadium();
    let asg = assign_disks(&sc).unwrap();
    for t in [1.0, 20.0, 50.5, 90.0] {
        assert!((asg.h(t) - t).abs() < 1e-12, "t={t}");
        assert!((asg.h_exact(t).unwrap() - t).abs() < 1e-12);
    }
    let chart = build_chart(&sc, (0.0, 10.0)).unwrap();
    let u = canonical_u(&chart, &asg, Vec3::new(0.5, 0.5, 3.0)).unwrap();
    assert!((u - 3.0).abs() < 1e-12);
}

#[test]
fn circle_assignment() {
    let sc = smoothed_circle(1000.0);
    let asg = assign_disks(&sc).unwrap();
    let st = asg.stats();
    assert!(st.monotone);
    assert!(st.max_offset <= 1e-2, "{st:?}");
    assert!(st.c_fit(1e-3) <= 50.0, "{st:?}");
    for t in [0.0, 3.3, 1000.7, 6000.0] {
        let s = asg.h_exact(t).unwrap();
        assert!(phi(&sc, t, s).0.abs() <= 1e-10);
        assert!((asg.h(t) - s).abs() < 1e-6);
    }
    // h(t + L) = h(t) + L
    assert!((asg.h(2.0 + sc.length()) - asg.h(2.0) - sc.length()).abs() < 1e-9);
}

#[test]
fn canonical_u_on_the_curve() {
    let sc = smoothed_circle(1000.0);
    let asg = assign_disks(&sc).unwrap();
    let chart = build_chart_with(&sc, (0.0, 10.0), &ChartConfig { probes_per_axis: 4, ..Default::default() }).unwrap();
    for t in [0.5, 4.0, 7.25, 12.0] {
        let x = sc.source().eval_point(t).unwrap();
        let u = canonical_u(&chart, &asg, x).unwrap();
        assert!((u - t).abs() < 1e-6, "t={t} u={u}");
        let g = canonical_u_gradient(&chart, &asg, x, 1e-5).unwrap().norm();
        assert!((g - 1.0).abs() < 50.0 * 1e-3, "|Du| = {g}");
    }
    assert_eq!(canonical_u(&chart, &asg, Vec3::new(0.0, 0.0, 500.0)), Err(crate::Error::OutOfChart));
}
