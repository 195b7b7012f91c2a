use super::*;
use crate::error::Error;
use crate::foliation::{assign_disks, Disk};
use crate::geometry::mesh::{AnnulusSurface, TriMesh};
use crate::geometry::shapes::{circle_points, stadium};
use crate::smoothing::{make_cutoff, smooth};
use crate::vec3::Vec3;
use crate::verify::ruled_annulus;

fn unit_disk(center: Vec3, normal: Vec3) -> Disk {
    Disk::new(center, normal, 1.0).unwrap()
}

#[test]
fn analytic_single_triangle() {
    let mesh = TriMesh::new(
        vec![Vec3::new(-0.5, 0.0, -1.0), Vec3::new(0.5, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let cut = disk_mesh_intersect(&unit_disk(Vec3::ZERO, Vec3::Z), &mesh);
    assert_eq!(cut.segments.len(), 1);
    let s = cut.segments[0];
    let (lo, hi) = if s.a.x < s.b.x { (s.a, s.b) } else { (s.b, s.a) };
    assert_eq!(lo, Vec3::new(-0.25, 0.0, 0.0));
    assert_eq!(hi, Vec3::new(0.25, 0.0, 0.0));
    assert_eq!(cut.total_length, 0.5);
    assert!(cut.transversal);
    assert_eq!(cut.components.len(), 1);
    assert_eq!(cut.components[0].ends, Some([EndpointClass::Boundary(0); 2]));
}

#[test]
fn triangle_above_plane_misses() {
    let mesh = TriMesh::new(
        vec![Vec3::new(0.0, 0.0, 0.1), Vec3::new(1.0, 0.0, 0.2), Vec3::new(0.0, 1.0, 0.3)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let cut = disk_mesh_intersect(&unit_disk(Vec3::ZERO, Vec3::Z), &mesh);
    assert!(cut.is_empty() && cut.components.is_empty() && cut.transversal);
    assert_eq!(cut.total_length, 0.0);
}

#[test]
fn coplanar_annulus_is_flagged() {
    let p0: Vec<Vec3> = circle_points(1.0, 16, 0.0).into_iter().map(|p| Vec3::new(p.x, 0.0, p.y)).collect();
    let p1: Vec<Vec3> = p0.iter().map(|&p| p * 2.0).collect();
    let sigma = ruled_annulus(&p0, &p1).unwrap();
    let cut = disk_mesh_intersect(&unit_disk(Vec3::new(1.5, 0.0, 0.0), Vec3::Y), sigma.mesh());
    assert!(!cut.transversal);
    assert!(!cut.flagged.is_empty());
}

#[test]
fn rim_clipping_and_components() {
    // long strip in the plane y = 0 crossing the disk x = 0
    let mesh = TriMesh::new(
        vec![
            Vec3::new(-1.0, 0.0, -5.0),
            Vec3::new(1.0, 0.0, -5.0),
            Vec3::new(1.0, 0.0, 5.0),
            Vec3::new(-1.0, 0.0, 5.0),
        ],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .unwrap();
    let cut = disk_mesh_intersect(&unit_disk(Vec3::ZERO, Vec3::X), &mesh);
    assert_eq!(cut.components.len(), 1);
    let c = &cut.components[0];
    assert_eq!(c.ends, Some([EndpointClass::Rim; 2]));
    assert!((c.length - 2.0).abs() < 1e-12);
    for s in &cut.segments {
        for p in [s.a, s.b] {
            assert!(p.norm() <= 1.0 + 1e-9 && p.x.abs() <= 1e-9);
        }
    }
}

#[test]
fn component_lookup() {
    let mesh = TriMesh::new(
        vec![Vec3::new(-0.5, 0.0, -1.0), Vec3::new(0.5, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let cut = disk_mesh_intersect(&unit_disk(Vec3::ZERO, Vec3::Z), &mesh);
    let far = cut.component_containing(Vec3::new(0.25, 0.0, 0.0), 1e-6).unwrap();
    assert_eq!(far.point, Vec3::new(-0.25, 0.0, 0.0));
    assert!(matches!(cut.component_containing(Vec3::new(0.0, 0.5, 0.0), 1e-6), Err(Error::NoComponent { .. })));
}

fn thin_circle_strip(r: f64, width: f64, n: usize) -> AnnulusSurface {
    let p0 = circle_points(r, n, 0.0);
    let p1: Vec<Vec3> = p0.iter().map(|&p| p * ((r + width) / r)).collect();
    ruled_annulus(&p0, &p1).unwrap()
}

#[test]
fn index_matches_brute_force_and_partitions() {
    let sigma = thin_circle_strip(20.0, 0.3, 400);
    let index = MeshIndex::new(sigma.mesh());
    for k in 0..40 {
        let a = k as f64 * 0.157;
        let c = Vec3::new(20.1 * a.cos(), 20.1 * a.sin(), 0.05 * (k as f64).sin());
        let n = Vec3::new(-a.sin(), a.cos(), 0.2 * (k as f64).cos());
        let d = unit_disk(c, n);
        let brute = disk_mesh_intersect(&d, sigma.mesh());
        let fast = index.intersect(&d);
        assert_eq!(brute, fast);
        let mut seen = vec![0; brute.segments.len()];
        for comp in &brute.components {
            for &s in &comp.segments {
                seen[s] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let sum: f64 = brute.components.iter().map(|c| c.length).sum();
        assert!((sum - brute.total_length).abs() <= 1e-12);
    }
}

#[test]
fn invariant_under_reordering_and_rigid_motion() {
    let sigma = thin_circle_strip(10.0, 0.5, 200);
    let mesh = sigma.mesh();
    let d = unit_disk(Vec3::new(10.2, 0.1, 0.0), Vec3::new(0.1, 1.0, 0.3));
    let base = disk_mesh_intersect(&d, mesh).total_length;
    assert!(base > 0.0);

    let mut tris = mesh.triangles().to_vec();
    tris.reverse();
    tris.rotate_left(37);
    let shuffled = TriMesh::new(mesh.vertices().to_vec(), tris).unwrap();
    let l = disk_mesh_intersect(&d, &shuffled).total_length;
    assert!((l - base).abs() <= 1e-9 * base);

    let (c, s) = (0.6f64, 0.8f64);
    let rot = |p: Vec3| Vec3::new(c * p.x - s * p.z, p.y, s * p.x + c * p.z) + Vec3::new(3.0, -2.0, 7.0);
    let moved = TriMesh::new(mesh.vertices().iter().map(|&p| rot(p)).collect(), mesh.triangles().to_vec()).unwrap();
    let dn = rot(d.normal) - rot(Vec3::ZERO);
    let l = disk_mesh_intersect(&unit_disk(rot(d.center), dn), &moved).total_length;
    assert!((l - base).abs() <= 1e-9 * base);
}

#[test]
fn lambda_and_phi_on_hugging_strip() {
    let eps = 1e-2;
    let r = 2.0 / eps;
    let n = 2513;
    let p0 = circle_points(r, n, 0.0);
    let width = eps * eps / 2.0 / (2.0 * std::f64::consts::PI * r);
    let p1: Vec<Vec3> = p0.iter().map(|&p| p * ((r + width) / r)).collect();
    let sigma = ruled_annulus(&p0, &p1).unwrap();
    let curve0 = crate::geometry::DiscreteCurve::new(p0, true).unwrap();
    let curve1 = crate::geometry::DiscreteCurve::new(p1, true).unwrap();
    let index1 = crate::geometry::spatial::CurveIndex::new(&curve1);
    let sc = smooth(&curve0, make_cutoff()).unwrap();
    let asg = assign_disks(&sc).unwrap();
    let est = estimate_lambda(&asg, &sigma, (10.0, 11.5), eps, 200).unwrap();
    assert!(est.pass && est.fraction >= 1.0 - 2.0 * eps, "{}", est.fraction);
    assert_eq!(est.count(PhiClass::OnGamma1), 200);
    for (t, phi) in est.phi_on_gamma1() {
        let x = curve0.eval_point(t).unwrap();
        assert!(index1.closest(phi).distance < 1e-9);
        assert!(phi.distance(x) < 2.0 * width);
    }
    let audit = coarea_audit(&asg, &sigma, (10.0, 11.5), eps, 200).unwrap();
    assert!(audit.pass && (audit.ratio - 1.0).abs() < 0.01, "{audit:?}");
    assert!(estimate_lambda(&asg, &sigma, (0.0, 0.5), eps, 10).is_err());
}

#[test]
fn far_surface_gives_full_fraction() {
    let curve0 = stadium(100.0, 50.0, 400).unwrap();
    let sc = smooth(&curve0, make_cutoff()).unwrap();
    let asg = assign_disks(&sc).unwrap();
    let p0 = circle_points(1.0, 12, 0.0).into_iter().map(|p| p + Vec3::new(500.0, 0.0, 0.0)).collect::<Vec<_>>();
    let p1: Vec<Vec3> = p0.iter().map(|&p| p + Vec3::Z * 0.1).collect();
    let sigma = ruled_annulus(&p0, &p1).unwrap();
    let est = estimate_lambda(&asg, &sigma, (10.0, 12.0), 1e-3, 50).unwrap();
    assert_eq!(est.fraction, 1.0);
    assert!(est.samples.iter().all(|s| s.len == 0.0 && s.phi_class == PhiClass::Missing));
    let audit = coarea_audit(&asg, &sigma, (10.0, 12.0), 1e-3, 50).unwrap();
    assert_eq!(audit.integral_est, 0.0);
    assert!(audit.pass);
}

#[test]
fn straight_strip_coarea_ratio() {
    // ribbon of width 1e-3 around a 0.2 x 20 rectangle beside the straight
    // side of a stadium; every disk crosses it twice
    let curve0 = stadium(100.0, 50.0, 400).unwrap();
    let sc = smooth(&curve0, make_cutoff()).unwrap();
    let asg = assign_disks(&sc).unwrap();
    let w = 0.2;
    let ribbon = 1e-3;
    let zs: Vec<f64> = (0..=40).map(|i| -5.0 + 0.5 * i as f64).collect();
    let mut p0: Vec<Vec3> = zs.iter().map(|&z| Vec3::new(0.0, 0.3, z)).collect();
    let back: Vec<Vec3> = zs.iter().rev().map(|&z| Vec3::new(w, 0.3, z)).collect();
    p0.extend(back);
    let p1: Vec<Vec3> = p0.iter().map(|&p| p + Vec3::Y * ribbon).collect();
    let sigma = ruled_annulus(&p0, &p1).unwrap();
    let audit = coarea_audit(&asg, &sigma, (3.0, 5.0), 1e-3, 400).unwrap();
    assert!((audit.integral_est - 2.0 * ribbon * 2.0).abs() < 1e-12, "{audit:?}");
    assert!((audit.ratio - 1.0).abs() < 1e-6, "{audit:?}");
}

#[test]
fn fin_drops_samples_from_lambda() {
    let eps = 1e-2;
    let curve0 = stadium(100.0, 50.0, 400).unwrap();
    let sc = smooth(&curve0, make_cutoff()).unwrap();
    let asg = assign_disks(&sc).unwrap();
    // thin ribbon hugging the straight side, plus a fin crossing the disks near z = 10.5
    let zs: Vec<f64> = (0..=20).map(|i| 9.0 + 0.15 * i as f64).collect();
    let mut p0: Vec<Vec3> = zs.iter().map(|&z| Vec3::new(0.0, 0.0, z)).collect();
    p0.extend(zs.iter().rev().map(|&z| Vec3::new(1e-6, 0.0, z)));
    let p1: Vec<Vec3> = p0.iter().map(|&p| p + Vec3::Y * 1e-6).collect();
    let thin = ruled_annulus(&p0, &p1).unwrap();
    let base = estimate_lambda(&asg, &thin, (9.5, 11.5), eps, 100).unwrap();

    let fin0: Vec<Vec3> = (0..12)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            Vec3::new(0.5 * a.cos(), 0.5 * a.sin(), 10.5 + 0.02 * a.sin())
        })
        .collect();
    let fin1: Vec<Vec3> = fin0.iter().map(|&p| p + Vec3::Z * 0.05).collect();
    let fin = ruled_annulus(&fin0, &fin1).unwrap();
    let mut verts = thin.mesh().vertices().to_vec();
    let off = verts.len() as u32;
    verts.extend(fin.mesh().vertices());
    let mut tris = thin.mesh().triangles().to_vec();
    tris.extend(fin.mesh().triangles().iter().map(|t| t.map(|i| i + off)));
    // four boundary loops: build the surface view directly on the combined mesh
    let combined = TriMesh::new(verts, tris).unwrap();
    assert_eq!(combined.boundary_loops().len(), 4);
    let index = MeshIndex::new(&combined);
    let cfg = LambdaConfig { n_samples: 100, ..Default::default() };
    let with_fin = estimate_lambda_with(&asg, &thin, &index, (9.5, 11.5), eps, &cfg).unwrap();
    assert!(with_fin.fraction < base.fraction, "{} vs {}", with_fin.fraction, base.fraction);
    let dropped = base.samples.iter().zip(&with_fin.samples).filter(|(a, b)| a.in_lambda && !b.in_lambda).count();
    assert!(dropped > 0 && dropped < 100);
}
