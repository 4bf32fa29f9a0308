use std::f64::consts::PI;

use minsurf::shape::{
    classify, expected_symmetries, find_self_intersections, hits_on_symmetry_planes, ScanOptions,
};
use minsurf::{DomainRect, SurfaceSelector, SurfaceSpec, Vec3};

/// Normalized distance to the nearest vertical plane through the Z axis at
/// angle `k pi / m`.
fn dihedral_distance(p: Vec3, m: usize) -> f64 {
    (0..m)
        .map(|k| {
            let t = k as f64 * PI / m as f64;
            (p.y * t.cos() - p.x * t.sin()).abs()
        })
        .fold(f64::INFINITY, f64::min)
        / p.norm().max(1.0)
}

fn scan(n: i64, a: f64, res: usize) -> Vec<minsurf::shape::SelfIntersectionHit> {
    let spec = SurfaceSpec::new(n, 1.0).unwrap();
    let opts = ScanOptions::new(DomainRect::square(a).unwrap(), res);
    find_self_intersections(&spec, SurfaceSelector::Base, &opts).unwrap()
}

#[test]
fn hits_are_genuine_and_sorted() {
    let spec = SurfaceSpec::new(5, 1.0).unwrap();
    let hits = scan(5, 2.5, 64);
    assert!(!hits.is_empty());
    for h in &hits {
        let (a, b) = (spec.eval_surface(h.pt_a), spec.eval_surface(h.pt_b));
        assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        assert!(h.pt_a.distance(&h.pt_b) > 0.05 * 5.0);
    }
    assert!(hits.windows(2).all(|w| {
        let (p, q) = (w[0].position, w[1].position);
        (p.x, p.y, p.z) <= (q.x, q.y, q.z)
    }));
}

#[test]
fn scan_is_deterministic() {
    assert_eq!(scan(7, 2.0, 48), scan(7, 2.0, 48));
}

// Degree 9 belongs to class 4k+1, but the surface has 2(n-1)-fold dihedral
// symmetry, so its self-intersections also lie on the mirror planes at
// angles k pi / 8, not only on the four class planes.
#[test]
fn degree_nine_hits_lie_on_dihedral_planes() {
    let hits = scan(9, 1.5, 64);
    assert!(!hits.is_empty());
    let cases = expected_symmetries(classify(9).unwrap());
    let four = hits_on_symmetry_planes(&hits, &cases, 1e-6);
    assert!(!four.passed);
    let worst = hits
        .iter()
        .map(|h| dihedral_distance(h.position, 8))
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "worst dihedral distance {worst}");
}
