use std::f64::consts::{PI, TAU};

use minsurf::diffgeo::{curvatures, default_fd_step, fd_jet_check, first_form};
use minsurf::pq::{eval_direct, eval_recurrence, pq_jet};
use minsurf::shape::{classify, expected_symmetries, Involution};
use minsurf::{ParamPoint, SurfaceSelector, SurfaceSpec, Vec3};
use proptest::prelude::*;

/// `(u + iv)^n` in polar form.
fn cpow(n: i32, u: f64, v: f64) -> (f64, f64) {
    if n < 0 {
        return (0.0, 0.0);
    }
    let r = u.hypot(v).powi(n);
    let t = v.atan2(u) * f64::from(n);
    (r * t.cos(), r * t.sin())
}

fn oracle_surface(n: i32, w: f64, u: f64, v: f64) -> Vec3 {
    let c = 2.0 * (f64::from(n * (n - 2)) * w).sqrt() / f64::from(n - 1);
    let (pn, qn) = cpow(n, u, v);
    let (pm, qm) = cpow(n - 2, u, v);
    let (pc, _) = cpow(n - 1, u, v);
    Vec3::new(-pn + w * pm, qn + w * qm, c * pc)
}

fn oracle_conjugate(n: i32, w: f64, u: f64, v: f64) -> Vec3 {
    let c = 2.0 * (f64::from(n * (n - 2)) * w).sqrt() / f64::from(n - 1);
    let (pn, qn) = cpow(n, u, v);
    let (pm, qm) = cpow(n - 2, u, v);
    let (_, qc) = cpow(n - 1, u, v);
    Vec3::new(-qn + w * qm, -pn - w * pm, c * qc)
}

fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

fn coord() -> impl Strategy<Value = f64> {
    -2.0..=2.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pq_matches_polar_oracle(n in 0u32..=16, u in coord(), v in coord()) {
        let p = ParamPoint::new(u, v);
        let d = eval_direct(n, p).unwrap();
        let r = eval_recurrence(n, p)[n as usize];
        let (cp, cq) = cpow(n as i32, u, v);
        let scale = u.hypot(v).powi(n as i32).max(1.0);
        for (a, b) in [(d.p, cp), (d.q, cq), (r.p, cp), (r.q, cq)] {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn pq_parity(n in 0u32..=20, u in coord(), v in coord()) {
        let a = eval_direct(n, ParamPoint::new(u, v)).unwrap();
        let neg = eval_direct(n, ParamPoint::new(-u, -v)).unwrap();
        let mirror = eval_direct(n, ParamPoint::new(u, -v)).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(neg.p, sign * a.p);
        prop_assert_eq!(neg.q, sign * a.q);
        prop_assert_eq!(mirror.p, a.p);
        prop_assert_eq!(mirror.q, -a.q);
    }

    #[test]
    fn pq_jet_is_complex_derivative(n in 1u32..=16, u in coord(), v in coord()) {
        let j = pq_jet(n, ParamPoint::new(u, v));
        // d/du z^n = n z^(n-1), d/dv z^n = i n z^(n-1)
        let (a, b) = cpow(n as i32 - 1, u, v);
        let k = f64::from(n);
        let scale = k * u.hypot(v).powi(n as i32 - 1).max(1.0);
        for (got, want) in [(j.p_u, k * a), (j.q_u, k * b), (j.p_v, -k * b), (j.q_v, k * a)] {
            prop_assert!((got - want).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn surface_matches_polar_oracle(n in 3i64..=12, w in 0.0..=3.0f64, u in coord(), v in coord()) {
        let spec = SurfaceSpec::new(n, w).unwrap();
        let p = ParamPoint::new(u, v);
        prop_assert!(close(spec.eval_surface(p), oracle_surface(n as i32, w, u, v), 1e-12));
        prop_assert!(close(spec.eval_conjugate(p), oracle_conjugate(n as i32, w, u, v), 1e-12));
    }

    #[test]
    fn family_blends_base_and_conjugate(n in 3i64..=12, t in -TAU..=TAU, u in coord(), v in coord()) {
        let spec = SurfaceSpec::new(n, 1.0).unwrap();
        let p = ParamPoint::new(u, v);
        let want = spec.eval_surface(p) * t.cos() + spec.eval_conjugate(p) * t.sin();
        prop_assert!(close(spec.eval_family(t, p), want, 1e-12));
        prop_assert!(close(spec.eval_family(t + TAU, p), spec.eval_family(t, p), 1e-12));
    }

    #[test]
    fn every_family_member_is_minimal_and_isothermal(
        n in 3i64..=12, w in 0.1..=3.0f64, t in 0.0..=PI, u in -1.0..=1.0f64, v in -1.0..=1.0f64,
    ) {
        let spec = SurfaceSpec::new(n, w).unwrap();
        let jet = spec.jet(SurfaceSelector::Family(t), ParamPoint::new(u, v));
        let c = curvatures(&jet);
        prop_assume!(!c.singular);
        prop_assert!(c.mean_residual() < 1e-8);
        let f = first_form(&jet);
        let m = f.e.max(f.g);
        prop_assert!(f.f.abs() < 1e-10 * m && (f.e - f.g).abs() < 1e-10 * m);
        // harmonic coordinates
        prop_assert!((jet.d_uu + jet.d_vv).norm() <= 1e-10 * jet.derivative_scale());
    }

    #[test]
    fn jets_match_finite_differences(n in 3i64..=9, u in -1.0..=1.0f64, v in -1.0..=1.0f64) {
        let spec = SurfaceSpec::new(n, 1.0).unwrap();
        let p = ParamPoint::new(u, v);
        for sel in [SurfaceSelector::Base, SurfaceSelector::Conjugate, SurfaceSelector::Family(0.7)] {
            prop_assert!(fd_jet_check(&spec, sel, p, default_fd_step(p)) < 1e-6);
        }
    }

    #[test]
    fn involutions_are_exact(u in coord(), v in coord()) {
        let p = ParamPoint::new(u, v);
        for inv in [
            Involution::NegateU,
            Involution::NegateV,
            Involution::NegateBoth,
            Involution::Swap,
            Involution::NegatedSwap,
        ] {
            prop_assert_eq!(inv.apply(inv.apply(p)), p);
        }
    }

    #[test]
    fn symmetry_cases_hold_pointwise(n in 3i64..=12, u in coord(), v in coord()) {
        let spec = SurfaceSpec::new(n, 1.0).unwrap();
        let p = ParamPoint::new(u, v);
        for case in expected_symmetries(classify(n).unwrap()) {
            let a = spec.eval_surface(case.involution.apply(p));
            let b = case.plane.reflect(spec.eval_surface(p));
            prop_assert!(close(a, b, 1e-12), "{case} at {p:?}");
        }
    }

    #[test]
    fn classification_depends_on_residue(n in 3i64..=400) {
        let a = classify(n).unwrap();
        let b = classify(n + 4).unwrap();
        prop_assert_eq!(a.label, b.label);
        prop_assert_eq!(a.k + 1, b.k);
    }
}

#[test]
fn rejects_invalid_specs() {
    assert!(SurfaceSpec::new(2, 1.0).is_err());
    assert!(SurfaceSpec::new(3, -1.0).is_err());
    assert!(SurfaceSpec::new(3, f64::NAN).is_err());
    let flat = SurfaceSpec::new(4, 0.0).unwrap();
    assert!(flat.is_degenerate_planar());
    assert_eq!(flat.eval_surface(ParamPoint::new(0.7, -0.3)).z, 0.0);
}
