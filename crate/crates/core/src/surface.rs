//! The degree-`n` polynomial minimal surface `r`, its conjugate `s` and the
//! associate family `C_t = cos(t) r + sin(t) s`.
//!
//! ```text
//! r = (-P_n + w P_{n-2},  Q_n + w Q_{n-2},  c P_{n-1})
//! s = (-Q_n + w Q_{n-2}, -P_n - w P_{n-2},  c Q_{n-1})
//! c = 2 sqrt(n (n-2) w) / (n-1)
//! ```

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::pq::{PQJet, ParamPoint, PqTable};

pub type Vec3 = Vector3<f64>;

/// Ambient point `(X, Y, Z)`.
pub type SurfacePoint = Vec3;

/// One member of the family: degree `n >= 3` and shape parameter `omega >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSpec {
    n: u32,
    omega: f64,
    z_coefficient: f64,
}

impl SurfaceSpec {
    pub fn new(n: i64, omega: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::DegreeTooLow(n));
        }
        let n = u32::try_from(n).map_err(|_| Error::DegreeTooHigh {
            degree: u32::MAX,
            max: u32::MAX - 1,
        })?;
        if omega.is_nan() || omega.is_infinite() {
            return Err(Error::NonFinite(omega));
        }
        if omega < 0.0 {
            return Err(Error::NegativeOmega(omega));
        }
        let nf = f64::from(n);
        let z_coefficient = 2.0 * (nf * (nf - 2.0) * omega).sqrt() / (nf - 1.0);
        Ok(Self {
            n,
            omega,
            z_coefficient,
        })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn z_coefficient(&self) -> f64 {
        self.z_coefficient
    }

    /// `omega == 0`: the image collapses into the plane `Z = 0`.
    pub fn is_degenerate_planar(&self) -> bool {
        self.omega == 0.0
    }

    pub fn eval_surface(&self, pt: ParamPoint) -> SurfacePoint {
        let t = PqTable::new(self.n, pt);
        let n = i64::from(self.n);
        Vec3::new(
            -t.p(n) + self.omega * t.p(n - 2),
            t.q(n) + self.omega * t.q(n - 2),
            self.z_coefficient * t.p(n - 1),
        )
    }

    pub fn eval_conjugate(&self, pt: ParamPoint) -> SurfacePoint {
        let t = PqTable::new(self.n, pt);
        let n = i64::from(self.n);
        Vec3::new(
            -t.q(n) + self.omega * t.q(n - 2),
            -t.p(n) - self.omega * t.p(n - 2),
            self.z_coefficient * t.q(n - 1),
        )
    }

    pub fn eval_family(&self, t: f64, pt: ParamPoint) -> SurfacePoint {
        let (s, c) = t.sin_cos();
        blend(c, self.eval_surface(pt), s, self.eval_conjugate(pt))
    }

    pub fn eval(&self, selector: SurfaceSelector, pt: ParamPoint) -> SurfacePoint {
        match selector {
            SurfaceSelector::Base => self.eval_surface(pt),
            SurfaceSelector::Conjugate => self.eval_conjugate(pt),
            SurfaceSelector::Family(t) => self.eval_family(t, pt),
        }
    }

    /// Position and analytic first/second partials. Base and conjugate
    /// share one recurrence sweep.
    pub fn jet(&self, selector: SurfaceSelector, pt: ParamPoint) -> SurfaceJet {
        let table = PqTable::new(self.n, pt);
        match selector {
            SurfaceSelector::Base => self.base_jet(&table),
            SurfaceSelector::Conjugate => self.conjugate_jet(&table),
            SurfaceSelector::Family(t) => {
                let (s, c) = t.sin_cos();
                if s == 0.0 {
                    self.base_jet(&table) * c
                } else {
                    self.base_jet(&table) * c + self.conjugate_jet(&table) * s
                }
            }
        }
    }

    fn base_jet(&self, table: &PqTable) -> SurfaceJet {
        let (jn, jn1, jn2) = self.pq_jets(table);
        let w = self.omega;
        SurfaceJet::from_coordinates(
            ScalarJet::p(&jn) * -1.0 + ScalarJet::p(&jn2) * w,
            ScalarJet::q(&jn) + ScalarJet::q(&jn2) * w,
            ScalarJet::p(&jn1) * self.z_coefficient,
        )
    }

    fn conjugate_jet(&self, table: &PqTable) -> SurfaceJet {
        let (jn, jn1, jn2) = self.pq_jets(table);
        let w = self.omega;
        SurfaceJet::from_coordinates(
            ScalarJet::q(&jn) * -1.0 + ScalarJet::q(&jn2) * w,
            ScalarJet::p(&jn) * -1.0 + ScalarJet::p(&jn2) * -w,
            ScalarJet::q(&jn1) * self.z_coefficient,
        )
    }

    fn pq_jets(&self, table: &PqTable) -> (PQJet, PQJet, PQJet) {
        (
            table.jet(self.n),
            table.jet(self.n - 1),
            table.jet(self.n - 2),
        )
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} omega={}", self.n, self.omega)
    }
}

/// `a * p + b * q`, returning `a * p` untouched when `b == 0` so that
/// `C_0` reproduces `r` bit for bit (signed zeros included).
fn blend(a: f64, p: Vec3, b: f64, q: Vec3) -> Vec3 {
    if b == 0.0 {
        p * a
    } else {
        p * a + q * b
    }
}

/// Which surface of the family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceSelector {
    Base,
    Conjugate,
    /// Associate family member at phase `t` (any real).
    Family(f64),
}

impl SurfaceSelector {
    /// Phase of the selector, reduced to `[0, 2pi)`.
    pub fn phase(&self) -> f64 {
        match *self {
            SurfaceSelector::Base => 0.0,
            SurfaceSelector::Conjugate => FRAC_PI_2,
            SurfaceSelector::Family(t) => t.rem_euclid(TAU),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SurfaceSelector::Base => "base",
            SurfaceSelector::Conjugate => "conjugate",
            SurfaceSelector::Family(_) => "family",
        }
    }
}

impl fmt::Display for SurfaceSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSelector::Family(_) => write!(f, "family(t={})", self.phase()),
            other => f.write_str(other.label()),
        }
    }
}

/// Phases `0, pi/10, ..., pi/2` of the standard deformation sequence.
pub fn deformation_phases() -> [f64; 6] {
    std::array::from_fn(|i| i as f64 * std::f64::consts::PI / 10.0)
}

/// Position and partial derivatives of a surface at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub position: SurfacePoint,
    pub d_u: Vec3,
    pub d_v: Vec3,
    pub d_uu: Vec3,
    pub d_uv: Vec3,
    pub d_vv: Vec3,
}

impl SurfaceJet {
    fn from_coordinates(x: ScalarJet, y: ScalarJet, z: ScalarJet) -> Self {
        let pick = |f: fn(&ScalarJet) -> f64| Vec3::new(f(&x), f(&y), f(&z));
        Self {
            position: pick(|j| j.f),
            d_u: pick(|j| j.f_u),
            d_v: pick(|j| j.f_v),
            d_uu: pick(|j| j.f_uu),
            d_uv: pick(|j| j.f_uv),
            d_vv: pick(|j| j.f_vv),
        }
    }

    /// Largest norm among the five derivative vectors, floored at 1.
    pub fn derivative_scale(&self) -> f64 {
        [self.d_u, self.d_v, self.d_uu, self.d_uv, self.d_vv]
            .iter()
            .fold(1.0, |m, d| m.max(d.norm()))
    }
}

impl Mul<f64> for SurfaceJet {
    type Output = SurfaceJet;

    fn mul(self, a: f64) -> SurfaceJet {
        SurfaceJet {
            position: self.position * a,
            d_u: self.d_u * a,
            d_v: self.d_v * a,
            d_uu: self.d_uu * a,
            d_uv: self.d_uv * a,
            d_vv: self.d_vv * a,
        }
    }
}

impl Add for SurfaceJet {
    type Output = SurfaceJet;

    fn add(self, o: SurfaceJet) -> SurfaceJet {
        SurfaceJet {
            position: self.position + o.position,
            d_u: self.d_u + o.d_u,
            d_v: self.d_v + o.d_v,
            d_uu: self.d_uu + o.d_uu,
            d_uv: self.d_uv + o.d_uv,
            d_vv: self.d_vv + o.d_vv,
        }
    }
}

/// Jet of one scalar coordinate function.
#[derive(Debug, Clone, Copy)]
struct ScalarJet {
    f: f64,
    f_u: f64,
    f_v: f64,
    f_uu: f64,
    f_uv: f64,
    f_vv: f64,
}

impl ScalarJet {
    fn p(j: &PQJet) -> Self {
        Self {
            f: j.p,
            f_u: j.p_u,
            f_v: j.p_v,
            f_uu: j.p_uu,
            f_uv: j.p_uv,
            f_vv: j.p_vv,
        }
    }

    fn q(j: &PQJet) -> Self {
        Self {
            f: j.q,
            f_u: j.q_u,
            f_v: j.q_v,
            f_uu: j.q_uu,
            f_uv: j.q_uv,
            f_vv: j.q_vv,
        }
    }
}

impl Mul<f64> for ScalarJet {
    type Output = ScalarJet;

    fn mul(self, a: f64) -> ScalarJet {
        ScalarJet {
            f: self.f * a,
            f_u: self.f_u * a,
            f_v: self.f_v * a,
            f_uu: self.f_uu * a,
            f_uv: self.f_uv * a,
            f_vv: self.f_vv * a,
        }
    }
}

impl Add for ScalarJet {
    type Output = ScalarJet;

    fn add(self, o: ScalarJet) -> ScalarJet {
        ScalarJet {
            f: self.f + o.f,
            f_u: self.f_u + o.f_u,
            f_v: self.f_v + o.f_v,
            f_uu: self.f_uu + o.f_uu,
            f_uv: self.f_uv + o.f_uv,
            f_vv: self.f_vv + o.f_vv,
        }
    }
}

/// Cubic member written out in monomials (the Enneper surface).
pub fn enneper_closed_form(omega: f64, pt: ParamPoint) -> SurfacePoint {
    let ParamPoint { u, v } = pt;
    Vec3::new(
        -(u * u * u - 3.0 * u * v * v) + omega * u,
        -(v * v * v - 3.0 * v * u * u) + omega * v,
        (3.0 * omega).sqrt() * (u * u - v * v),
    )
}

/// Quintic surface in the monomial form found in the literature.
///
/// This form is the degree-5 member composed with the reflection
/// `(u, v) -> (u, -v)`: its `Y` coordinate carries the opposite sign.
pub fn quintic_closed_form(omega: f64, pt: ParamPoint) -> SurfacePoint {
    let ParamPoint { u, v } = pt;
    let (u2, v2) = (u * u, v * v);
    Vec3::new(
        -(u2 * u2 * u - 10.0 * u2 * u * v2 + 5.0 * u * v2 * v2) + omega * u * (u2 - 3.0 * v2),
        -(v2 * v2 * v - 10.0 * v2 * v * u2 + 5.0 * v * u2 * u2) + omega * v * (v2 - 3.0 * u2),
        (15.0 * omega).sqrt() / 2.0 * (u2 * u2 - 6.0 * u2 * v2 + v2 * v2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn make_surface_validation() {
        let s = SurfaceSpec::new(3, 1.0).unwrap();
        assert!((s.z_coefficient() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(SurfaceSpec::new(2, 1.0), Err(Error::DegreeTooLow(2)));
        assert_eq!(SurfaceSpec::new(-4, 1.0), Err(Error::DegreeTooLow(-4)));
        assert_eq!(SurfaceSpec::new(5, -1.0), Err(Error::NegativeOmega(-1.0)));
        let flat = SurfaceSpec::new(5, 0.0).unwrap();
        assert!(flat.is_degenerate_planar());
        assert_eq!(flat.z_coefficient(), 0.0);
        assert!(!s.is_degenerate_planar());
    }

    #[test]
    fn base_examples() {
        let s3 = SurfaceSpec::new(3, 1.0).unwrap();
        assert!(close(
            s3.eval_surface(ParamPoint::new(1.0, 0.0)),
            Vec3::new(0.0, 0.0, 3f64.sqrt()),
            1e-15
        ));
        assert_eq!(
            s3.eval_surface(ParamPoint::new(1.0, 1.0)),
            Vec3::new(3.0, 3.0, 0.0)
        );
        let s5 = SurfaceSpec::new(5, 1.0).unwrap();
        assert!(close(
            s5.eval_surface(ParamPoint::new(1.0, 0.0)),
            Vec3::new(0.0, 0.0, 15f64.sqrt() / 2.0),
            1e-15
        ));
    }

    #[test]
    fn conjugate_examples() {
        let s3 = SurfaceSpec::new(3, 1.0).unwrap();
        assert_eq!(
            s3.eval_conjugate(ParamPoint::new(1.0, 0.0)),
            Vec3::new(0.0, -2.0, 0.0)
        );
        assert_eq!(
            s3.eval_conjugate(ParamPoint::new(0.0, 0.0)),
            Vec3::new(0.0, 0.0, 0.0)
        );
        let s5 = SurfaceSpec::new(5, 1.0).unwrap();
        assert!(close(
            s5.eval_conjugate(ParamPoint::new(2.0, 1.0)),
            Vec3::new(-30.0, 36.0, 12.0 * 15f64.sqrt()),
            1e-15
        ));
    }

    #[test]
    fn family_examples() {
        let s3 = SurfaceSpec::new(3, 1.0).unwrap();
        let pt = ParamPoint::new(0.7, -1.3);
        assert_eq!(s3.eval_family(0.0, pt), s3.eval_surface(pt));
        assert!(close(
            s3.eval_family(FRAC_PI_2, pt),
            s3.eval_conjugate(pt),
            1e-15
        ));
        let got = s3.eval_family(PI / 4.0, ParamPoint::new(1.0, 0.0));
        let want = Vec3::new(0.0, -2f64.sqrt(), 6f64.sqrt() / 2.0);
        assert!(close(got, want, 1e-15), "{got:?}");
    }

    #[test]
    fn jet_examples() {
        let s3 = SurfaceSpec::new(3, 1.0).unwrap();
        let j = s3.jet(SurfaceSelector::Base, ParamPoint::new(1.0, 0.0));
        assert!(close(j.d_u, Vec3::new(-2.0, 0.0, 2.0 * 3f64.sqrt()), 1e-15));
        assert_eq!(j.d_v, Vec3::new(0.0, 4.0, 0.0));
        let j = s3.jet(SurfaceSelector::Base, ParamPoint::new(0.0, 0.0));
        assert_eq!(j.d_u, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(j.d_v, Vec3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn jet_position_matches_eval() {
        let spec = SurfaceSpec::new(7, 2.0).unwrap();
        let pt = ParamPoint::new(0.3, -0.7);
        for sel in [
            SurfaceSelector::Base,
            SurfaceSelector::Conjugate,
            SurfaceSelector::Family(0.4),
        ] {
            let j = spec.jet(sel, pt);
            assert!(close(j.position, spec.eval(sel, pt), 1e-15), "{sel}");
        }
        assert_eq!(
            spec.jet(SurfaceSelector::Family(0.0), pt),
            spec.jet(SurfaceSelector::Base, pt)
        );
    }

    #[test]
    fn selector_phase_reduction() {
        assert_eq!(SurfaceSelector::Base.phase(), 0.0);
        assert_eq!(SurfaceSelector::Conjugate.phase(), FRAC_PI_2);
        assert!((SurfaceSelector::Family(-PI / 2.0).phase() - 1.5 * PI).abs() < 1e-15);
        assert!((SurfaceSelector::Family(5.0 * PI).phase() - PI).abs() < 1e-14);
    }

    #[test]
    fn deformation_schedule() {
        let ph = deformation_phases();
        assert_eq!(ph[0], 0.0);
        assert!((ph[5] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn quintic_form_is_y_mirror() {
        let s5 = SurfaceSpec::new(5, 1.0).unwrap();
        let pt = ParamPoint::new(1.1, 0.6);
        let r = s5.eval_surface(pt);
        let c = quintic_closed_form(1.0, pt);
        assert!((r.x - c.x).abs() < 1e-12 * r.norm());
        assert!((r.y + c.y).abs() < 1e-12 * r.norm());
        assert!((r.z - c.z).abs() < 1e-12 * r.norm());
    }
}
