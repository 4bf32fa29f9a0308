//! Fundamental forms, normals and curvatures computed from analytic jets,
//! plus the pointwise residuals used by the certification suites.

use crate::pq::ParamPoint;
use crate::surface::{SurfaceJet, SurfaceSelector, SurfaceSpec, Vec3};

/// Threshold on `(EG - F^2) / (E + G)^2` below which a point is singular.
pub const SINGULAR_EPS: f64 = 1e-14;

/// First fundamental form `E du^2 + 2F du dv + G dv^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl FirstForm {
    pub fn determinant(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// The normal is undefined where the metric degenerates. At a branch
    /// point `E = F = G = 0` exactly, which this also catches.
    pub fn is_singular(&self) -> bool {
        let trace = self.e + self.g;
        self.determinant() <= SINGULAR_EPS * trace * trace
    }
}

pub fn first_form(jet: &SurfaceJet) -> FirstForm {
    FirstForm {
        e: jet.d_u.dot(&jet.d_u),
        f: jet.d_u.dot(&jet.d_v),
        g: jet.d_v.dot(&jet.d_v),
    }
}

/// Both fundamental forms. The second form coefficients are zero at
/// singular points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub nn: f64,
    pub area_element: f64,
}

impl FundamentalForms {
    pub fn first(&self) -> FirstForm {
        FirstForm {
            e: self.e,
            f: self.f,
            g: self.g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub forms: FundamentalForms,
    /// Mean curvature `H`; NaN when singular.
    pub mean: f64,
    /// Gaussian curvature `K`; NaN when singular.
    pub gaussian: f64,
    /// Zero vector when singular.
    pub unit_normal: Vec3,
    pub singular: bool,
}

impl CurvatureReport {
    /// `|H|` relative to the principal curvature scale `sqrt|K|`, floored at 1.
    pub fn mean_residual(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        self.mean.abs() / (1.0 + self.gaussian.abs().sqrt())
    }
}

pub fn curvatures(jet: &SurfaceJet) -> CurvatureReport {
    let first = first_form(jet);
    let det = first.determinant();
    if first.is_singular() {
        return CurvatureReport {
            forms: FundamentalForms {
                e: first.e,
                f: first.f,
                g: first.g,
                l: 0.0,
                m: 0.0,
                nn: 0.0,
                area_element: det.max(0.0).sqrt(),
            },
            mean: f64::NAN,
            gaussian: f64::NAN,
            unit_normal: Vec3::zeros(),
            singular: true,
        };
    }
    let normal = jet.d_u.cross(&jet.d_v).normalize();
    let (l, m, nn) = (
        jet.d_uu.dot(&normal),
        jet.d_uv.dot(&normal),
        jet.d_vv.dot(&normal),
    );
    let FirstForm { e, f, g } = first;
    CurvatureReport {
        forms: FundamentalForms {
            e,
            f,
            g,
            l,
            m,
            nn,
            area_element: det.sqrt(),
        },
        mean: (e * nn - 2.0 * f * m + g * l) / (2.0 * det),
        gaussian: (l * nn - m * m) / det,
        unit_normal: normal,
        singular: false,
    }
}

/// Upper bound `(|r_uu|^2 + |r_uv|^2) / (EG - F^2)` on `|K|` for a harmonic
/// jet; the magnitude Gaussian curvature deviations are measured against.
pub fn gaussian_scale(jet: &SurfaceJet) -> f64 {
    let det = first_form(jet).determinant();
    (jet.d_uu.norm_squared() + jet.d_uv.norm_squared()) / det
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsothermalResidual {
    /// `|F| / max(E, G)`
    pub f_rel: f64,
    /// `|E - G| / max(E, G)`
    pub eg_rel: f64,
    pub singular: bool,
}

impl IsothermalResidual {
    pub fn max(&self) -> f64 {
        self.f_rel.max(self.eg_rel)
    }
}

pub fn isothermal_residual(
    spec: &SurfaceSpec,
    selector: SurfaceSelector,
    pt: ParamPoint,
) -> IsothermalResidual {
    isothermal_residual_of(&first_form(&spec.jet(selector, pt)))
}

pub fn isothermal_residual_of(form: &FirstForm) -> IsothermalResidual {
    let denom = form.e.max(form.g).max(f64::MIN_POSITIVE);
    IsothermalResidual {
        f_rel: form.f.abs() / denom,
        eg_rel: (form.e - form.g).abs() / denom,
        singular: form.is_singular(),
    }
}

/// Per-coordinate residual of `dc/du = dc_s/dv`, `dc/dv = -dc_s/du` between
/// the base surface and its conjugate.
pub fn cauchy_riemann_residual(spec: &SurfaceSpec, pt: ParamPoint) -> [f64; 3] {
    let r = spec.jet(SurfaceSelector::Base, pt);
    let s = spec.jet(SurfaceSelector::Conjugate, pt);
    std::array::from_fn(|c| {
        let scale = [r.d_u[c], r.d_v[c], s.d_u[c], s.d_v[c]]
            .iter()
            .fold(1f64, |m, x| m.max(x.abs()));
        let a = (r.d_u[c] - s.d_v[c]).abs();
        let b = (r.d_v[c] + s.d_u[c]).abs();
        a.max(b) / scale
    })
}

/// Deviation of the phase-`t` family member from the base surface.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IsometryDeviation {
    /// Max over points of `max(|dE|, |dF|, |dG|) / max(E_0, G_0)`.
    pub first_form: f64,
    /// Max over points of `|K_t - K_0| / max(|K_0|, K_scale)`.
    pub gaussian: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// First form and Gaussian curvature deviations at a single point, or
/// `None` when the point is singular.
pub fn isometry_deviation_at(spec: &SurfaceSpec, t: f64, pt: ParamPoint) -> Option<(f64, f64)> {
    let j0 = spec.jet(SurfaceSelector::Base, pt);
    let jt = spec.jet(SurfaceSelector::Family(t), pt);
    let (c0, ct) = (curvatures(&j0), curvatures(&jt));
    if c0.singular || ct.singular {
        return None;
    }
    let (a, b) = (c0.forms, ct.forms);
    let denom = a.e.max(a.g);
    let form_dev = (a.e - b.e)
        .abs()
        .max((a.f - b.f).abs())
        .max((a.g - b.g).abs())
        / denom;
    let k_denom = c0.gaussian.abs().max(gaussian_scale(&j0));
    let k_dev = if k_denom == 0.0 {
        (c0.gaussian - ct.gaussian).abs()
    } else {
        (c0.gaussian - ct.gaussian).abs() / k_denom
    };
    Some((form_dev, k_dev))
}

pub fn family_isometry_check(
    spec: &SurfaceSpec,
    t: f64,
    points: impl IntoIterator<Item = ParamPoint>,
) -> IsometryDeviation {
    points
        .into_iter()
        .fold(IsometryDeviation::default(), |mut acc, pt| {
            match isometry_deviation_at(spec, t, pt) {
                Some((f, k)) => {
                    acc.first_form = acc.first_form.max(f);
                    acc.gaussian = acc.gaussian.max(k);
                    acc.checked += 1;
                }
                None => acc.skipped += 1,
            }
            acc
        })
}

/// Step used for the second-difference quotients, relative to the first.
const SECOND_DIFFERENCE_STEP_RATIO: f64 = 10.0;

/// Central-difference estimate of a jet from positions alone. First
/// partials use step `h`; second partials use `10 h`.
pub fn finite_difference_jet(
    spec: &SurfaceSpec,
    selector: SurfaceSelector,
    pt: ParamPoint,
    h: f64,
) -> SurfaceJet {
    let r = |du: f64, dv: f64| spec.eval(selector, ParamPoint::new(pt.u + du, pt.v + dv));
    let k = h * SECOND_DIFFERENCE_STEP_RATIO;
    let center = r(0.0, 0.0);
    SurfaceJet {
        position: center,
        d_u: (r(h, 0.0) - r(-h, 0.0)) / (2.0 * h),
        d_v: (r(0.0, h) - r(0.0, -h)) / (2.0 * h),
        d_uu: (r(k, 0.0) - center * 2.0 + r(-k, 0.0)) / (k * k),
        d_vv: (r(0.0, k) - center * 2.0 + r(0.0, -k)) / (k * k),
        d_uv: (r(k, k) - r(k, -k) - r(-k, k) + r(-k, -k)) / (4.0 * k * k),
    }
}

/// Default finite-difference step at `pt`: `1e-5 * max(1, |u|, |v|)`.
pub fn default_fd_step(pt: ParamPoint) -> f64 {
    1e-5 * pt.scale()
}

/// Largest error between analytic and central-difference partials,
/// relative to the largest analytic partial (floored at 1).
pub fn fd_jet_check(spec: &SurfaceSpec, selector: SurfaceSelector, pt: ParamPoint, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let exact = spec.jet(selector, pt);
    let approx = finite_difference_jet(spec, selector, pt, h);
    let scale = exact.derivative_scale();
    [
        exact.d_u - approx.d_u,
        exact.d_v - approx.d_v,
        exact.d_uu - approx.d_uu,
        exact.d_uv - approx.d_uv,
        exact.d_vv - approx.d_vv,
    ]
    .iter()
    .fold(0f64, |m, d| m.max(d.norm()))
        / scale
}
