//! Grid-sweep certification suites: minimality, isothermality,
//! Cauchy-Riemann pairing, associate-family isometry and jet-vs-finite
//! difference agreement.
//!
//! Each suite evaluates every point independently and reduces with `max`,
//! so outcomes do not depend on evaluation order.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::diffgeo::{
    cauchy_riemann_residual, curvatures, default_fd_step, fd_jet_check, first_form,
    isometry_deviation_at, isothermal_residual_of,
};
use crate::numfmt::g17;
use crate::pq::ParamPoint;
use crate::surface::{SurfaceSelector, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    MeanCurvature,
    IsothermalF,
    IsothermalEg,
    CauchyRiemann,
    FirstFormDeviation,
    GaussianDeviation,
    JetFiniteDifference,
}

impl fmt::Display for ResidualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualKind::MeanCurvature => "mean_curvature",
            ResidualKind::IsothermalF => "isothermal_f",
            ResidualKind::IsothermalEg => "isothermal_e_minus_g",
            ResidualKind::CauchyRiemann => "cauchy_riemann",
            ResidualKind::FirstFormDeviation => "first_form_deviation",
            ResidualKind::GaussianDeviation => "gaussian_deviation",
            ResidualKind::JetFiniteDifference => "jet_fd",
        })
    }
}

/// One residual at one grid point. Displays as the report line
/// `<selector> <t> <u> <v> <kind> <value>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRecord {
    pub selector: SurfaceSelector,
    pub point: ParamPoint,
    pub kind: ResidualKind,
    pub value: f64,
}

impl fmt::Display for ResidualRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {}",
            self.selector.label(),
            g17(self.selector.phase()),
            g17(self.point.u),
            g17(self.point.v),
            self.kind,
            g17(self.value)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub tolerance: f64,
    pub checked: usize,
    /// Distinct singular parameter points left out of the suite.
    pub skipped: Vec<ParamPoint>,
    pub worst: Option<ResidualRecord>,
    pub failures: Vec<ResidualRecord>,
}

impl SuiteOutcome {
    fn collect(
        name: &'static str,
        tolerance: f64,
        per_point: Vec<(Vec<ResidualRecord>, Option<ParamPoint>)>,
    ) -> Self {
        let mut out = SuiteOutcome {
            name,
            tolerance,
            checked: 0,
            skipped: Vec::new(),
            worst: None,
            failures: Vec::new(),
        };
        for (records, skipped) in per_point {
            if let Some(p) = skipped {
                if !out.skipped.contains(&p) {
                    out.skipped.push(p);
                }
            }
            for rec in records {
                out.checked += 1;
                if out.worst.is_none_or(|w| rec.value > w.value) {
                    out.worst = Some(rec);
                }
                // NaN residuals count as failures
                if rec.value.partial_cmp(&tolerance) != Some(std::cmp::Ordering::Less) {
                    out.failures.push(rec);
                }
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn worst_value(&self) -> f64 {
        self.worst.map_or(0.0, |w| w.value)
    }
}

/// Associate-family phases plus the base and conjugate surfaces.
pub fn standard_selectors() -> Vec<SurfaceSelector> {
    let mut sel = vec![SurfaceSelector::Base, SurfaceSelector::Conjugate];
    sel.extend(
        crate::surface::deformation_phases()
            .into_iter()
            .map(SurfaceSelector::Family),
    );
    sel
}

fn sweep<F>(
    selectors: &[SurfaceSelector],
    points: &[ParamPoint],
    f: F,
) -> Vec<(Vec<ResidualRecord>, Option<ParamPoint>)>
where
    F: Fn(SurfaceSelector, ParamPoint) -> (Vec<ResidualRecord>, Option<ParamPoint>) + Sync,
{
    selectors
        .iter()
        .flat_map(|&sel| points.iter().map(move |&p| (sel, p)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(sel, p)| f(sel, p))
        .collect()
}

/// `|H| / (1 + sqrt|K|)` at every non-singular point.
pub fn minimality_suite(
    spec: &SurfaceSpec,
    selectors: &[SurfaceSelector],
    points: &[ParamPoint],
    tolerance: f64,
) -> SuiteOutcome {
    let per_point = sweep(selectors, points, |sel, p| {
        let c = curvatures(&spec.jet(sel, p));
        if c.singular {
            return (vec![], Some(p));
        }
        let rec = ResidualRecord {
            selector: sel,
            point: p,
            kind: ResidualKind::MeanCurvature,
            value: c.mean_residual(),
        };
        (vec![rec], None)
    });
    SuiteOutcome::collect("minimality", tolerance, per_point)
}

/// `|F| / max(E, G)` and `|E - G| / max(E, G)` at every non-singular point.
pub fn isothermal_suite(
    spec: &SurfaceSpec,
    selectors: &[SurfaceSelector],
    points: &[ParamPoint],
    tolerance: f64,
) -> SuiteOutcome {
    let per_point = sweep(selectors, points, |sel, p| {
        let r = isothermal_residual_of(&first_form(&spec.jet(sel, p)));
        if r.singular {
            return (vec![], Some(p));
        }
        let rec = |kind, value| ResidualRecord {
            selector: sel,
            point: p,
            kind,
            value,
        };
        (
            vec![
                rec(ResidualKind::IsothermalF, r.f_rel),
                rec(ResidualKind::IsothermalEg, r.eg_rel),
            ],
            None,
        )
    });
    SuiteOutcome::collect("isothermality", tolerance, per_point)
}

/// Largest per-coordinate Cauchy-Riemann residual between base and
/// conjugate at every point.
pub fn cauchy_riemann_suite(
    spec: &SurfaceSpec,
    points: &[ParamPoint],
    tolerance: f64,
) -> SuiteOutcome {
    let per_point = sweep(&[SurfaceSelector::Conjugate], points, |sel, p| {
        let r = cauchy_riemann_residual(spec, p);
        let rec = ResidualRecord {
            selector: sel,
            point: p,
            kind: ResidualKind::CauchyRiemann,
            value: r.into_iter().fold(0.0, f64::max),
        };
        (vec![rec], None)
    });
    SuiteOutcome::collect("cauchy_riemann", tolerance, per_point)
}

/// First fundamental form and Gaussian curvature of each family phase
/// against the base surface. Returns `(first_form, gaussian)` outcomes.
pub fn family_isometry_suite(
    spec: &SurfaceSpec,
    phases: &[f64],
    points: &[ParamPoint],
    form_tolerance: f64,
    gaussian_tolerance: f64,
) -> (SuiteOutcome, SuiteOutcome) {
    let selectors: Vec<SurfaceSelector> = phases
        .iter()
        .copied()
        .map(SurfaceSelector::Family)
        .collect();
    let per_point = sweep(&selectors, points, |sel, p| {
        let SurfaceSelector::Family(t) = sel else {
            unreachable!("family selectors only")
        };
        match isometry_deviation_at(spec, t, p) {
            Some((form, k)) => (
                vec![
                    ResidualRecord {
                        selector: sel,
                        point: p,
                        kind: ResidualKind::FirstFormDeviation,
                        value: form,
                    },
                    ResidualRecord {
                        selector: sel,
                        point: p,
                        kind: ResidualKind::GaussianDeviation,
                        value: k,
                    },
                ],
                None,
            ),
            None => (vec![], Some(p)),
        }
    });
    let split = |kind: ResidualKind| {
        per_point
            .iter()
            .map(|(recs, skip)| {
                (
                    recs.iter().filter(|r| r.kind == kind).copied().collect(),
                    *skip,
                )
            })
            .collect::<Vec<_>>()
    };
    (
        SuiteOutcome::collect(
            "family_isometry",
            form_tolerance,
            split(ResidualKind::FirstFormDeviation),
        ),
        SuiteOutcome::collect(
            "family_gaussian",
            gaussian_tolerance,
            split(ResidualKind::GaussianDeviation),
        ),
    )
}

/// Analytic jets against central differences with the default step.
pub fn jet_fd_suite(
    spec: &SurfaceSpec,
    selectors: &[SurfaceSelector],
    points: &[ParamPoint],
    tolerance: f64,
) -> SuiteOutcome {
    let per_point = sweep(selectors, points, |sel, p| {
        let rec = ResidualRecord {
            selector: sel,
            point: p,
            kind: ResidualKind::JetFiniteDifference,
            value: fd_jet_check(spec, sel, p, default_fd_step(p)),
        };
        (vec![rec], None)
    });
    SuiteOutcome::collect("jet_fd", tolerance, per_point)
}

/// Finite-difference tolerance by degree: `1e-6`, relaxed to `1e-5` for
/// `n >= 10` where truncation error grows.
pub fn fd_tolerance(degree: u32) -> f64 {
    if degree >= 10 {
        1e-5
    } else {
        1e-6
    }
}

/// Writes one line per failing record; nothing when every suite passed.
pub fn write_failure_report<W: Write>(
    outcomes: &[SuiteOutcome],
    sink: &mut W,
) -> std::io::Result<()> {
    for o in outcomes {
        for rec in &o.failures {
            writeln!(sink, "{rec}")?;
        }
    }
    Ok(())
}
