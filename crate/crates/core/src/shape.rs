//! Symmetry classes, straight lines and self-intersections of the base
//! surface.
//!
//! Every symmetry is checked as an identity `reflect(r(u, v)) = r(g(u, v))`
//! for a parameter involution `g`, which turns each plane symmetry into a
//! pointwise floating-point comparison.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use nalgebra::{Matrix3x4, Vector4};
use rayon::prelude::*;

use crate::domain::{DomainRect, SampleGrid};
use crate::error::{Error, Result};
use crate::pq::ParamPoint;
use crate::surface::{SurfacePoint, SurfaceSelector, SurfaceSpec, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    FourKMinus1,
    FourK,
    FourKPlus1,
    FourKPlus2,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::FourKMinus1 => "4k-1",
            ClassLabel::FourK => "4k",
            ClassLabel::FourKPlus1 => "4k+1",
            ClassLabel::FourKPlus2 => "4k+2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymmetryClass {
    pub label: ClassLabel,
    pub k: u32,
}

impl SymmetryClass {
    pub fn degree(&self) -> u32 {
        let base = 4 * self.k;
        match self.label {
            ClassLabel::FourKMinus1 => base - 1,
            ClassLabel::FourK => base,
            ClassLabel::FourKPlus1 => base + 1,
            ClassLabel::FourKPlus2 => base + 2,
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (k={})", self.label, self.k)
    }
}

pub fn classify(n: i64) -> Result<SymmetryClass> {
    if n < 3 {
        return Err(Error::DegreeTooLow(n));
    }
    let n =
        u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("degree {n} too large")))?;
    let (label, k) = match n % 4 {
        3 => (ClassLabel::FourKMinus1, (n + 1) / 4),
        0 => (ClassLabel::FourK, n / 4),
        1 => (ClassLabel::FourKPlus1, (n - 1) / 4),
        _ => (ClassLabel::FourKPlus2, (n - 2) / 4),
    };
    Ok(SymmetryClass { label, k })
}

/// Planes through the origin the surface may be symmetric about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryPlane {
    X0,
    Y0,
    Z0,
    XEqY,
    XEqNegY,
}

impl SymmetryPlane {
    pub fn reflect(&self, p: SurfacePoint) -> SurfacePoint {
        match self {
            SymmetryPlane::X0 => Vec3::new(-p.x, p.y, p.z),
            SymmetryPlane::Y0 => Vec3::new(p.x, -p.y, p.z),
            SymmetryPlane::Z0 => Vec3::new(p.x, p.y, -p.z),
            SymmetryPlane::XEqY => Vec3::new(p.y, p.x, p.z),
            SymmetryPlane::XEqNegY => Vec3::new(-p.y, -p.x, p.z),
        }
    }

    pub fn distance(&self, p: SurfacePoint) -> f64 {
        match self {
            SymmetryPlane::X0 => p.x.abs(),
            SymmetryPlane::Y0 => p.y.abs(),
            SymmetryPlane::Z0 => p.z.abs(),
            SymmetryPlane::XEqY => (p.x - p.y).abs() / std::f64::consts::SQRT_2,
            SymmetryPlane::XEqNegY => (p.x + p.y).abs() / std::f64::consts::SQRT_2,
        }
    }
}

impl fmt::Display for SymmetryPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryPlane::X0 => "X=0",
            SymmetryPlane::Y0 => "Y=0",
            SymmetryPlane::Z0 => "Z=0",
            SymmetryPlane::XEqY => "X=Y",
            SymmetryPlane::XEqNegY => "X=-Y",
        })
    }
}

/// Parameter-plane involutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Involution {
    /// `(u, v) -> (-u, v)`
    NegateU,
    /// `(u, v) -> (u, -v)`
    NegateV,
    /// `(u, v) -> (-u, -v)`
    NegateBoth,
    /// `(u, v) -> (v, u)`
    Swap,
    /// `(u, v) -> (-v, -u)`
    NegatedSwap,
}

impl Involution {
    pub fn apply(&self, p: ParamPoint) -> ParamPoint {
        let ParamPoint { u, v } = p;
        match self {
            Involution::NegateU => ParamPoint::new(-u, v),
            Involution::NegateV => ParamPoint::new(u, -v),
            Involution::NegateBoth => ParamPoint::new(-u, -v),
            Involution::Swap => ParamPoint::new(v, u),
            Involution::NegatedSwap => ParamPoint::new(-v, -u),
        }
    }
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Involution::NegateU => "(-u,v)",
            Involution::NegateV => "(u,-v)",
            Involution::NegateBoth => "(-u,-v)",
            Involution::Swap => "(v,u)",
            Involution::NegatedSwap => "(-v,-u)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymmetryCase {
    pub plane: SymmetryPlane,
    pub involution: Involution,
}

impl SymmetryCase {
    const fn new(plane: SymmetryPlane, involution: Involution) -> Self {
        Self { plane, involution }
    }
}

impl fmt::Display for SymmetryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} via {}", self.plane, self.involution)
    }
}

/// Plane symmetries of each class, paired with the parameter involution
/// that realises them. The pairings follow from the parity of `P_k`, `Q_k`
/// under sign changes and the swap `u + iv -> i(u - iv)`.
pub fn expected_symmetries(cls: SymmetryClass) -> Vec<SymmetryCase> {
    use Involution::*;
    use SymmetryPlane::*;
    match cls.label {
        ClassLabel::FourKMinus1 => vec![
            SymmetryCase::new(X0, NegateU),
            SymmetryCase::new(Y0, NegateV),
        ],
        ClassLabel::FourK | ClassLabel::FourKPlus2 => vec![
            SymmetryCase::new(Z0, NegateBoth),
            SymmetryCase::new(Y0, NegateV),
        ],
        ClassLabel::FourKPlus1 => vec![
            SymmetryCase::new(X0, NegateU),
            SymmetryCase::new(Y0, NegateV),
            SymmetryCase::new(XEqNegY, Swap),
            SymmetryCase::new(XEqY, NegatedSwap),
        ],
    }
}

/// Planes from [`expected_symmetries`] for the class of `spec`.
pub fn expected_planes(spec: &SurfaceSpec) -> Vec<SymmetryPlane> {
    classify(i64::from(spec.degree()))
        .map(|cls| expected_symmetries(cls).iter().map(|c| c.plane).collect())
        .unwrap_or_default()
}

/// Max over `points` of `|reflect(r(p)) - r(g(p))| / max(|r(p)|, 1)`.
pub fn verify_symmetry(
    spec: &SurfaceSpec,
    case: SymmetryCase,
    points: impl IntoIterator<Item = ParamPoint>,
) -> Result<f64> {
    let cls = classify(i64::from(spec.degree()))?;
    if !expected_symmetries(cls).contains(&case) {
        return Err(Error::ClassMismatch {
            degree: spec.degree(),
            plane: case.plane,
        });
    }
    Ok(points.into_iter().fold(0f64, |worst, p| {
        let r = spec.eval_surface(p);
        let mirrored = spec.eval_surface(case.involution.apply(p));
        worst.max((case.plane.reflect(r) - mirrored).norm() / r.norm().max(1.0))
    }))
}

/// Straight line fitted through the first and last of a run of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub direction: Vec3,
    pub anchor: SurfacePoint,
    /// Max distance of the samples to the line over `max(1, max |sample|)`.
    pub residual: f64,
    /// Max `|Z|` over `max(1, max |sample|)`.
    pub max_abs_z: f64,
}

impl LineFit {
    fn through(samples: &[SurfacePoint]) -> Self {
        let (first, last) = (samples[0], samples[samples.len() - 1]);
        let direction = (last - first).normalize();
        let scale = samples.iter().fold(1f64, |m, p| m.max(p.norm()));
        let residual = samples.iter().fold(0f64, |m, p| {
            let d = p - first;
            m.max((d - direction * d.dot(&direction)).norm())
        }) / scale;
        let max_abs_z = samples.iter().fold(0f64, |m, p| m.max(p.z.abs())) / scale;
        Self {
            direction,
            anchor: first,
            residual,
            max_abs_z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineReport {
    /// Image of `u = v`.
    pub diagonal: LineFit,
    /// Image of `u = -v`.
    pub antidiagonal: LineFit,
    /// Angle between the two directions, radians.
    pub angle: f64,
}

impl LineReport {
    pub fn direction_dot(&self) -> f64 {
        self.diagonal.direction.dot(&self.antidiagonal.direction)
    }
}

/// Samples the images of `u = v` and `u = -v` for `t in [-2, 2]` and fits
/// a line to each. Only class `4k-1` surfaces are expected to contain them.
pub fn check_straight_lines(spec: &SurfaceSpec, samples: usize) -> Result<LineReport> {
    let cls = classify(i64::from(spec.degree()))?;
    if cls.label != ClassLabel::FourKMinus1 {
        return Err(Error::ClassMismatch {
            degree: spec.degree(),
            plane: SymmetryPlane::Z0,
        });
    }
    if samples < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 line samples, got {samples}"
        )));
    }
    let ts: Vec<f64> = (0..samples)
        .map(|i| -2.0 + 4.0 * i as f64 / (samples - 1) as f64)
        .collect();
    let run = |sign: f64| -> Vec<SurfacePoint> {
        ts.iter()
            .map(|&t| spec.eval_surface(ParamPoint::new(t, sign * t)))
            .collect()
    };
    let diagonal = LineFit::through(&run(1.0));
    let antidiagonal = LineFit::through(&run(-1.0));
    let angle = diagonal
        .direction
        .dot(&antidiagonal.direction)
        .clamp(-1.0, 1.0)
        .acos();
    Ok(LineReport {
        diagonal,
        antidiagonal,
        angle,
    })
}

/// Scan settings for [`find_self_intersections`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub domain: DomainRect,
    pub grid_res: usize,
    /// Minimum parameter distance between the two preimages.
    pub delta_param: f64,
    /// Spatial hash cells have edge `4 * delta_pos`; hits closer than this
    /// are merged.
    pub delta_pos: Option<f64>,
}

impl ScanOptions {
    pub const MIN_GRID_RES: usize = 32;

    /// `delta_param = 0.05 * width`; `delta_pos` defaults to `1e-3` of the
    /// sampled bounding-box diagonal.
    pub fn new(domain: DomainRect, grid_res: usize) -> Self {
        Self {
            domain,
            grid_res,
            delta_param: 0.05 * domain.width(),
            delta_pos: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfIntersectionHit {
    pub pt_a: ParamPoint,
    pub pt_b: ParamPoint,
    /// Midpoint of the two refined images.
    pub position: SurfacePoint,
    pub separation: f64,
    /// Distance to the nearest expected symmetry plane over `|position|`.
    pub plane_distance: f64,
}

/// Result of refining one candidate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub pt_a: ParamPoint,
    pub pt_b: ParamPoint,
    pub initial_separation: f64,
    pub separation: f64,
    pub iterations: usize,
}

const MAX_REFINE_ITERATIONS: usize = 50;
const MIN_STEP_FRACTION: f64 = 1e-8;

/// Damped minimum-norm Gauss-Newton on `r(a) - r(b) = 0` over the four
/// parameters. Steps are halved until the separation decreases; a step
/// fraction below `1e-8` ends the iteration, so the separation never grows.
pub fn refine_pair(
    spec: &SurfaceSpec,
    selector: SurfaceSelector,
    a: ParamPoint,
    b: ParamPoint,
) -> Refinement {
    let residual = |x: &Vector4<f64>| {
        spec.eval(selector, ParamPoint::new(x[0], x[1]))
            - spec.eval(selector, ParamPoint::new(x[2], x[3]))
    };
    let mut x = Vector4::new(a.u, a.v, b.u, b.v);
    let mut f = residual(&x);
    let initial_separation = f.norm();
    let mut iterations = 0;
    while iterations < MAX_REFINE_ITERATIONS {
        let sep = f.norm();
        let scale = spec
            .eval(selector, ParamPoint::new(x[0], x[1]))
            .norm()
            .max(1.0);
        if sep <= 1e-14 * scale {
            break;
        }
        let ja = spec.jet(selector, ParamPoint::new(x[0], x[1]));
        let jb = spec.jet(selector, ParamPoint::new(x[2], x[3]));
        let jac = Matrix3x4::from_columns(&[ja.d_u, ja.d_v, -jb.d_u, -jb.d_v]);
        let Ok(pinv) = jac.pseudo_inverse(1e-13 * jac.norm()) else {
            break;
        };
        let step = -(pinv * f);
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= MIN_STEP_FRACTION {
            let trial = x + step * alpha;
            let ft = residual(&trial);
            if ft.norm() < sep {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    Refinement {
        pt_a: ParamPoint::new(x[0], x[1]),
        pt_b: ParamPoint::new(x[2], x[3]),
        initial_separation,
        separation: f.norm(),
        iterations,
    }
}

type Cell = (i64, i64, i64);

fn cell_of(p: &SurfacePoint, edge: f64) -> Cell {
    let c = |x: f64| (x / edge).floor() as i64;
    (c(p.x), c(p.y), c(p.z))
}

fn neighbours(c: Cell) -> impl Iterator<Item = Cell> {
    (-1..=1).flat_map(move |dx| {
        (-1..=1).flat_map(move |dy| (-1..=1).map(move |dz| (c.0 + dx, c.1 + dy, c.2 + dz)))
    })
}

fn plane_distance(p: SurfacePoint, planes: &[SymmetryPlane]) -> f64 {
    let norm = p.norm();
    if norm == 0.0 {
        return 0.0;
    }
    planes
        .iter()
        .map(|pl| pl.distance(p))
        .fold(f64::INFINITY, f64::min)
        / norm
}

fn lex(a: &SurfacePoint, b: &SurfacePoint) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

/// Sampling-based search for points with two distinct preimages.
///
/// Grid positions are hashed into cells of edge `4 * delta_pos`. Each
/// sample is paired with its nearest neighbour in the surrounding cells
/// whose parameters lie more than `delta_param` away; every such pair is
/// refined with [`refine_pair`] and kept when the refined separation is
/// below `1e-3 * delta_pos`, the preimages remain `delta_param` apart and
/// inside the domain. Hits within `delta_pos` of each other are merged and
/// the result is sorted by position.
pub fn find_self_intersections(
    spec: &SurfaceSpec,
    selector: SurfaceSelector,
    opts: &ScanOptions,
) -> Result<Vec<SelfIntersectionHit>> {
    if opts.grid_res < ScanOptions::MIN_GRID_RES {
        return Err(Error::InvalidArgument(format!(
            "self-intersection grid must be at least {}, got {}",
            ScanOptions::MIN_GRID_RES,
            opts.grid_res
        )));
    }
    let grid = SampleGrid::square(opts.domain, opts.grid_res)?;
    let params = grid.to_vec();
    let positions: Vec<SurfacePoint> = params.par_iter().map(|p| spec.eval(selector, *p)).collect();

    let (lo, hi) = positions.iter().fold(
        (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let delta_pos = opts
        .delta_pos
        .unwrap_or_else(|| 1e-3 * (hi - lo).norm())
        .max(f64::MIN_POSITIVE);
    let edge = 4.0 * delta_pos;

    let mut cells: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        cells.entry(cell_of(p, edge)).or_default().push(i);
    }

    let candidates: Vec<(usize, usize)> = (0..positions.len())
        .into_par_iter()
        .filter_map(|i| {
            let pi = &positions[i];
            let mut best: Option<(f64, usize)> = None;
            for c in neighbours(cell_of(pi, edge)) {
                let Some(members) = cells.get(&c) else {
                    continue;
                };
                for &j in members {
                    if j <= i || params[i].distance(&params[j]) <= opts.delta_param {
                        continue;
                    }
                    let d = (pi - positions[j]).norm();
                    if best.is_none_or(|(bd, bj)| d < bd || (d == bd && j < bj)) {
                        best = Some((d, j));
                    }
                }
            }
            best.map(|(_, j)| (i, j))
        })
        .collect();

    let planes = expected_planes(spec);
    let slack = 1e-9 * opts.domain.width();
    let mut hits: Vec<SelfIntersectionHit> = candidates
        .par_iter()
        .filter_map(|&(i, j)| {
            let r = refine_pair(spec, selector, params[i], params[j]);
            let ok = r.separation < 1e-3 * delta_pos
                && r.pt_a.distance(&r.pt_b) > opts.delta_param
                && opts.domain.contains(r.pt_a, slack)
                && opts.domain.contains(r.pt_b, slack);
            if !ok {
                return None;
            }
            let (a, b) = if (r.pt_a.u, r.pt_a.v) <= (r.pt_b.u, r.pt_b.v) {
                (r.pt_a, r.pt_b)
            } else {
                (r.pt_b, r.pt_a)
            };
            let position = (spec.eval(selector, a) + spec.eval(selector, b)) * 0.5;
            Some(SelfIntersectionHit {
                pt_a: a,
                pt_b: b,
                position,
                separation: r.separation,
                plane_distance: plane_distance(position, &planes),
            })
        })
        .collect();

    hits.sort_by(|a, b| {
        lex(&a.position, &b.position)
            .then(a.pt_a.u.total_cmp(&b.pt_a.u))
            .then(a.pt_a.v.total_cmp(&b.pt_a.v))
    });

    let mut kept: Vec<SelfIntersectionHit> = Vec::new();
    let mut seen: HashMap<Cell, Vec<usize>> = HashMap::new();
    for hit in hits {
        let c = cell_of(&hit.position, delta_pos);
        let duplicate = neighbours(c).any(|n| {
            seen.get(&n).is_some_and(|idx| {
                idx.iter()
                    .any(|&k| (kept[k].position - hit.position).norm() < delta_pos)
            })
        });
        if !duplicate {
            seen.entry(c).or_default().push(kept.len());
            kept.push(hit);
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCheck {
    pub passed: bool,
    /// Hit with the largest normalized plane distance, if any.
    pub worst: Option<SelfIntersectionHit>,
    pub worst_distance: f64,
}

/// Whether every hit lies within `tol` (normalized) of one of the planes of
/// `cases`. Distances are recomputed from the hit positions.
pub fn hits_on_symmetry_planes(
    hits: &[SelfIntersectionHit],
    cases: &[SymmetryCase],
    tol: f64,
) -> PlaneCheck {
    let planes: Vec<SymmetryPlane> = cases.iter().map(|c| c.plane).collect();
    let mut check = PlaneCheck {
        passed: true,
        worst: None,
        worst_distance: 0.0,
    };
    for hit in hits {
        let d = plane_distance(hit.position, &planes);
        if check.worst.is_none() || d > check.worst_distance {
            check.worst = Some(*hit);
            check.worst_distance = d;
        }
    }
    check.passed = check.worst_distance < tol;
    check
}
