use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use minsurf::diffgeo::{curvatures, first_form};
use minsurf::mesh::{
    self, family_frames, tessellate, write_csv, write_obj, write_ply, Mesh, WriteError,
};
use minsurf::numfmt::g17;
use minsurf::shape::{
    check_straight_lines, classify, expected_symmetries, find_self_intersections,
    hits_on_symmetry_planes, verify_symmetry, ClassLabel, ScanOptions,
};
use minsurf::verify::{
    cauchy_riemann_suite, family_isometry_suite, fd_tolerance, isothermal_suite, jet_fd_suite,
    minimality_suite, standard_selectors, write_failure_report, SuiteOutcome,
};
use minsurf::{DomainRect, ParamPoint, SampleGrid, SurfaceSelector, Vec3};
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};

/// Fixed tolerances of the suites that have no override flag.
pub const TOL_CAUCHY_RIEMANN: f64 = 1e-12;
pub const TOL_FIRST_FORM: f64 = 1e-9;
pub const TOL_GAUSSIAN: f64 = 1e-8;
pub const TOL_LINE: f64 = 1e-10;
pub const TOL_LINE_Z: f64 = 1e-12;

pub const SYMMETRY_GRID: usize = 41;
pub const LINE_SAMPLES: usize = 201;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<std::io::Error> for CliError {
    fn from(source: std::io::Error) -> Self {
        CliError::Io {
            context: "write failed".into(),
            source,
        }
    }
}

/// Whether every check a command ran passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn vec3(v: &Vec3) -> String {
    format!("({}, {}, {})", g17(v.x), g17(v.y), g17(v.z))
}

fn domain_str(d: &DomainRect) -> String {
    format!(
        "[{}, {}] x [{}, {}]",
        g17(d.u_min),
        g17(d.u_max),
        g17(d.v_min),
        g17(d.v_max)
    )
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalExtras {
    pub jet: bool,
    pub forms: bool,
    pub curvature: bool,
}

pub fn cmd_eval(
    cfg: &RunConfig,
    pt: ParamPoint,
    extras: EvalExtras,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let spec = &cfg.spec;
    let p = spec.eval(cfg.selector, pt);
    writeln!(out, "x={}", g17(p.x))?;
    writeln!(out, "y={}", g17(p.y))?;
    writeln!(out, "z={}", g17(p.z))?;
    if !(extras.jet || extras.forms || extras.curvature) {
        return Ok(Status::Pass);
    }
    let jet = spec.jet(cfg.selector, pt);
    if extras.jet {
        for (name, d) in [
            ("d_u", jet.d_u),
            ("d_v", jet.d_v),
            ("d_uu", jet.d_uu),
            ("d_uv", jet.d_uv),
            ("d_vv", jet.d_vv),
        ] {
            for (axis, value) in ["x", "y", "z"].iter().zip(d.iter()) {
                writeln!(out, "{name}_{axis}={}", g17(*value))?;
            }
        }
    }
    let c = curvatures(&jet);
    if extras.forms {
        let f = first_form(&jet);
        writeln!(out, "E={}", g17(f.e))?;
        writeln!(out, "F={}", g17(f.f))?;
        writeln!(out, "G={}", g17(f.g))?;
        writeln!(out, "L={}", g17(c.forms.l))?;
        writeln!(out, "M={}", g17(c.forms.m))?;
        writeln!(out, "N={}", g17(c.forms.nn))?;
    }
    if extras.curvature {
        writeln!(out, "singular={}", c.singular)?;
        writeln!(out, "H={}", g17(c.mean))?;
        writeln!(out, "K={}", g17(c.gaussian))?;
        for (axis, value) in ["x", "y", "z"].iter().zip(c.unit_normal.iter()) {
            writeln!(out, "normal_{axis}={}", g17(*value))?;
        }
    }
    Ok(Status::Pass)
}

/// Runs every certification suite over a `grid.0 x grid.1` sample lattice.
/// Without an explicit selector the base, conjugate and six family phases
/// are all checked.
pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<Status, CliError> {
    let spec = &cfg.spec;
    let grid =
        SampleGrid::new(cfg.domain, cfg.grid.0, cfg.grid.1).map_err(|e| ConfigError::Invalid {
            flag: "grid".into(),
            message: e.to_string(),
        })?;
    let points = grid.to_vec();
    let selectors = if cfg.selector_explicit {
        vec![cfg.selector]
    } else {
        standard_selectors()
    };
    let phases: Vec<f64> = match cfg.selector {
        SurfaceSelector::Family(t) if cfg.selector_explicit => vec![t],
        SurfaceSelector::Conjugate if cfg.selector_explicit => vec![std::f64::consts::FRAC_PI_2],
        _ => minsurf::surface::deformation_phases().to_vec(),
    };
    let tol = &cfg.tolerances;
    let (isometry, gaussian) =
        family_isometry_suite(spec, &phases, &points, TOL_FIRST_FORM, TOL_GAUSSIAN);
    let suites = vec![
        minimality_suite(spec, &selectors, &points, tol.minimality),
        isothermal_suite(spec, &selectors, &points, tol.isothermal),
        cauchy_riemann_suite(spec, &points, TOL_CAUCHY_RIEMANN),
        isometry,
        gaussian,
        jet_fd_suite(spec, &selectors, &points, fd_tolerance(spec.degree())),
    ];

    writeln!(
        out,
        "surface {} selectors={} domain={} grid={}x{}",
        spec,
        selectors.len(),
        domain_str(&cfg.domain),
        grid.nu,
        grid.nv
    )?;
    writeln!(
        out,
        "{:<18} {:>8} {:>8} {:>24} {:>10}  status",
        "suite", "checked", "skipped", "worst", "tolerance"
    )?;
    for s in &suites {
        writeln!(
            out,
            "{:<18} {:>8} {:>8} {:>24} {:>10}  {}",
            s.name,
            s.checked,
            s.skipped.len(),
            g17(s.worst_value()),
            format!("{:e}", s.tolerance),
            pass_fail(s.passed())
        )?;
    }
    let skipped = suites.iter().flat_map(|s| s.skipped.iter().copied()).fold(
        Vec::<ParamPoint>::new(),
        |mut acc, p| {
            if !acc.contains(&p) {
                acc.push(p);
            }
            acc
        },
    );
    write!(out, "singular points skipped: {}", skipped.len())?;
    for p in &skipped {
        write!(out, " ({}, {})", g17(p.u), g17(p.v))?;
    }
    writeln!(out)?;

    let ok = suites.iter().all(SuiteOutcome::passed);
    for s in suites.iter().filter(|s| !s.passed()) {
        if let Some(w) = s.worst {
            writeln!(out, "worst offender [{}]: {w}", s.name)?;
        }
    }
    if let Some(path) = &cfg.output {
        let file = File::create(path)
            .map_err(CliError::io(format!("cannot create {}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_failure_report(&suites, &mut w)
            .and_then(|_| w.flush())
            .map_err(CliError::io(format!("cannot write {}", path.display())))?;
    }
    writeln!(out, "overall: {}", pass_fail(ok))?;
    Ok(Status::from_bool(ok))
}

/// Classification, symmetry residuals, straight lines (class 4k-1) and the
/// self-intersection scan (plane check enforced for class 4k+1).
pub fn cmd_analyze(
    cfg: &RunConfig,
    delta_param: Option<f64>,
    delta_pos: Option<f64>,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let mut doc = Vec::new();
    let status = analysis_report(cfg, delta_param, delta_pos, &mut doc)?;
    match &cfg.output {
        Some(path) => {
            fs::write(path, &doc)
                .map_err(CliError::io(format!("cannot write {}", path.display())))?;
            writeln!(
                out,
                "wrote analysis report to {}: {}",
                path.display(),
                pass_fail(status == Status::Pass)
            )?;
        }
        None => out.write_all(&doc)?,
    }
    Ok(status)
}

fn analysis_report(
    cfg: &RunConfig,
    delta_param: Option<f64>,
    delta_pos: Option<f64>,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let spec = &cfg.spec;
    let tol = &cfg.tolerances;
    let mut ok = true;
    let cls = classify(i64::from(spec.degree())).expect("validated degree");
    writeln!(out, "surface: {spec}")?;
    writeln!(out, "class: {cls}")?;

    let cases = expected_symmetries(cls);
    let sym_grid = SampleGrid::square(cfg.domain, SYMMETRY_GRID).expect("symmetry grid");
    writeln!(
        out,
        "symmetries: {} planes, grid {n}x{n} on {}",
        cases.len(),
        domain_str(&cfg.domain),
        n = SYMMETRY_GRID
    )?;
    for case in &cases {
        let r = verify_symmetry(spec, *case, sym_grid.points()).expect("expected case");
        let pass = r < tol.symmetry;
        ok &= pass;
        writeln!(
            out,
            "  {case}: residual={} tol={:e} {}",
            g17(r),
            tol.symmetry,
            pass_fail(pass)
        )?;
    }

    if cls.label == ClassLabel::FourKMinus1 {
        let rep = check_straight_lines(spec, LINE_SAMPLES).expect("class 4k-1");
        let angle_err = (rep.angle - std::f64::consts::FRAC_PI_2).abs();
        let pass = rep.diagonal.residual < TOL_LINE
            && rep.antidiagonal.residual < TOL_LINE
            && angle_err < TOL_LINE
            && rep.diagonal.max_abs_z < TOL_LINE_Z
            && rep.antidiagonal.max_abs_z < TOL_LINE_Z;
        ok &= pass;
        writeln!(out, "straight_lines: {}", pass_fail(pass))?;
        for (name, l) in [("u=v", rep.diagonal), ("u=-v", rep.antidiagonal)] {
            writeln!(
                out,
                "  {name}: direction={} anchor={} residual={} max_abs_z={}",
                vec3(&l.direction),
                vec3(&l.anchor),
                g17(l.residual),
                g17(l.max_abs_z)
            )?;
        }
        writeln!(
            out,
            "  angle_deg={} direction_dot={}",
            g17(rep.angle.to_degrees()),
            g17(rep.direction_dot())
        )?;
    } else {
        writeln!(out, "straight_lines: not applicable (class {})", cls.label)?;
    }

    let res = cfg.grid.0.max(ScanOptions::MIN_GRID_RES);
    let mut opts = ScanOptions::new(cfg.domain, res);
    if let Some(d) = delta_param {
        opts.delta_param = d;
    }
    if delta_pos.is_some() {
        opts.delta_pos = delta_pos;
    }
    let hits = find_self_intersections(spec, SurfaceSelector::Base, &opts).expect("scan options");
    let check = hits_on_symmetry_planes(&hits, &cases, tol.self_intersection);
    let enforced = cls.label == ClassLabel::FourKPlus1;
    if enforced {
        ok &= check.passed;
    }
    writeln!(
        out,
        "self_intersections: grid={res} hits={} worst_plane_distance={} tol={:e} {}",
        hits.len(),
        g17(check.worst_distance),
        tol.self_intersection,
        if enforced {
            pass_fail(check.passed)
        } else if check.passed {
            "pass (not enforced)"
        } else {
            "off-plane (not enforced)"
        }
    )?;
    writeln!(out, "  u_a v_a u_b v_b x y z separation plane_distance")?;
    for h in &hits {
        writeln!(
            out,
            "  {} {} {} {} {} {} {} {} {}",
            g17(h.pt_a.u),
            g17(h.pt_a.v),
            g17(h.pt_b.u),
            g17(h.pt_b.v),
            g17(h.position.x),
            g17(h.position.y),
            g17(h.position.z),
            g17(h.separation),
            g17(h.plane_distance)
        )?;
    }
    writeln!(out, "overall: {}", pass_fail(ok))?;
    Ok(Status::from_bool(ok))
}

fn require_output(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.output.as_deref().ok_or_else(|| {
        ConfigError::Invalid {
            flag: "output".into(),
            message: "an output path is required".into(),
        }
        .into()
    })
}

fn write_mesh_file(mesh: &Mesh, format: Format, path: &Path) -> Result<(), CliError> {
    let file =
        File::create(path).map_err(CliError::io(format!("cannot create {}", path.display())))?;
    let mut w = BufWriter::new(file);
    let result = match format {
        Format::Obj => write_obj(mesh, &mut w),
        Format::Ply => write_ply(mesh, &mut w),
        Format::Csv => write_csv(&mesh.samples(), &mut w),
    };
    result.map_err(|e| match e {
        WriteError::Io(source) => CliError::Io {
            context: format!("cannot write {}", path.display()),
            source,
        },
        WriteError::Invalid(err) => CliError::Io {
            context: format!("refusing to write {}", path.display()),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, err.to_string()),
        },
    })
}

fn bbox_str(mesh: &Mesh) -> String {
    match mesh.bounding_box() {
        Some((lo, hi)) => format!(
            "[{}, {}] x [{}, {}] x [{}, {}]",
            g17(lo.x),
            g17(hi.x),
            g17(lo.y),
            g17(hi.y),
            g17(lo.z),
            g17(hi.z)
        ),
        None => "empty".into(),
    }
}

pub fn cmd_mesh(cfg: &RunConfig, normals: bool, out: &mut dyn Write) -> Result<Status, CliError> {
    let path = require_output(cfg)?;
    let (nu, nv) = cfg.grid;
    let mesh = tessellate(&cfg.spec, cfg.selector, cfg.domain, nu, nv, normals).map_err(|e| {
        ConfigError::Invalid {
            flag: "grid".into(),
            message: e.to_string(),
        }
    })?;
    write_mesh_file(&mesh, cfg.format, path)?;
    writeln!(
        out,
        "wrote {} ({}): vertices={} faces={} bbox={}",
        path.display(),
        cfg.format.extension(),
        mesh.vertices.len(),
        mesh.faces.len(),
        bbox_str(&mesh)
    )?;
    Ok(Status::Pass)
}

/// Writes the six-phase deformation sequence as OBJ files into the output
/// directory.
pub fn cmd_frames(cfg: &RunConfig, out: &mut dyn Write) -> Result<Status, CliError> {
    let dir: PathBuf = require_output(cfg)?.to_path_buf();
    fs::create_dir_all(&dir).map_err(CliError::io(format!("cannot create {}", dir.display())))?;
    let (nu, nv) = cfg.grid;
    let frames =
        family_frames(&cfg.spec, &mesh::default_schedule(), cfg.domain, nu, nv).map_err(|e| {
            ConfigError::Invalid {
                flag: "grid".into(),
                message: e.to_string(),
            }
        })?;
    for frame in &frames {
        let path = dir.join(frame.file_name());
        write_mesh_file(&frame.mesh, Format::Obj, &path)?;
        writeln!(
            out,
            "wrote {} t={}: vertices={} faces={} bbox={}",
            path.display(),
            g17(frame.t),
            frame.mesh.vertices.len(),
            frame.mesh.faces.len(),
            bbox_str(&frame.mesh)
        )?;
    }
    Ok(Status::Pass)
}
