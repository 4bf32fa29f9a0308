//! Grid tessellation and ASCII mesh output (OBJ, PLY, CSV).

use std::io::Write;

use rayon::prelude::*;

use crate::diffgeo::curvatures;
use crate::domain::{DomainRect, SampleGrid};
use crate::error::Error;
use crate::numfmt::g17;
use crate::pq::ParamPoint;
use crate::surface::{deformation_phases, SurfacePoint, SurfaceSelector, SurfaceSpec, Vec3};

/// Indexed triangle mesh over a `(nu+1) x (nv+1)` vertex lattice.
///
/// Vertex `(i, j)` has index `j * (nu + 1) + i`. Each cell is split into
/// the lower-left triangle `(i,j) (i+1,j) (i,j+1)` followed by
/// `(i+1,j) (i+1,j+1) (i,j+1)`, both counterclockwise in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<SurfacePoint>,
    /// Parameters of each vertex; may be empty for meshes not built by
    /// [`tessellate`].
    pub params: Vec<ParamPoint>,
    /// Unit normals, zero at singular vertices.
    pub normals: Option<Vec<Vec3>>,
    pub faces: Vec<[usize; 3]>,
    /// Vertex lattice size `(nu + 1, nv + 1)`.
    pub grid_dims: (usize, usize),
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

impl Mesh {
    pub fn validate(&self) -> Result<(), Error> {
        if self.faces.is_empty() {
            return Err(Error::InvalidMesh("mesh has no faces".into()));
        }
        let n = self.vertices.len();
        if let Some(f) = self.faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::InvalidMesh(format!(
                "face {f:?} references a vertex beyond {n}"
            )));
        }
        if let Some(normals) = &self.normals {
            if normals.len() != n {
                return Err(Error::InvalidMesh(format!(
                    "{} normals for {n} vertices",
                    normals.len()
                )));
            }
        }
        if !self.params.is_empty() && self.params.len() != n {
            return Err(Error::InvalidMesh(format!(
                "{} parameter samples for {n} vertices",
                self.params.len()
            )));
        }
        Ok(())
    }

    /// Componentwise `(min, max)` of the vertex positions.
    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))),
        )
    }

    /// `(u, v, position)` triples for CSV export.
    pub fn samples(&self) -> Vec<(ParamPoint, SurfacePoint)> {
        self.params
            .iter()
            .copied()
            .zip(self.vertices.iter().copied())
            .collect()
    }
}

pub fn tessellate(
    spec: &SurfaceSpec,
    selector: SurfaceSelector,
    domain: DomainRect,
    nu: usize,
    nv: usize,
    with_normals: bool,
) -> Result<Mesh, Error> {
    if nu < 1 || nv < 1 {
        return Err(Error::InvalidArgument(format!(
            "tessellation needs at least one cell per side, got {nu} x {nv}"
        )));
    }
    let grid = SampleGrid::new(domain, nu + 1, nv + 1)?;
    let rows: Vec<Vec<(ParamPoint, SurfacePoint, Vec3)>> = (0..=nv)
        .into_par_iter()
        .map(|j| {
            (0..=nu)
                .map(|i| {
                    let p = grid.point(i, j);
                    if with_normals {
                        let jet = spec.jet(selector, p);
                        (p, spec.eval(selector, p), curvatures(&jet).unit_normal)
                    } else {
                        (p, spec.eval(selector, p), Vec3::zeros())
                    }
                })
                .collect()
        })
        .collect();

    let count = (nu + 1) * (nv + 1);
    let mut params = Vec::with_capacity(count);
    let mut vertices = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(if with_normals { count } else { 0 });
    for (p, x, n) in rows.into_iter().flatten() {
        params.push(p);
        vertices.push(x);
        if with_normals {
            normals.push(n);
        }
    }

    let idx = |i: usize, j: usize| j * (nu + 1) + i;
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, d]);
            faces.push([b, c, d]);
        }
    }

    Ok(Mesh {
        vertices,
        params,
        normals: with_normals.then_some(normals),
        faces,
        grid_dims: (nu + 1, nv + 1),
    })
}

fn xyz(p: &Vec3) -> String {
    format!("{} {} {}", g17(p.x), g17(p.y), g17(p.z))
}

/// Wavefront OBJ: `v` lines, then `vn` lines if present, then 1-based `f`
/// lines (`f a//a b//b c//c` with normals).
pub fn write_obj<W: Write>(mesh: &Mesh, sink: &mut W) -> Result<(), WriteError> {
    mesh.validate()?;
    for v in &mesh.vertices {
        writeln!(sink, "v {}", xyz(v))?;
    }
    if let Some(normals) = &mesh.normals {
        for n in normals {
            writeln!(sink, "vn {}", xyz(n))?;
        }
    }
    let with_normals = mesh.normals.is_some();
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| i + 1);
        if with_normals {
            writeln!(sink, "f {a}//{a} {b}//{b} {c}//{c}")?;
        } else {
            writeln!(sink, "f {a} {b} {c}")?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// ASCII PLY 1.0 with double-precision vertex properties.
pub fn write_ply<W: Write>(mesh: &Mesh, sink: &mut W) -> Result<(), WriteError> {
    mesh.validate()?;
    writeln!(sink, "ply")?;
    writeln!(sink, "format ascii 1.0")?;
    writeln!(sink, "element vertex {}", mesh.vertices.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(sink, "property double {axis}")?;
    }
    if mesh.normals.is_some() {
        for axis in ["nx", "ny", "nz"] {
            writeln!(sink, "property double {axis}")?;
        }
    }
    writeln!(sink, "element face {}", mesh.faces.len())?;
    writeln!(sink, "property list uchar int vertex_indices")?;
    writeln!(sink, "end_header")?;
    for (k, v) in mesh.vertices.iter().enumerate() {
        match &mesh.normals {
            Some(normals) => writeln!(sink, "{} {}", xyz(v), xyz(&normals[k]))?,
            None => writeln!(sink, "{}", xyz(v))?,
        }
    }
    for [a, b, c] in &mesh.faces {
        writeln!(sink, "3 {a} {b} {c}")?;
    }
    sink.flush()?;
    Ok(())
}

/// `u,v,x,y,z` header followed by one row per sample.
pub fn write_csv<W: Write>(
    samples: &[(ParamPoint, SurfacePoint)],
    sink: &mut W,
) -> Result<(), WriteError> {
    writeln!(sink, "u,v,x,y,z")?;
    for (p, x) in samples {
        writeln!(
            sink,
            "{},{},{},{},{}",
            g17(p.u),
            g17(p.v),
            g17(x.x),
            g17(x.y),
            g17(x.z)
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// One member of a deformation sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub t: f64,
    pub mesh: Mesh,
}

impl Frame {
    /// `frame_<index>_<t in milliradians>.obj`
    pub fn file_name(&self) -> String {
        format!(
            "frame_{}_{}.obj",
            self.index,
            (self.t * 1000.0).round() as i64
        )
    }
}

/// The default six-phase schedule from `t = 0` to `t = pi/2`.
pub fn default_schedule() -> Vec<f64> {
    deformation_phases().to_vec()
}

/// One tessellation of the associate family member per phase.
pub fn family_frames(
    spec: &SurfaceSpec,
    schedule: &[f64],
    domain: DomainRect,
    nu: usize,
    nv: usize,
) -> Result<Vec<Frame>, Error> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty phase schedule".into()));
    }
    schedule
        .iter()
        .enumerate()
        .map(|(index, &t)| {
            Ok(Frame {
                index,
                t,
                mesh: tessellate(spec, SurfaceSelector::Family(t), domain, nu, nv, false)?,
            })
        })
        .collect()
}
