//! Explicit polynomial minimal surfaces of arbitrary degree.
//!
//! The degree-`n` surface is built from the harmonic pair
//! `P_k + i Q_k = (u + iv)^k` and a shape parameter `omega >= 0`; `n = 3`
//! is the Enneper surface. The crate evaluates the surface, its conjugate
//! and the associate family with analytic jets, certifies minimality and
//! isothermality numerically, analyses symmetries, straight lines and
//! self-intersections, and writes tessellated meshes.

pub mod diffgeo;
pub mod domain;
pub mod error;
pub mod mesh;
pub mod numfmt;
pub mod pq;
pub mod shape;
pub mod surface;
pub mod verify;

pub use domain::{DomainRect, SampleGrid};
pub use error::{Error, Result};
pub use pq::ParamPoint;
pub use surface::{SurfaceJet, SurfacePoint, SurfaceSelector, SurfaceSpec, Vec3};
