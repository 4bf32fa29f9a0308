use crate::error::{Error, Result};
use crate::pq::ParamPoint;

/// Axis-aligned rectangle in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainRect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl DomainRect {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        for x in [u_min, u_max, v_min, v_max] {
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
        }
        if u_min >= u_max || v_min >= v_max {
            return Err(Error::InvalidDomain(format!(
                "need u_min < u_max and v_min < v_max, got [{u_min}, {u_max}] x [{v_min}, {v_max}]"
            )));
        }
        Ok(Self {
            u_min,
            u_max,
            v_min,
            v_max,
        })
    }

    /// `[-a, a] x [-a, a]`.
    pub fn square(a: f64) -> Result<Self> {
        Self::new(-a, a, -a, a)
    }

    pub fn width(&self) -> f64 {
        (self.u_max - self.u_min).max(self.v_max - self.v_min)
    }

    pub fn contains(&self, pt: ParamPoint, slack: f64) -> bool {
        pt.u >= self.u_min - slack
            && pt.u <= self.u_max + slack
            && pt.v >= self.v_min - slack
            && pt.v <= self.v_max + slack
    }

    /// `samples` evenly spaced values from `min` to `max`, endpoints exact.
    /// On a symmetric interval the values are exactly symmetric.
    fn lerp(min: f64, max: f64, i: usize, samples: usize) -> f64 {
        let last = (samples - 1) as f64;
        let i = i as f64;
        (min * (last - i) + max * i) / last
    }
}

/// Row-major `nu x nv` lattice of sample points covering a domain
/// (`u` varies fastest).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub domain: DomainRect,
    pub nu: usize,
    pub nv: usize,
}

impl SampleGrid {
    /// Both sample counts must be at least 2.
    pub fn new(domain: DomainRect, nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample grid needs at least 2 points per side, got {nu} x {nv}"
            )));
        }
        Ok(Self { domain, nu, nv })
    }

    pub fn square(domain: DomainRect, n: usize) -> Result<Self> {
        Self::new(domain, n, n)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self, i: usize) -> f64 {
        DomainRect::lerp(self.domain.u_min, self.domain.u_max, i, self.nu)
    }

    pub fn v(&self, j: usize) -> f64 {
        DomainRect::lerp(self.domain.v_min, self.domain.v_max, j, self.nv)
    }

    pub fn point(&self, i: usize, j: usize) -> ParamPoint {
        ParamPoint::new(self.u(i), self.v(j))
    }

    pub fn points(&self) -> impl Iterator<Item = ParamPoint> + '_ {
        (0..self.nv).flat_map(move |j| (0..self.nu).map(move |i| self.point(i, j)))
    }

    pub fn to_vec(&self) -> Vec<ParamPoint> {
        self.points().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_rect() {
        assert!(DomainRect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(DomainRect::new(0.0, 1.0, 2.0, -1.0).is_err());
        assert!(DomainRect::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn grid_hits_origin_and_is_symmetric() {
        let g = SampleGrid::square(DomainRect::square(1.0).unwrap(), 41).unwrap();
        assert_eq!(g.len(), 1681);
        assert_eq!(g.u(20), 0.0);
        assert_eq!(g.u(0), -1.0);
        assert_eq!(g.u(40), 1.0);
        for i in 0..41 {
            assert_eq!(g.u(i), -g.u(40 - i));
        }
        assert_eq!(g.points().filter(|p| p.u == 0.0 && p.v == 0.0).count(), 1);
        assert!(SampleGrid::square(g.domain, 1).is_err());
    }
}
