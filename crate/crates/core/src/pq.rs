//! The harmonic polynomial pair `P_n = Re((u + iv)^n)`, `Q_n = Im((u + iv)^n)`.
//!
//! Three evaluation routes are provided and cross-checked in the test suites:
//! direct binomial summation, the degree recurrence, and (in tests only)
//! repeated complex multiplication. Partial derivatives are never obtained
//! by differentiation of the sums; they come from lower-degree values via
//!
//! ```text
//! dP_n/du =  n P_{n-1}    dP_n/dv = -n Q_{n-1}
//! dQ_n/du =  n Q_{n-1}    dQ_n/dv =  n P_{n-1}
//! ```

use crate::error::{Error, Result};

/// Largest degree for which the exact binomial coefficients used by
/// [`eval_direct`] are supported.
pub const MAX_DIRECT_DEGREE: u32 = 60;

/// A point in the `(u, v)` parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub u: f64,
    pub v: f64,
}

impl ParamPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    /// Like [`ParamPoint::new`], rejecting NaN and infinities.
    pub fn checked(u: f64, v: f64) -> Result<Self> {
        for x in [u, v] {
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
        }
        Ok(Self { u, v })
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// `max(1, |u|, |v|)`, the magnitude used to scale steps and tolerances.
    pub fn scale(&self) -> f64 {
        1f64.max(self.u.abs()).max(self.v.abs())
    }

    pub fn distance(&self, other: &ParamPoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// Values of `P_degree` and `Q_degree` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQValue {
    pub degree: u32,
    pub p: f64,
    pub q: f64,
}

/// Values and first/second partials of `P_degree`, `Q_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PQJet {
    pub degree: u32,
    pub p: f64,
    pub q: f64,
    pub p_u: f64,
    pub p_v: f64,
    pub q_u: f64,
    pub q_v: f64,
    pub p_uu: f64,
    pub p_uv: f64,
    pub p_vv: f64,
    pub q_uu: f64,
    pub q_uv: f64,
    pub q_vv: f64,
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Checks `C(n, 2k) + C(n, 2k+1) = C(n+1, 2k+1)` in exact integer arithmetic.
pub fn binomial_identity_holds(n: u32, k: u32) -> Result<bool> {
    if 2 * k + 1 > n + 1 {
        return Err(Error::OutOfRange { n, k });
    }
    Ok(binomial(n, 2 * k) + binomial(n, 2 * k + 1) == binomial(n + 1, 2 * k + 1))
}

/// Direct binomial summation of `P_n` and `Q_n`.
///
/// The `P_n` sum runs over `k = 0..=ceil((n-1)/2)`; the `Q_n` sum over
/// `k = 0..=floor((n-1)/2)`, empty for `n = 0`.
pub fn eval_direct(n: u32, pt: ParamPoint) -> Result<PQValue> {
    if n > MAX_DIRECT_DEGREE {
        return Err(Error::DegreeTooHigh {
            degree: n,
            max: MAX_DIRECT_DEGREE,
        });
    }
    let ParamPoint { u, v } = pt;
    let sign = |k: u32| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let powi = |x: f64, e: u32| x.powi(e as i32);

    // ceil((n-1)/2), which is 0 for n = 0
    let p_upper = n.saturating_sub(1).div_ceil(2);
    let mut p = 0.0;
    for k in 0..=p_upper {
        p += sign(k) * binomial(n, 2 * k) as f64 * powi(u, n - 2 * k) * powi(v, 2 * k);
    }

    let mut q = 0.0;
    if n >= 1 {
        for k in 0..=(n - 1) / 2 {
            q += sign(k)
                * binomial(n, 2 * k + 1) as f64
                * powi(u, n - 2 * k - 1)
                * powi(v, 2 * k + 1);
        }
    }
    Ok(PQValue { degree: n, p, q })
}

/// `P_k`, `Q_k` for `k = 0..=n` by the degree recurrence
/// `P_k = u P_{k-1} - v Q_{k-1}`, `Q_k = v P_{k-1} + u Q_{k-1}`.
pub fn eval_recurrence(n: u32, pt: ParamPoint) -> Vec<PQValue> {
    PqTable::new(n, pt)
        .values
        .iter()
        .enumerate()
        .map(|(k, &(p, q))| PQValue {
            degree: k as u32,
            p,
            q,
        })
        .collect()
}

/// Jet of `P_n`, `Q_n` at `pt`.
pub fn pq_jet(n: u32, pt: ParamPoint) -> PQJet {
    PqTable::new(n, pt).jet(n)
}

/// All `(P_k, Q_k)` for `k = 0..=max_degree` at one point, from a single
/// recurrence sweep. Jets of any degree up to `max_degree` are read off it.
#[derive(Debug, Clone)]
pub struct PqTable {
    point: ParamPoint,
    values: Vec<(f64, f64)>,
}

impl PqTable {
    pub fn new(max_degree: u32, point: ParamPoint) -> Self {
        let ParamPoint { u, v } = point;
        let mut values = Vec::with_capacity(max_degree as usize + 1);
        let (mut p, mut q) = (1.0, 0.0);
        values.push((p, q));
        for _ in 0..max_degree {
            (p, q) = (u * p - v * q, v * p + u * q);
            values.push((p, q));
        }
        Self { point, values }
    }

    pub fn point(&self) -> ParamPoint {
        self.point
    }

    pub fn max_degree(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    /// `P_k`; negative degrees read as zero since they only ever appear
    /// multiplied by a vanishing factor.
    pub fn p(&self, k: i64) -> f64 {
        self.get(k).0
    }

    pub fn q(&self, k: i64) -> f64 {
        self.get(k).1
    }

    fn get(&self, k: i64) -> (f64, f64) {
        if k < 0 {
            (0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    pub fn value(&self, k: u32) -> PQValue {
        let (p, q) = self.get(i64::from(k));
        PQValue { degree: k, p, q }
    }

    /// Jet of degree `k`, assembled from degrees `k-1` and `k-2`.
    pub fn jet(&self, k: u32) -> PQJet {
        let d = i64::from(k);
        let n1 = f64::from(k);
        let n2 = n1 * (n1 - 1.0);
        let (p, q) = self.get(d);
        let (p1, q1) = self.get(d - 1);
        let (p2, q2) = self.get(d - 2);
        PQJet {
            degree: k,
            p,
            q,
            p_u: n1 * p1,
            p_v: -n1 * q1,
            q_u: n1 * q1,
            q_v: n1 * p1,
            p_uu: n2 * p2,
            p_uv: -n2 * q2,
            p_vv: -n2 * p2,
            q_uu: n2 * q2,
            q_uv: n2 * p2,
            q_vv: -n2 * q2,
        }
    }
}
