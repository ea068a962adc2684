use serde::Serialize;

use crate::error::{Error, Result};

/// Norm bounds for the blocks of `[[A, -B], [-C, D]]`:
/// `a0|x| <= |Ax| <= a1|x|`, `|B| <= b`, `|C| <= c`, `d0|x| <= |Dx| <= d1|x|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockBounds {
    pub a0: f64,
    pub a1: f64,
    pub b: f64,
    pub c: f64,
    pub d0: f64,
    pub d1: f64,
}

impl BlockBounds {
    pub fn new(a0: f64, a1: f64, b: f64, c: f64, d0: f64, d1: f64) -> Self {
        Self { a0, a1, b, c, d0, d1 }
    }

    fn validate(&self) -> Result<()> {
        let vals = [self.a0, self.a1, self.b, self.c, self.d0, self.d1];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(self.a0 > 0.0 && self.d0 > 0.0 && self.b >= 0.0 && self.c >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "block bounds need a0, d0 > 0 and b, c >= 0 (a0 = {}, d0 = {}, b = {}, c = {})",
                self.a0, self.d0, self.b, self.c
            )));
        }
        if self.a1 < self.a0 || self.d1 < self.d0 {
            return Err(Error::InvalidArgument(format!(
                "upper bounds below lower bounds (a0 = {}, a1 = {}, d0 = {}, d1 = {})",
                self.a0, self.a1, self.d0, self.d1
            )));
        }
        let lhs = self.a0 * self.d0;
        let rhs = self.b * self.c;
        if lhs <= rhs {
            return Err(Error::DeterminantCondition { lhs, rhs });
        }
        Ok(())
    }
}

/// Which cross terms enter the discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `(a^2 + c^2 - b^2 - d^2)^2 + 4(ab + cd)^2`
    AbCd,
    /// `(a^2 + b^2 - c^2 - d^2)^2 + 4(ac + bd)^2`
    AcBd,
}

fn eta(a: f64, b: f64, c: f64, d: f64, sign: f64, pairing: Pairing) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let disc = match pairing {
        Pairing::AbCd => (a2 + c2 - b2 - d2).powi(2) + 4.0 * (a * b + c * d).powi(2),
        Pairing::AcBd => (a2 + b2 - c2 - d2).powi(2) + 4.0 * (a * c + b * d).powi(2),
    };
    let trace = a2 + b2 + c2 + d2;
    if sign < 0.0 {
        // trace - sqrt(disc) cancels badly; disc = trace^2 - 4 (ad - bc)^2
        let det = a * d - b * c;
        let big = 0.5 * (trace + disc.sqrt());
        if big > 0.0 {
            det * det / big
        } else {
            0.0
        }
    } else {
        0.5 * (trace + disc.sqrt())
    }
}

/// `(eta0, eta1)` with `eta0 |(x,y)|^2 <= |M(x,y)|^2 <= eta1 |(x,y)|^2`.
pub fn block_bounds(a0: f64, a1: f64, b: f64, c: f64, d0: f64, d1: f64) -> Result<(f64, f64)> {
    block_bounds_with(&BlockBounds::new(a0, a1, b, c, d0, d1), Pairing::AbCd)
}

pub fn block_bounds_with(bb: &BlockBounds, pairing: Pairing) -> Result<(f64, f64)> {
    bb.validate()?;
    let lo = match pairing {
        Pairing::AbCd => eta(bb.a0, bb.b, bb.c, bb.d0, -1.0, pairing),
        Pairing::AcBd => {
            let trace = bb.a0 * bb.a0 + bb.b * bb.b + bb.c * bb.c + bb.d0 * bb.d0;
            let disc = (bb.a0 * bb.a0 + bb.b * bb.b - bb.c * bb.c - bb.d0 * bb.d0).powi(2)
                + 4.0 * (bb.a0 * bb.c + bb.b * bb.d0).powi(2);
            0.5 * (trace - disc.sqrt())
        }
    };
    let hi = eta(bb.a1, bb.b, bb.c, bb.d1, 1.0, pairing);
    Ok((lo, hi))
}

/// Squared extreme singular values of the scalar matrix `[[a, -b], [-c, d]]`.
pub fn scalar_block_extremes(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    // eigenvalues of M^T M
    let p = a * a + c * c;
    let q = -a * b - c * d;
    let r = b * b + d * d;
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let hi = mean + rad;
    let det = a * d - b * c;
    let lo = if hi > 0.0 { det * det / hi } else { 0.0 };
    (lo, hi)
}
