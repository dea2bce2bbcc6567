//! Multiple-precision reals and the small amount of 3-dimensional linear
//! algebra the polygon computations need.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// A binary floating-point real with an explicit precision in bits.
pub type Real = Float;

pub const MIN_BITS: u32 = 64;
pub const DEFAULT_BITS: u32 = 256;

/// Environment variable consulted by front ends for the default precision.
pub const BITS_ENV: &str = "LENGTHEN_BITS";

pub type Vec3 = [Real; 3];

pub fn check_bits(bits: u32) -> Result<u32> {
    if bits < MIN_BITS {
        Err(Error::PrecisionTooLow { bits, min: MIN_BITS })
    } else {
        Ok(bits)
    }
}

pub fn real(bits: u32, v: f64) -> Real {
    Float::with_val(bits, v)
}

pub fn parse_real(bits: u32, s: &str) -> Result<Real> {
    let parsed = Float::parse(s.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    Ok(Float::with_val(bits, parsed))
}

/// Relative tolerance `2^-(bits/2)` separating boundary from interior.
pub fn default_tol(bits: u32) -> Real {
    Float::with_val(bits, Float::i_exp(1, -((bits / 2) as i32)))
}

/// `10^e` at the given precision.
pub fn pow10(bits: u32, e: i32) -> Real {
    Float::with_val(bits, 10).pow(e)
}

/// Decimal rendering with enough digits to round-trip the precision.
pub fn to_decimal(x: &Real) -> String {
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}

/// Re-rounds `x` to `bits` of precision.
pub fn with_bits(x: &Real, bits: u32) -> Real {
    Float::with_val(bits, x)
}

pub fn vec3(bits: u32, v: [f64; 3]) -> Vec3 {
    v.map(|x| real(bits, x))
}

pub fn dot(a: &Vec3, b: &Vec3) -> Real {
    let bits = a[0].prec().max(b[0].prec());
    let mut s = Float::with_val(bits, &a[0] * &b[0]);
    s += &a[1] * &b[1];
    s += &a[2] * &b[2];
    s
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    let bits = a[0].prec().max(b[0].prec());
    let c = |i: usize, j: usize| {
        let mut x = Float::with_val(bits, &a[i] * &b[j]);
        x -= &a[j] * &b[i];
        x
    };
    [c(1, 2), c(2, 0), c(0, 1)]
}

pub fn norm(a: &Vec3) -> Real {
    dot(a, a).sqrt()
}

pub fn scale(a: &Vec3, k: &Real) -> Vec3 {
    let bits = a[0].prec().max(k.prec());
    [0, 1, 2].map(|i| Float::with_val(bits, &a[i] * k))
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    let bits = a[0].prec().max(b[0].prec());
    [0, 1, 2].map(|i| Float::with_val(bits, &a[i] + &b[i]))
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    let bits = a[0].prec().max(b[0].prec());
    [0, 1, 2].map(|i| Float::with_val(bits, &a[i] - &b[i]))
}

pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> Real {
    dot(a, &cross(b, c))
}

/// Sine of the angle between two lines through the origin of `R³`; zero iff
/// they are the same projective point.
pub fn projective_distance(a: &Vec3, b: &Vec3) -> Real {
    let num = norm(&cross(a, b));
    num / (norm(a) * norm(b))
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: &Real, b: &Real, floor: f64) -> Real {
    let bits = a.prec().max(b.prec());
    let diff = Float::with_val(bits, a - b).abs();
    let mut denom = Float::with_val(bits, a.abs_ref()).max(&Float::with_val(bits, b.abs_ref()));
    if denom < floor {
        denom = Float::with_val(bits, floor);
    }
    diff / denom
}

pub fn max_real(values: impl IntoIterator<Item = Real>, bits: u32) -> Real {
    values.into_iter().fold(Float::with_val(bits, 0), |acc, v| if v > acc { v } else { acc })
}

pub fn cmp_real(a: &Real, b: &Real) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// A 3×3 matrix stored by rows.
#[derive(Clone, Debug)]
pub struct Mat3 {
    pub rows: [Vec3; 3],
}

impl Mat3 {
    pub fn from_rows(rows: [Vec3; 3]) -> Self {
        Mat3 { rows }
    }

    pub fn identity(bits: u32) -> Self {
        Mat3::from_rows([vec3(bits, [1.0, 0.0, 0.0]), vec3(bits, [0.0, 1.0, 0.0]), vec3(bits, [0.0, 0.0, 1.0])])
    }

    pub fn bits(&self) -> u32 {
        self.rows[0][0].prec()
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.rows.clone().map(|r| dot(&r, v))
    }

    pub fn det(&self) -> Real {
        det3(&self.rows[0], &self.rows[1], &self.rows[2])
    }

    pub fn transpose(&self) -> Mat3 {
        let r = &self.rows;
        Mat3::from_rows([0, 1, 2].map(|j| [0, 1, 2].map(|i| r[i][j].clone())))
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let cols = other.transpose();
        Mat3::from_rows(self.rows.clone().map(|r| cols.rows.clone().map(|c| dot(&r, &c))))
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat3> {
        let det = self.det();
        if det.is_zero() || !det.is_finite() {
            return None;
        }
        let r = &self.rows;
        // Columns of the inverse are the cross products of pairs of rows.
        let cols = [cross(&r[1], &r[2]), cross(&r[2], &r[0]), cross(&r[0], &r[1])];
        let inv_t = Mat3::from_rows(cols.map(|c| c.map(|x| x / &det)));
        Some(inv_t.transpose())
    }

    /// Solves `M v = rhs` by Cramer's rule.
    pub fn solve(&self, rhs: &Vec3) -> Option<Vec3> {
        self.inverse().map(|inv| inv.apply(rhs))
    }

    /// Largest entrywise absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> Real {
        let bits = self.bits();
        let diffs = (0..3).flat_map(|i| (0..3).map(move |j| (i, j)));
        max_real(diffs.map(|(i, j)| Float::with_val(bits, &self.rows[i][j] - &other.rows[i][j]).abs()), bits)
    }
}
