//! Multiple-precision helpers built on MPFR/MPC (via `rug`).
//!
//! Every high-precision quantity in the crate is a [`rug::Float`] or
//! [`rug::Complex`] carrying its own precision. Decimal strings are the
//! interchange format: [`to_decimal`] emits enough digits to round-trip
//! the binary value exactly.

use num_complex::Complex64;
use rug::float::Round;
use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Default working precision (bits) for linear solves.
pub const DEFAULT_PRECISION: u32 = 256;

pub fn zero(prec: u32) -> Float {
    Float::new(prec)
}

pub fn from_f64(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

pub fn complex(prec: u32, z: Complex64) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// Number of significant decimal digits that round-trip `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Full-precision decimal rendering (scientific notation).
pub fn to_decimal(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix_round(10, Some(decimal_digits(x.prec())), Round::Nearest)
}

pub fn parse_decimal(s: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    let x = Float::with_val(prec, parsed);
    if !x.is_finite() {
        return Err(Error::Parse(format!("{s:?} is not finite")));
    }
    Ok(x)
}

/// Largest absolute value in a slice (0 for an empty slice).
pub fn max_abs(xs: &[Float]) -> Float {
    let prec = xs.first().map_or(64, Float::prec);
    let mut m = Float::new(prec);
    for x in xs {
        let a = Float::with_val(prec, x.abs_ref());
        if a > m {
            m = a;
        }
    }
    m
}

pub fn norm2(xs: &[Float]) -> Float {
    let prec = xs.first().map_or(64, Float::prec);
    let mut s = Float::new(prec);
    for x in xs {
        s += Float::with_val(prec, x.square_ref());
    }
    s.sqrt()
}

/// `2^exp` at the given precision.
pub fn pow2(prec: u32, exp: i32) -> Float {
    Float::with_val(prec, 1) << exp
}

/// Clenshaw evaluation of `Σ c_k T_k(x)` at a real argument.
pub fn clenshaw(coeffs: &[Float], x: &Float) -> Float {
    let prec = x.prec();
    let Some((c0, rest)) = coeffs.split_first() else {
        return Float::new(prec);
    };
    let two_x = Float::with_val(prec, x * 2u32);
    let mut b1 = Float::new(prec);
    let mut b2 = Float::new(prec);
    for ck in rest.iter().rev() {
        let b0 = Float::with_val(prec, &two_x * &b1) - &b2 + ck;
        b2 = std::mem::replace(&mut b1, b0);
    }
    Float::with_val(prec, x * &b1) - b2 + c0
}

/// Clenshaw evaluation of `Σ c_k T_k(z)` at a complex argument.
pub fn clenshaw_complex(coeffs: &[Float], z: &Complex) -> Complex {
    let prec = z.prec().0;
    let Some((c0, rest)) = coeffs.split_first() else {
        return Complex::new(prec);
    };
    let two_z = Complex::with_val(prec, z * 2u32);
    let mut b1 = Complex::new(prec);
    let mut b2 = Complex::new(prec);
    for ck in rest.iter().rev() {
        let mut b0 = Complex::with_val(prec, &two_z * &b1);
        b0 -= &b2;
        b0 += ck;
        b2 = std::mem::replace(&mut b1, b0);
    }
    let mut out = Complex::with_val(prec, z * &b1);
    out -= b2;
    out += c0;
    out
}
