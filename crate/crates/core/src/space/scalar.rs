//! The coefficient field abstraction.
//!
//! Everything in the crate is generic over one of two scalar types: exact
//! big rationals for certificate-grade arithmetic, or double-precision
//! complex numbers for scans and estimates. A computation picks one route
//! at the type level; the two representations never mix inside a vector
//! or an operator application.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic in this type is exact (no rounding), so
    /// equalities and sign tests are decidable.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_ratio(r: &BigRational) -> Self;

    /// Modulus as `f64`. Exact values round once, at this boundary.
    fn abs_f64(&self) -> f64;

    /// The value as a real double, or `None` when it has a nonzero
    /// imaginary part. Used for preconditions of the form "parameter
    /// must be a real number in this range".
    fn as_real(&self) -> Option<f64>;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn abs_f64(&self) -> f64 {
        // `to_f64` can only fail on magnitudes outside the double range;
        // saturating keeps norms monotone instead of poisoning them.
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn as_real(&self) -> Option<f64> {
        Some(self.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }))
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }

    fn from_ratio(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn as_real(&self) -> Option<f64> {
        (self.im == 0.0).then_some(self.re)
    }
}

/// `base^exp` by binary exponentiation; `exp = 0` gives one.
pub fn pow_u<S: Scalar>(base: &S, exp: u64) -> S {
    let mut acc = S::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * sq.clone();
        }
        e >>= 1;
        if e > 0 {
            sq = sq.clone() * sq;
        }
    }
    acc
}

/// `base^exp` for signed exponents; negative exponents invert, so the
/// base must be nonzero there (checked by the caller's preconditions).
pub fn pow_i<S: Scalar>(base: &S, exp: i64) -> S {
    if exp >= 0 {
        pow_u(base, exp as u64)
    } else {
        S::one() / pow_u(base, exp.unsigned_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn pow_matches_repeated_multiplication() {
        let b = BigRational::from_f64(1.5).unwrap();
        let mut acc = BigRational::one();
        for e in 0..12u64 {
            assert_eq!(pow_u(&b, e), acc);
            acc *= &b;
        }
        assert_eq!(
            pow_i(&b, -2),
            BigRational::new(BigInt::from(4), BigInt::from(9))
        );
    }

    #[test]
    fn complex_abs_is_the_modulus() {
        let z = Complex64::new(3.0, 4.0);
        assert_eq!(z.abs_f64(), 5.0);
    }
}
