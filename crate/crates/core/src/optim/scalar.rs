//! Number types the simplex tableau can run on.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Converts a finite float. Exact types use the exact binary value.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Smallest magnitude accepted as a pivot.
    fn pivot_tol() -> Self;
    /// Reduced costs below `-cost_tol` are improving.
    fn cost_tol() -> Self;
    /// Replaces round-off noise by an exact zero. No-op for exact types.
    fn flush(self) -> Self {
        self
    }
    fn abs_val(&self) -> Self;
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn cost_tol() -> Self {
        1e-10
    }
    fn flush(self) -> Self {
        if self.abs() < 1e-14 {
            0.0
        } else {
            self
        }
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn cost_tol() -> Self {
        BigRational::zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact() -> bool {
        true
    }
}
