//! Small numeric abstraction so the model-matrix builders can run both in
//! `f64` (fast path) and in exact big-rational arithmetic (oracle path).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational in [0,1] converts to f64")
    }
}

/// Converts a square scalar matrix to rows of `f64`.
pub fn rows_to_f64<S: Scalar>(rows: &[Vec<S>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(Scalar::to_f64).collect())
        .collect()
}
