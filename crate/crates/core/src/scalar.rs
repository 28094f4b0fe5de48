//! Scalar abstractions.
//!
//! [`Real`] is the floating type used for embeddings, unit logarithms and theta
//! sums (`f32` or `f64`). [`Scalar`] is the field the lattice algorithms run
//! over: a float for the scaled lattices `uO_F`, or [`BigRational`] when the
//! Gram matrix is exact.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive, Zero};

pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    fn erfc(self) -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f64 {
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

/// Field of coefficients for Gram-matrix algorithms (LLL, Cholesky).
pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync {
    fn from_bigint(x: &BigInt) -> Self;
    fn from_i64(x: i64) -> Self;
    /// Nearest integer, ties away from zero.
    fn round_to_bigint(&self) -> BigInt;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_bigint(x: &BigInt) -> Self {
                x.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_i64(x: i64) -> Self {
                x as $t
            }
            fn round_to_bigint(&self) -> BigInt {
                BigInt::from_f64(self.round() as f64).expect("finite value")
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

impl Scalar for BigRational {
    fn from_bigint(x: &BigInt) -> Self {
        BigRational::from_integer(x.clone())
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn round_to_bigint(&self) -> BigInt {
        self.round().to_integer()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    ToPrimitive::to_f64(x).unwrap_or_else(|| {
        if x.is_zero() {
            0.0
        } else {
            f64::NAN
        }
    })
}
