//! Numeric traits shared by the permanent kernels, the dynamic program and
//! the samplers.
//!
//! Permanents only need ring arithmetic plus exact division by powers of
//! two, so the kernels are written against [`Scalar`], which is implemented
//! for real and complex floats as well as for exact integer and rational
//! types. Everything that involves probabilities, random numbers or
//! trigonometry is written against [`Real`] and works on `Complex<F>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

/// A commutative ring element usable as a matrix entry.
pub trait Scalar:
    Copy + Debug + PartialEq + NumAssign + Neg<Output = Self> + Send + Sync + 'static
{
    /// The image of a nonnegative integer in the ring.
    fn from_count(n: u64) -> Self;

    /// Absolute value as an `f64`, used only for structural zero detection.
    fn magnitude(&self) -> f64;

    /// `false` for NaN or infinite components.
    fn all_finite(&self) -> bool;
}

macro_rules! impl_scalar_float {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn from_count(n: u64) -> Self {
                n as $t
            }
            #[inline]
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
            #[inline]
            fn all_finite(&self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

impl_scalar_float!(f32, f64);

impl Scalar for i64 {
    #[inline]
    fn from_count(n: u64) -> Self {
        n as i64
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.unsigned_abs() as f64
    }
    #[inline]
    fn all_finite(&self) -> bool {
        true
    }
}

impl Scalar for Ratio<i64> {
    #[inline]
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(n as i64)
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        (*self.numer() as f64 / *self.denom() as f64).abs()
    }
    #[inline]
    fn all_finite(&self) -> bool {
        true
    }
}

impl<F: Real> Scalar for Complex<F> {
    #[inline]
    fn from_count(n: u64) -> Self {
        Complex::new(F::from_count(n), F::zero())
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY)
    }
    #[inline]
    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Real floating-point type backing complex amplitudes and probabilities.
pub trait Real: Scalar + Float + FloatConst + Display {
    /// Standard normal deviate.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform deviate in `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy conversion from `f64`.
    fn from_f64_lossy(v: f64) -> Self;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
            }
            #[inline]
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardUniform as Distribution<$t>>::sample(&StandardUniform, rng)
            }
            #[inline]
            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }
        }
    )*};
}

impl_real!(f32, f64);

/// `|z|²` without the square root.
#[inline]
pub fn norm_sqr<F: Real>(z: Complex<F>) -> F {
    z.re * z.re + z.im * z.im
}
