//! Floating-point scalar abstraction shared by the transforms and operators.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type backing complex function values.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Send + Sync + Debug + Display + Default + 'static
{
    /// Coefficients below this magnitude do not count towards the Fourier degree.
    const DEGREE_CUTOFF: f64;
}

impl Scalar for f64 {
    const DEGREE_CUTOFF: f64 = 1e-9;
}

impl Scalar for f32 {
    const DEGREE_CUTOFF: f64 = 1e-4;
}

#[inline]
pub(crate) fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable in every Scalar")
}

#[inline]
pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Largest modulus of the difference between two equally long complex slices.
pub fn max_abs_diff<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| to_f64((*x - *y).norm())).fold(0.0, f64::max)
}
