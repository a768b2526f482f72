//! Real scalar abstraction shared by every numeric routine.
//!
//! All matrices hold `Complex<T>` where `T: Real`. Tolerances in this crate are
//! written for `f64`; [`Real::tol`] maps them to the same fraction of
//! significant digits so the same call sites stay meaningful for `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use num_complex::Complex;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Maps an `f64`-calibrated tolerance to this type, keeping the same
    /// fraction of significant digits: `eps_T^(ln base / ln eps_f64)`.
    fn tol(base: f64) -> Self {
        let eps = Self::epsilon().to_f64().unwrap_or(f64::EPSILON);
        if eps == f64::EPSILON {
            return Self::lit(base);
        }
        Self::lit(eps.powf(base.ln() / f64::EPSILON.ln()))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_scales_with_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        let t32 = <f32 as Real>::tol(1e-12);
        assert!(t32 > 1e-6 && t32 < 1e-5);
        // Full precision maps to full precision.
        let e = <f32 as Real>::tol(f64::EPSILON);
        assert!((e - f32::EPSILON).abs() < 1e-12);
        assert!(<f32 as Real>::tol(1e-9) < <f32 as Real>::tol(1e-6));
    }
}
