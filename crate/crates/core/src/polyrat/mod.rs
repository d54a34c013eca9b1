//! Rational-function algebra over exact rationals, reals and complex numbers.
//!
//! Polynomials and rational functions are generic over [`Coeff`]. Catalog
//! potentials are built with [`Rational`] coefficients so that the
//! transformed Riccati coefficient and its Laurent data are exact; residue
//! roots and everything downstream of a square root run in `f64`.

mod poly;
mod rational;

pub use poly::Poly;
pub use rational::{AsymptoticExpansion, LaurentData, RationalFn};

use std::fmt;
use std::ops::Neg;

use num_complex::Complex64;
use num_traits::{Num, ToPrimitive};
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyratError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("{pole} is not a pole: |denominator(pole)| = {residual:e}")]
    NotAPole { pole: String, residual: f64 },
    #[error("cannot convert non-finite value {0} to an exact rational")]
    NonFinite(f64),
}

/// Field element usable as a polynomial coefficient.
pub trait Coeff:
    Clone + fmt::Debug + fmt::Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Relative size below which a value is treated as zero (0 for exact types).
    const ZERO_TOL: f64;

    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    /// `|self| <= ZERO_TOL * scale`; exact types test for exact zero.
    fn negligible(&self, scale: f64) -> bool {
        if Self::ZERO_TOL == 0.0 {
            self.is_zero()
        } else {
            self.magnitude() <= Self::ZERO_TOL * scale
        }
    }
}

impl Coeff for f64 {
    const ZERO_TOL: f64 = 1e-10;

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Coeff for Complex64 {
    const ZERO_TOL: f64 = 1e-10;

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl Coeff for Rational {
    const ZERO_TOL: f64 = 0.0;

    fn magnitude(&self) -> f64 {
        self.to_f64().map_or(f64::INFINITY, f64::abs)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Exact rational value of a finite `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<Rational, PolyratError> {
    Rational::from_float(x).ok_or(PolyratError::NonFinite(x))
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Shorthand for the exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
