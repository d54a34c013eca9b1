//! Quadrature rules used for normalization and overlaps.

use std::f64::consts::FRAC_PI_2;

use crate::catalog::YParts;

/// Step of the double-exponential rule on `(-1, 1)`.
const TANH_SINH_STEP: f64 = 1.0 / 64.0;
/// Abscissa range `|t| <= TANH_SINH_SPAN`; beyond it the weights underflow.
const TANH_SINH_SPAN: f64 = 6.5;

/// Tanh-sinh quadrature of `f` over `(-1, 1)`.
///
/// The integrand receives `y` with accurately computed `1 - y` and `1 + y`, so
/// algebraic endpoint behavior is resolved down to the underflow limit. Nodes
/// where either complement underflows to zero are skipped.
pub fn tanh_sinh(f: impl Fn(&YParts<f64>) -> f64) -> f64 {
    let h = TANH_SINH_STEP;
    let steps = (TANH_SINH_SPAN / h) as i64;
    let mut sum = 0.0;
    for k in -steps..=steps {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cu * cu);
        if weight == 0.0 || !weight.is_finite() {
            continue;
        }
        let parts =
            YParts { y: u.tanh(), one_minus: 2.0 / (1.0 + (2.0 * u).exp()), one_plus: 2.0 / (1.0 + (-2.0 * u).exp()) };
        if parts.one_minus == 0.0 || parts.one_plus == 0.0 {
            continue;
        }
        sum += weight * f(&parts);
    }
    sum * h
}

/// Composite trapezoid rule on `[lo, hi]` with `intervals` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let h = (hi - lo) / intervals as f64;
    let inner: f64 = (1..intervals).map(|k| f(lo + k as f64 * h)).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_polynomial() {
        let v = tanh_sinh(|p| p.y * p.y);
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫ (1-y)^(-1/2) dy over (-1, 1) = 2√2
        let v = tanh_sinh(|p| p.one_minus.powf(-0.5));
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        // ∫ (1-y)^3 (1+y)^2 dy = 2^6 · B(4, 3) = 64/60
        let v = tanh_sinh(|p| p.one_minus.powi(3) * p.one_plus.powi(2));
        assert!((v - 64.0 / 60.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_gaussian() {
        let v = trapezoid(|x| (-x * x).exp(), -10.0, 10.0, 1000);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
