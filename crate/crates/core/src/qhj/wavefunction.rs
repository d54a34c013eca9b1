use std::sync::Arc;

use num_complex::Complex64;

use super::{ChiFamily, QhjError, Reduction, ResidueSet, SpectralLine};
use crate::catalog::{ChangeOfVariable, Interval, PotentialSpec, YParts};
use crate::orthopoly::{frobenius_polynomial, JacobiIndices};
use crate::polyrat::Poly;
use crate::quadrature::{tanh_sinh, trapezoid};

/// Trapezoid step in `x` for normalizing on the whole line.
const LINE_STEP: f64 = 0.02;
/// Margin beyond the classical turning point for the whole-line integral.
const LINE_MARGIN: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolynomialFamily {
    Hermite,
    Jacobi(JacobiIndices),
}

/// `ψ(y) = norm · sign · ∏ d_i(y)^(e_i) · exp(∫Π dy) · P(y)` where `d_i` is
/// the distance from `y` to the `i`-th fixed pole, oriented to be positive on
/// the physical interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormWavefunction {
    pub level: usize,
    pub energy: f64,
    /// `(pole, exponent)` pairs.
    pub exponents: Vec<(f64, f64)>,
    /// Coefficient `c` in a factor `exp(-c y²/2)`, where present.
    pub gaussian_exponent: Option<f64>,
    /// Monic polynomial factor of degree `level`.
    pub polynomial: Poly<f64>,
    pub family: Option<PolynomialFamily>,
    pub norm: f64,
    /// `±1`, chosen so that `ψ > 0` near the left end of the domain.
    pub sign: f64,
    pub change: ChangeOfVariable,
    pub x_domain: Interval,
    growth: Poly<f64>,
    growth_integral: Poly<f64>,
}

/// `ψ` and `d(ln ψ)/dx` at a point, with the pieces needed to recognize a zero of `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalValue {
    pub psi: Complex64,
    pub log_derivative: Complex64,
    pub poly_value: Complex64,
    /// `Σ |c_k| |y|^k`, the size `P(y)` is compared against.
    pub poly_scale: f64,
}

fn antiderivative(p: &Poly<f64>) -> Poly<f64> {
    let mut c = vec![0.0];
    c.extend(p.coeffs().iter().enumerate().map(|(k, a)| a / (k + 1) as f64));
    Poly::new(c)
}

fn real_distance(p: &YParts<f64>, pole: f64) -> f64 {
    if pole == 1.0 {
        p.one_minus
    } else if pole == -1.0 {
        p.one_plus
    } else {
        (p.y - pole).abs()
    }
}

/// Oriented distance to the pole and `y - pole`, for complex `y`.
fn complex_distance(p: &YParts<Complex64>, pole: f64) -> (Complex64, Complex64) {
    if pole == 1.0 {
        (p.one_minus, -p.one_minus)
    } else if pole == -1.0 {
        (p.one_plus, p.one_plus)
    } else {
        let diff = p.y - pole;
        (if pole > 0.0 { -diff } else { diff }, diff)
    }
}

impl ClosedFormWavefunction {
    /// Unnormalized, unsigned value from the parts of `y`.
    fn shape(&self, p: &YParts<f64>) -> f64 {
        let prefactor: f64 = self.exponents.iter().map(|&(pole, e)| real_distance(p, pole).powf(e)).product();
        prefactor * self.growth_integral.eval(&p.y).exp() * self.polynomial.eval(&p.y)
    }

    pub fn eval_parts(&self, p: &YParts<f64>) -> f64 {
        self.norm * self.sign * self.shape(p)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_parts(&self.change.parts(x))
    }

    /// `ψ` and its logarithmic derivative at complex `x`, by principal branches.
    pub fn local(&self, x: Complex64) -> Result<LocalValue, QhjError> {
        let p = self.change.parts_complex(x);
        let mut log_psi = Complex64::new(0.0, 0.0);
        let mut dlog_y = Complex64::new(0.0, 0.0);
        for &(pole, e) in &self.exponents {
            let (d, diff) = complex_distance(&p, pole);
            let integer = e.fract() == 0.0;
            if !integer && d.re <= 0.0 && d.im.abs() <= 1e-15 * d.norm() {
                return Err(QhjError::BranchCut(x));
            }
            log_psi += e * d.ln();
            dlog_y += e / diff;
        }
        log_psi += self.growth_integral.eval_complex(p.y);
        dlog_y += self.growth.eval_complex(p.y);
        let poly_value = self.polynomial.eval_complex(p.y);
        let poly_scale =
            self.polynomial.coeffs().iter().enumerate().map(|(k, c)| c.abs() * p.y.norm().powi(k as i32)).sum();
        dlog_y += self.polynomial.derivative().eval_complex(p.y) / poly_value;
        let psi = self.norm * self.sign * log_psi.exp() * poly_value;
        let log_derivative = self.change.jacobian_complex(x) * dlog_y;
        Ok(LocalValue { psi, log_derivative, poly_value, poly_scale })
    }

    /// Interior zeros in `x`, increasing.
    pub fn nodes(&self) -> Vec<f64> {
        let dom = self.change.y_domain();
        self.polynomial
            .real_roots(dom.lo, dom.hi, 1e-15)
            .into_iter()
            .filter(|y| dom.contains(*y))
            .map(|y| self.change.x_of_y(y))
            .collect()
    }

    /// `∫ |ψ|² dx` over the physical domain.
    pub fn norm_integral(&self) -> f64 {
        if self.change.y_domain().is_bounded() {
            tanh_sinh(|p| {
                let v = self.eval_parts(p);
                v * v / self.change.jacobian(p)
            })
        } else {
            let half = self.energy.max(0.0).sqrt() + LINE_MARGIN;
            let intervals = (2.0 * half / LINE_STEP).ceil() as usize;
            trapezoid(|x| self.eval(x).powi(2), -half, half, intervals)
        }
    }

    /// `∫ ψ φ dx` against another state on the same domain.
    pub fn inner_product(&self, other: &Self) -> f64 {
        if self.change.y_domain().is_bounded() {
            tanh_sinh(|p| self.eval_parts(p) * other.eval_parts(p) / self.change.jacobian(p))
        } else {
            let half = self.energy.max(other.energy).max(0.0).sqrt() + LINE_MARGIN;
            let intervals = (2.0 * half / LINE_STEP).ceil() as usize;
            trapezoid(|x| self.eval(x) * other.eval(x), -half, half, intervals)
        }
    }
}

/// `ψ(x)` continued to complex `x`.
pub fn wavefunction_eval(wf: &ClosedFormWavefunction, x: Complex64) -> Result<Complex64, QhjError> {
    Ok(wf.local(x)?.psi)
}

pub fn assemble_wavefunction(
    spec: &PotentialSpec,
    line: &SpectralLine,
    residues: &ResidueSet,
) -> Result<ClosedFormWavefunction, QhjError> {
    let eq = Arc::new(ChiFamily::new(spec)?).at(line.energy_qhj)?;
    let reduction = super::reduce_to_polynomial_ode(&eq, residues, line.n)?;
    assemble_with(spec, line, residues, &reduction)
}

pub(super) fn assemble_with(
    spec: &PotentialSpec,
    line: &SpectralLine,
    residues: &ResidueSet,
    reduction: &Reduction,
) -> Result<ClosedFormWavefunction, QhjError> {
    for &(pole, exponent) in &residues.exponents {
        if exponent <= 0.0 {
            return Err(QhjError::NotNormalizable { pole, exponent });
        }
    }
    let polynomial = frobenius_polynomial(&reduction.ode, line.n)?;
    let family = if reduction.ode.is_hermite() {
        Some(PolynomialFamily::Hermite)
    } else {
        reduction.ode.jacobi_indices().map(PolynomialFamily::Jacobi)
    };
    let growth = residues.growth.clone();
    let gaussian_exponent = (growth.degree() == Some(1)).then(|| -growth.coeff(1));
    let mut wf = ClosedFormWavefunction {
        level: line.n,
        energy: line.energy_qhj,
        exponents: residues.exponents.clone(),
        gaussian_exponent,
        // a monic polynomial with all roots inside is positive to their right
        sign: if line.n.is_multiple_of(2) { 1.0 } else { -1.0 },
        polynomial,
        family,
        norm: 1.0,
        change: spec.change,
        x_domain: spec.x_domain,
        growth_integral: antiderivative(&growth),
        growth,
    };
    let integral = wf.norm_integral();
    if !(integral.is_finite() && integral > 0.0) {
        return Err(QhjError::NotNormalizable { pole: f64::NAN, exponent: integral });
    }
    wf.norm = integral.sqrt().recip();
    Ok(wf)
}
