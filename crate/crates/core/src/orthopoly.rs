//! Hermite and Jacobi polynomials, and polynomial solutions of
//! `σ(y) P'' + τ(y) P' + λ₀ P = 0` with `deg σ ≤ 2`, `deg τ ≤ 1`.

use thiserror::Error;

use crate::polyrat::Poly;

/// Tolerance on the termination condition for a degree-`n` solution.
pub const TERMINATION_TOL: f64 = 1e-8;
/// Relative residual a Frobenius solution must meet at its sample points.
pub const ODE_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrthoError {
    #[error("invalid polynomial ODE: {0}")]
    InvalidOde(String),
    #[error("no polynomial solution of degree {n}: {reason}")]
    NoPolynomialSolution { n: usize, reason: String },
}

/// Superscripts `(a, b)` of a Jacobi polynomial `P_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiIndices {
    pub a: f64,
    pub b: f64,
}

/// `σ(y) P'' + τ(y) P' + λ₀ P = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialOde {
    pub sigma: Poly<f64>,
    pub tau: Poly<f64>,
    pub lambda0: f64,
}

impl PolynomialOde {
    pub fn new(sigma: Poly<f64>, tau: Poly<f64>, lambda0: f64) -> Result<Self, OrthoError> {
        match sigma.degree() {
            None => return Err(OrthoError::InvalidOde("sigma is identically zero".into())),
            Some(d) if d > 2 => return Err(OrthoError::InvalidOde(format!("deg sigma = {d} > 2"))),
            _ => {}
        }
        if tau.degree().unwrap_or(0) > 1 {
            return Err(OrthoError::InvalidOde(format!("deg tau = {:?} > 1", tau.degree())));
        }
        Ok(Self { sigma, tau, lambda0 })
    }

    /// `λ₀ + n τ' + n(n-1) σ''/2`; zero exactly when a degree-`n` polynomial solution can exist.
    pub fn termination_gap(&self, n: usize) -> f64 {
        let n = n as f64;
        self.lambda0 + n * self.tau.coeff(1) + n * (n - 1.0) * self.sigma.coeff(2)
    }

    /// Left-hand side of the ODE for `p` at `y`, and the sum of the magnitudes of its three terms.
    pub fn residual(&self, p: &Poly<f64>, y: f64) -> (f64, f64) {
        let d1 = p.derivative();
        let d2 = d1.derivative();
        let terms = [self.sigma.eval(&y) * d2.eval(&y), self.tau.eval(&y) * d1.eval(&y), self.lambda0 * p.eval(&y)];
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    }

    /// Jacobi indices when the ODE is a multiple of the Jacobi equation
    /// `(1-y²)P'' + (b - a - (a+b+2)y)P' + n(n+a+b+1)P = 0`.
    pub fn jacobi_indices(&self) -> Option<JacobiIndices> {
        let s = &self.sigma;
        let lead = -s.coeff(2);
        if s.degree() != Some(2)
            || (s.coeff(0) - lead).abs() > 1e-12 * lead.abs()
            || s.coeff(1).abs() > 1e-12 * lead.abs()
        {
            return None;
        }
        let t0 = self.tau.coeff(0) / lead;
        let t1 = self.tau.coeff(1) / lead;
        let sum = -t1 - 2.0;
        Some(JacobiIndices { a: 0.5 * (sum - t0), b: 0.5 * (sum + t0) })
    }

    /// True for a multiple of the Hermite equation `P'' - 2yP' + 2nP = 0`.
    pub fn is_hermite(&self) -> bool {
        let s0 = self.sigma.coeff(0);
        self.sigma.degree() == Some(0)
            && self.tau.coeff(0).abs() <= 1e-12 * s0.abs()
            && (self.tau.coeff(1) + 2.0 * s0).abs() <= 1e-12 * s0.abs()
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial `P_n^{(a,b)}(x)`.
///
/// Uses the standard three-term recurrence; when one of its normalizing
/// factors vanishes (special negative index sums) it falls back to the
/// explicit binomial sum, which is valid for all real indices.
pub fn jacobi_eval(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let denom = 2.0 * k * (k + a + b) * (s - 2.0);
        if denom.abs() < 1e-300 {
            return jacobi_explicit(n, a, b, x);
        }
        let next = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    cur
}

fn jacobi_explicit(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let nf = n as f64;
    let (lo, hi) = (0.5 * (x - 1.0), 0.5 * (x + 1.0));
    (0..=n).map(|s| binomial(nf + a, n - s) * binomial(nf + b, s) * lo.powi(s as i32) * hi.powi((n - s) as i32)).sum()
}

/// Generalized binomial coefficient `z choose k`.
fn binomial(z: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (z - j as f64) / (j as f64 + 1.0))
}

/// Monic degree-`n` polynomial solution of `ode`, found by fixing the
/// power-series coefficients from the top degree downward.
///
/// Requires the termination condition `λ₀ = -n τ' - n(n-1) σ''/2` within
/// [`TERMINATION_TOL`], and verifies the result against the ODE at `2n+3`
/// points in `[-1, 1]`.
pub fn frobenius_polynomial(ode: &PolynomialOde, n: usize) -> Result<Poly<f64>, OrthoError> {
    let gap = ode.termination_gap(n);
    if gap.abs() > TERMINATION_TOL * ode.lambda0.abs().max(1.0) {
        return Err(OrthoError::NoPolynomialSolution {
            n,
            reason: format!("termination condition violated by {gap:e}"),
        });
    }
    let (s0, s1, s2) = (ode.sigma.coeff(0), ode.sigma.coeff(1), ode.sigma.coeff(2));
    let (t0, t1) = (ode.tau.coeff(0), ode.tau.coeff(1));
    let nf = n as f64;
    let mut c = vec![0.0; n + 3];
    c[n] = 1.0;
    // coefficient of y^k: (k-n)[s2(k+n-1) + t1] c_k + (k+1)(s1 k + t0) c_{k+1} + s0 (k+2)(k+1) c_{k+2}
    for k in (0..n).rev() {
        let kf = k as f64;
        let diag = (kf - nf) * (s2 * (kf + nf - 1.0) + t1);
        let rhs = (kf + 1.0) * (s1 * kf + t0) * c[k + 1] + s0 * (kf + 2.0) * (kf + 1.0) * c[k + 2];
        let scale = rhs.abs().max(c[k + 1].abs()).max(c[k + 2].abs()).max(1.0);
        if diag.abs() <= 1e-13 * scale {
            if rhs.abs() > 1e-9 * scale {
                return Err(OrthoError::NoPolynomialSolution { n, reason: format!("recursion inconsistent at y^{k}") });
            }
            c[k] = 0.0;
        } else {
            c[k] = -rhs / diag;
        }
    }
    c.truncate(n + 1);
    let p = Poly::new(c);
    // cancelling terms can leave `mag` tiny, so also compare with the coefficient sizes
    let coeff_scale = ode.sigma.max_abs_coeff().max(ode.tau.max_abs_coeff()).max(ode.lambda0.abs());
    let samples = 2 * n + 3;
    for j in 0..samples {
        let y = -1.0 + 2.0 * (j as f64 + 0.5) / samples as f64;
        let (res, mag) = ode.residual(&p, y);
        let floor = coeff_scale * p.eval(&y).abs();
        if res.abs() > ODE_RESIDUAL_TOL * mag.max(floor).max(f64::MIN_POSITIVE) && res.abs() > 1e-13 {
            return Err(OrthoError::NoPolynomialSolution { n, reason: format!("residual {res:e} at y = {y}") });
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert_eq!(hermite_eval(2, 1.0), 2.0);
        assert_eq!(hermite_eval(3, 0.0), 0.0);
        // H_4 = 16x^4 - 48x^2 + 12
        let x: f64 = 0.7;
        assert!((hermite_eval(4, x) - (16.0 * x.powi(4) - 48.0 * x * x + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_values() {
        assert_eq!(jacobi_eval(0, 0.3, -0.2, 0.5), 1.0);
        let (a, b, x) = (1.5, -0.25, 0.3);
        assert!((jacobi_eval(1, a, b, x) - (0.5 * (a - b) + 0.5 * (a + b + 2.0) * x)).abs() < 1e-15);
        assert!((jacobi_eval(2, 0.0, 0.0, 1.0) - 1.0).abs() < 1e-15);
        // P_n^{(a,b)}(1) = (a+1)_n / n!
        let v = jacobi_eval(3, 2.0, 0.5, 1.0);
        assert!((v - 3.0 * 4.0 * 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_recurrence_matches_explicit_sum() {
        for &(n, a, b, x) in &[(4, 0.5, 1.5, 0.2), (5, 3.5, 2.5, -0.7), (3, -0.5, -0.5, 0.9)] {
            let r = jacobi_eval(n, a, b, x);
            let e = jacobi_explicit(n, a, b, x);
            assert!((r - e).abs() < 1e-12 * e.abs().max(1.0), "n={n} a={a} b={b}: {r} vs {e}");
        }
    }

    #[test]
    fn jacobi_degenerate_indices_use_explicit_sum() {
        // a + b = -2 zeroes the n = 2 recurrence factor
        let v = jacobi_eval(2, -1.0, -1.0, 0.4);
        assert!((v - jacobi_explicit(2, -1.0, -1.0, 0.4)).abs() < 1e-14);
    }

    #[test]
    fn frobenius_hermite() {
        let ode = PolynomialOde::new(Poly::one(), Poly::new(vec![0.0, -2.0]), 4.0).unwrap();
        let p = frobenius_polynomial(&ode, 2).unwrap();
        assert_eq!(p.coeffs(), &[-0.5, 0.0, 1.0]);
        assert!(ode.is_hermite());
    }

    #[test]
    fn frobenius_constant() {
        let ode = PolynomialOde::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::new(vec![0.3, -2.0]), 0.0).unwrap();
        assert_eq!(frobenius_polynomial(&ode, 0).unwrap().coeffs(), &[1.0]);
    }

    #[test]
    fn frobenius_odd_jacobi() {
        // (1-y^2)P'' - 4yP' + 4P with n = 1: monic y
        let ode = PolynomialOde::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::new(vec![0.0, -4.0]), 4.0).unwrap();
        let p = frobenius_polynomial(&ode, 1).unwrap();
        assert_eq!(p.coeffs(), &[0.0, 1.0]);
        let idx = ode.jacobi_indices().unwrap();
        assert!((idx.a - 1.0).abs() < 1e-15 && (idx.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frobenius_rejects_wrong_eigenvalue() {
        let ode = PolynomialOde::new(Poly::one(), Poly::new(vec![0.0, -2.0]), 3.0).unwrap();
        assert!(matches!(frobenius_polynomial(&ode, 2), Err(OrthoError::NoPolynomialSolution { .. })));
    }

    #[test]
    fn invalid_ode() {
        assert!(PolynomialOde::new(Poly::zero(), Poly::one(), 1.0).is_err());
        assert!(PolynomialOde::new(Poly::one(), Poly::new(vec![0.0, 0.0, 1.0]), 1.0).is_err());
    }
}
