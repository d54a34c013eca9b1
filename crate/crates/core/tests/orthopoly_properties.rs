use proptest::prelude::*;

use qhj_core::orthopoly::{frobenius_polynomial, hermite_eval, jacobi_eval, PolynomialOde};
use qhj_core::polyrat::Poly;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn jacobi_ode(a: f64, b: f64, n: usize) -> PolynomialOde {
    let nf = n as f64;
    PolynomialOde::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::new(vec![b - a, -(a + b + 2.0)]), nf * (nf + a + b + 1.0))
        .unwrap()
}

/// Indices where the Gauss–Legendre rule resolves the endpoint behavior of the weight.
fn resolved_index() -> impl Strategy<Value = f64> {
    prop_oneof![(0u32..4).prop_map(f64::from), 2.5f64..6.0]
}

#[test]
fn quadrature_rule_is_exact_for_polynomials() {
    let rule = gauss_legendre(200);
    let total: f64 = rule.iter().map(|(_, w)| w).sum();
    assert!((total - 2.0).abs() < 1e-13);
    let x10: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
    assert!((x10 - 2.0 / 11.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_orthogonality(a in resolved_index(), b in resolved_index(), m in 0usize..8, n in 0usize..8) {
        prop_assume!(m != n);
        let rule = gauss_legendre(200);
        let integral: f64 = rule
            .iter()
            .map(|&(y, w)| {
                w * jacobi_eval(m, a, b, y) * jacobi_eval(n, a, b, y)
                    * (1.0 - y).powf(a) * (1.0 + y).powf(b)
            })
            .sum();
        prop_assert!(integral.abs() < 1e-8, "a={} b={} m={} n={}: {}", a, b, m, n, integral);
    }

    /// The monic Frobenius solution is a constant multiple of the classical polynomial.
    #[test]
    fn frobenius_matches_jacobi(a in -0.9f64..6.0, b in -0.9f64..6.0, n in 0usize..10) {
        let p = frobenius_polynomial(&jacobi_ode(a, b, n), n).unwrap();
        let points: Vec<f64> = (0..10).map(|k| -0.95 + 1.9 * (k as f64 + 0.37) / 10.0).collect();
        let ratios: Vec<f64> = points
            .iter()
            .filter(|&&y| jacobi_eval(n, a, b, y).abs() > 1e-6)
            .map(|&y| p.eval(&y) / jacobi_eval(n, a, b, y))
            .collect();
        for r in &ratios {
            prop_assert!((r - ratios[0]).abs() <= 1e-9 * ratios[0].abs(), "{:?}", ratios);
        }
    }

    #[test]
    fn frobenius_matches_hermite(n in 0usize..12) {
        let nf = n as f64;
        let ode = PolynomialOde::new(Poly::one(), Poly::new(vec![0.0, -2.0]), 2.0 * nf).unwrap();
        let p = frobenius_polynomial(&ode, n).unwrap();
        let lead = 2f64.powi(n as i32);
        for k in 0..10 {
            let x = -3.0 + 0.6 * k as f64 + 0.13;
            let h = hermite_eval(n, x);
            prop_assert!((lead * p.eval(&x) - h).abs() <= 1e-9 * h.abs().max(1.0));
        }
    }

    /// `n` sign changes inside `(-1, 1)`.
    #[test]
    fn frobenius_root_count(a in -0.9f64..6.0, b in -0.9f64..6.0, n in 0usize..12) {
        let p = frobenius_polynomial(&jacobi_ode(a, b, n), n).unwrap();
        let samples = 20_000;
        let mut changes = 0;
        let mut prev = p.eval(&-1.0);
        for k in 1..=samples {
            let v = p.eval(&(-1.0 + 2.0 * k as f64 / samples as f64));
            if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
                changes += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        prop_assert_eq!(changes, n);
        prop_assert_eq!(p.real_roots(-1.0, 1.0, 1e-14).len(), n);
    }
}

#[test]
fn odd_jacobi_example() {
    let ode = PolynomialOde::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::new(vec![0.0, -4.0]), 4.0).unwrap();
    let p = frobenius_polynomial(&ode, 1).unwrap();
    assert_eq!(p.coeffs(), &[0.0, 1.0]);
}
