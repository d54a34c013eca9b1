use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qhj_core::polyrat::{ratio, Poly, Rational, RationalFn};

/// Distinct poles `k/2` with orders 1 or 2, and a numerator of bounded degree.
fn rational_instance() -> impl Strategy<Value = (Vec<(i64, u32)>, Vec<i64>)> {
    (prop::collection::btree_map(-6i64..=6, 1u32..=2, 1..4), prop::collection::vec(-5i64..=5, 1..6))
        .prop_map(|(poles, num)| (poles.into_iter().collect(), num))
}

fn exact(poles: &[(i64, u32)], num: &[i64]) -> Option<RationalFn<Rational>> {
    let den = poles.iter().fold(Poly::<Rational>::one(), |acc, &(p, m)| {
        let factor = Poly::new(vec![-ratio(p, 2), ratio(1, 1)]);
        &acc * &factor.pow(m)
    });
    let num = Poly::new(num.iter().map(|&c| ratio(c, 1)).collect());
    if num.is_zero() {
        return None;
    }
    RationalFn::new(num, den).ok()
}

fn inexact(poles: &[(i64, u32)], num: &[i64]) -> RationalFn<f64> {
    let den =
        poles.iter().fold(Poly::<f64>::one(), |acc, &(p, m)| &acc * &Poly::new(vec![-(p as f64) / 2.0, 1.0]).pow(m));
    RationalFn::new(Poly::new(num.iter().map(|&c| c as f64).collect()), den).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Finite residues add up to the coefficient of `1/y` at infinity.
    #[test]
    fn global_residue_theorem((poles, num) in rational_instance()) {
        let Some(r) = exact(&poles, &num) else { return Ok(()) };
        let mut total = ratio(0, 1);
        for &(p, _) in &poles {
            let pole = ratio(p, 2);
            if r.pole_order(&pole) > 0 {
                total += r.laurent_at(&pole).unwrap().residue();
            }
        }
        let at_infinity = r.expansion_at_infinity(3).coefficient(-1);
        prop_assert_eq!(total, at_infinity);
    }

    /// Principal-part coefficients match `(1/2πi) ∮ r(y) (y - p)^(k-1) dy` on a small circle.
    #[test]
    fn laurent_matches_contour((poles, num) in rational_instance()) {
        let r = inexact(&poles, &num);
        let radius = 1e-2;
        let samples = 256;
        for &(p, _) in &poles {
            let pole = p as f64 / 2.0;
            if r.pole_order(&pole) == 0 {
                continue;
            }
            let data = r.laurent_at(&pole).unwrap();
            for k in 1..=data.max_order {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..samples {
                    let t = 2.0 * PI * j as f64 / samples as f64;
                    let w = Complex64::from_polar(radius, t);
                    // dy = i w dt
                    acc += r.eval_complex(w + pole) * w.powi(k as i32 - 1) * Complex64::i() * w;
                }
                let contour = acc / (samples as f64) / Complex64::i();
                let laurent = data.coefficient(k);
                let scale = data.coefficients.values().fold(0.0f64, |m, c| m.max(c.abs()));
                prop_assert!(
                    (contour - laurent).norm() <= 1e-8 * scale,
                    "pole {} order {}: {} vs {}", pole, k, contour, laurent
                );
            }
        }
    }

    /// The derivative agrees with a central difference away from the poles.
    #[test]
    fn derivative_matches_difference((poles, num) in rational_instance(), y in -4.0f64..4.0) {
        let r = inexact(&poles, &num);
        prop_assume!(poles.iter().all(|&(p, _)| (y - p as f64 / 2.0).abs() > 0.3));
        let h = 1e-6;
        let fd = (r.eval(&(y + h)) - r.eval(&(y - h))) / (2.0 * h);
        let exact = r.derivative().eval(&y);
        let scale = exact.abs().max(r.eval(&y).abs()).max(1.0);
        prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{} vs {}", fd, exact);
    }
}

#[test]
fn expansion_examples() {
    let q = |n| ratio(n, 1);
    let r = RationalFn::new(Poly::new(vec![q(1), q(0), q(1)]), Poly::new(vec![q(0), q(0), q(1)])).unwrap();
    let e = r.expansion_at_infinity(2);
    assert_eq!((e.coefficient(0), e.coefficient(-1), e.coefficient(-2)), (q(1), q(0), q(1)));
    let one_minus_sq = Poly::new(vec![q(1), q(0), q(-1)]);
    let r = RationalFn::new(Poly::one(), one_minus_sq.clone()).unwrap();
    assert_eq!(r.expansion_at_infinity(2).coefficient(-2), q(-1));
    let r = RationalFn::new(Poly::identity(), one_minus_sq).unwrap();
    let e = r.expansion_at_infinity(1);
    assert_eq!(e.leading_power, -1);
    assert_eq!(e.coefficient(-1), q(-1));
}
