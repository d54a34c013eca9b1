use std::sync::Arc;

use proptest::prelude::*;

use qhj_core::catalog::{PotentialSpec, SelectionRule};
use qhj_core::qhj::{
    build_chi_equation, fixed_pole_residues, select_residues, solve_level, solve_state, ChiFamily,
    ClosedFormWavefunction,
};

fn rosen_morse() -> PotentialSpec {
    PotentialSpec::rosen_morse(4.0, 1.0).unwrap()
}

fn states(spec: &PotentialSpec, k: usize) -> Vec<ClosedFormWavefunction> {
    (0..k).map(|n| solve_state(spec, n).unwrap().wavefunction).collect()
}

fn acceptance_sets() -> Vec<(PotentialSpec, usize)> {
    vec![
        (PotentialSpec::harmonic(), 11),
        (rosen_morse(), 4),
        (PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap(), 5),
        (PotentialSpec::scarf1(1.0, -3.0, 1.0).unwrap(), 3),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Sum and product of the two candidate residues.
    #[test]
    fn vieta_rosen_morse(e in 0.0f64..16.0, a in 0.5f64..6.0, alpha in 0.3f64..2.0) {
        let spec = PotentialSpec::rosen_morse(a, alpha).unwrap();
        prop_assume!(e < a * a);
        let eq = build_chi_equation(&spec, e).unwrap();
        for pole in [1.0, -1.0] {
            let pair = fixed_pole_residues(&eq, pole).unwrap();
            prop_assert!((pair.root_plus + pair.root_minus - 1.0).abs() < 1e-10);
            prop_assert!((pair.root_plus * pair.root_minus - pair.r2).abs() < 1e-10 * pair.r2.abs().max(1.0));
        }
    }

    #[test]
    fn vieta_scarf(e in 0.0f64..60.0, a in 0.5f64..5.0, b in -5.0f64..5.0) {
        prop_assume!((a - b).abs() > 0.1 && (a + b).abs() > 0.1);
        let spec = PotentialSpec::scarf1(a, b, 1.0).unwrap();
        let eq = build_chi_equation(&spec, e).unwrap();
        for pole in [1.0, -1.0] {
            let pair = fixed_pole_residues(&eq, pole).unwrap();
            prop_assert!((pair.root_plus + pair.root_minus - 1.0).abs() < 1e-10);
            prop_assert!((pair.root_plus * pair.root_minus - pair.r2).abs() < 1e-10 * pair.r2.abs().max(1.0));
        }
    }
}

#[test]
fn selection_rules_agree_below_threshold() {
    let spec = rosen_morse();
    let family = Arc::new(ChiFamily::new(&spec).unwrap());
    for k in 0..50 {
        let e = 16.0 * k as f64 / 50.0;
        let eq = family.at(e).unwrap();
        let pairs = eq.residue_pairs().unwrap();
        let set = select_residues(&spec, &eq, &pairs).unwrap();
        assert_eq!(set.selection_rule, SelectionRule::SusyLimit);
        assert!(set.agrees_with_normalizability, "E = {e}");
        assert_eq!(set.constant_c, 0.0);
    }
}

#[test]
fn energies_match_closed_forms() {
    for (spec, k) in acceptance_sets() {
        for n in 0..k {
            let line = solve_level(&spec, n).unwrap();
            let scale = line.energy_closed_form.abs().max(1.0);
            assert!(
                (line.energy_qhj - line.energy_closed_form).abs() <= 1e-9 * scale,
                "{:?} n={n}: {} vs {}",
                spec.kind,
                line.energy_qhj,
                line.energy_closed_form
            );
        }
    }
}

#[test]
fn gram_matrix_is_identity() {
    for (spec, k) in acceptance_sets() {
        let wfs = states(&spec, k.min(6));
        for (i, a) in wfs.iter().enumerate() {
            for (j, b) in wfs.iter().enumerate() {
                let g = a.inner_product(b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-8, "{:?} <{i}|{j}> = {g}", spec.kind);
            }
        }
    }
}

#[test]
fn node_theorem() {
    for (spec, k) in acceptance_sets() {
        for wf in states(&spec, k) {
            assert_eq!(wf.nodes().len(), wf.level);
            // sign changes of the sampled function agree
            let (lo, hi) = match spec.x_domain.is_bounded() {
                true => (spec.x_domain.lo + 1e-6, spec.x_domain.hi - 1e-6),
                false => (-12.0, 12.0),
            };
            let mut prev = 0.0f64;
            let mut changes = 0;
            for i in 0..=20_000 {
                let v = wf.eval(lo + (hi - lo) * i as f64 / 20_000.0);
                if v.abs() > 1e-200 {
                    if prev != 0.0 && v.signum() != prev.signum() {
                        changes += 1;
                    }
                    prev = v;
                }
            }
            assert_eq!(changes, wf.level, "{:?}", spec.kind);
        }
    }
}

#[test]
fn supersymmetric_ground_states() {
    let exact = PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap();
    let e0 = solve_level(&exact, 0).unwrap().energy_qhj;
    assert!(e0.abs() < 1e-9);
    // ψ₀ exp(∫W) is constant, with ∫W = -ln cos x - ln(sec x + tan x) for A = 3, B = 1
    let wf = solve_state(&exact, 0).unwrap().wavefunction;
    let integral_w = |x: f64| -3.0 * x.cos().ln() - (1.0 / x.cos() + x.tan()).ln();
    let base = wf.eval(0.0) * integral_w(0.0).exp();
    for k in -14..=14 {
        let x = 0.1 * k as f64;
        let ratio = wf.eval(x) * integral_w(x).exp();
        assert!((ratio - base).abs() < 1e-8 * base, "x = {x}");
    }
    let broken = PotentialSpec::scarf1(1.0, -3.0, 1.0).unwrap();
    assert!(solve_level(&broken, 0).unwrap().energy_qhj > 0.0);
}

#[test]
fn wavefunctions_are_real_on_the_line() {
    let wf = solve_state(&rosen_morse(), 2).unwrap().wavefunction;
    for x in [-3.0, -0.4, 0.0, 1.1, 5.0] {
        let local = wf.local(num_complex::Complex64::new(x, 0.0)).unwrap();
        assert!(local.psi.im.abs() <= 1e-14 * local.psi.norm().max(1e-300));
        assert!((local.psi.re - wf.eval(x)).abs() < 1e-12);
    }
}

#[test]
fn rosen_morse_ladder_below_threshold() {
    let spec = PotentialSpec::rosen_morse(3.5, 0.75).unwrap();
    let mut last = f64::NEG_INFINITY;
    let mut n = 0;
    while let Ok(e) = spec.closed_form_energy(n) {
        assert!(e > last && e < 3.5 * 3.5);
        last = e;
        n += 1;
    }
    assert_eq!(n, 5);
}
