//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! `cargo test -p qhj-cli --release --test acceptance -- --nocapture`

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde_json::Value;

use qhj_core::catalog::{BoundStateCount, PotentialSpec};
use qhj_core::oracle::{discretize, lowest_eigenvalues, Grid, Scheme};
use qhj_core::orthopoly::jacobi_eval;
use qhj_core::polyrat::{ratio, Poly, RationalFn};
use qhj_core::qhj::{build_chi_equation, fixed_pole_residues, solve_level, solve_state};
use qhj_core::qmfprobe::{locate_moving_poles, quantization_integral, superpotential_mismatch, ContourSpec};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

/// Runs the binary and returns its exit code and parsed report.
fn run_cli(args: &[&str], out: &Path) -> (i32, Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_qhj"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env_remove("QHJ_CSV_DIGITS")
        .output()
        .expect("binary runs");
    let code = status.status.code().unwrap_or(-1);
    let report = fs::read_to_string(out.join("report.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(Value::Null);
    (code, report)
}

fn verify(config: &str) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    run_cli(&["verify", config_path(config).to_str().unwrap()], dir.path())
}

fn levels(report: &Value) -> Vec<&Value> {
    report["levels"].as_array().map(|v| v.iter().collect()).unwrap_or_default()
}

fn field(level: &Value, key: &str) -> f64 {
    level[key].as_f64().unwrap_or(f64::NAN)
}

fn check_passed(level: &Value, name: &str) -> bool {
    level["checks"].as_array().into_iter().flatten().any(|c| c["name"] == name && c["passed"] == true)
}

/// Collects failure reasons for one criterion.
#[derive(Default)]
struct Outcome(Vec<String>);

impl Outcome {
    fn require(&mut self, ok: bool, why: impl FnOnce() -> String) {
        if !ok {
            self.0.push(why());
        }
    }
}

/// Spectrum, oracle agreement, overlap and node checks shared by criteria 2 to 4.
fn spectrum_criterion(config: &str, expected: &[f64], o: &mut Outcome) {
    let (code, report) = verify(config);
    o.require(code == 0, || format!("verify exited with {code}"));
    let lv = levels(&report);
    o.require(lv.len() == expected.len(), || format!("{} levels reported", lv.len()));
    for (n, (level, &want)) in lv.iter().zip(expected).enumerate() {
        let e = field(level, "energy_qhj");
        o.require((e - want).abs() <= 1e-9 * want.abs().max(1.0), || format!("n={n}: E = {e}, want {want}"));
        let err = (field(level, "energy_oracle") - e).abs();
        o.require(err <= 1e-5, || format!("n={n}: oracle off by {err:e}"));
        let ov = field(level, "overlap");
        o.require(ov >= 1.0 - 1e-6, || format!("n={n}: overlap {ov}"));
        o.require(level["nodes"].as_u64() == Some(n as u64), || format!("n={n}: nodes {}", level["nodes"]));
        o.require(check_passed(level, "selection_normalizable"), || format!("n={n}: selection"));
    }
}

fn criterion_1(o: &mut Outcome) {
    let start = Instant::now();
    let spec = PotentialSpec::harmonic();
    for n in 0..=10 {
        let e = solve_level(&spec, n).map(|l| l.energy_qhj).unwrap_or(f64::NAN);
        let want = (2 * n + 1) as f64;
        o.require((e - want).abs() <= 1e-9, || format!("n={n}: solve_level gives {e}"));
    }
    let (code, report) = verify("harmonic.json");
    o.require(code == 0, || format!("verify exited with {code}"));
    let grid = &report["oracle_grid"];
    o.require(grid["x_min"] == -12.0 && grid["x_max"] == 12.0, || format!("grid {grid}"));
    let lv = levels(&report);
    o.require(lv.len() == 11, || format!("{} levels", lv.len()));
    for level in lv {
        let want = field(level, "energy_closed_form");
        let rel = (field(level, "energy_oracle") - want).abs() / want;
        o.require(rel <= 1e-6, || format!("n={}: oracle relative error {rel:e}", level["n"]));
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.require(elapsed < 10.0, || format!("took {elapsed:.1} s"));
}

fn criterion_2(o: &mut Outcome) {
    let spec = PotentialSpec::rosen_morse(4.0, 1.0).unwrap();
    let count = spec.bound_state_count();
    o.require(count == BoundStateCount::Finite(4), || format!("bound-state count {count:?}"));
    spectrum_criterion("rosen_morse.json", &[0.0, 7.0, 12.0, 15.0], o);
}

fn criterion_3(o: &mut Outcome) {
    spectrum_criterion("scarf_exact.json", &[0.0, 7.0, 16.0, 27.0, 40.0], o);
    let spec = PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap();
    let ground = solve_state(&spec, 0).unwrap();
    o.require(ground.line.energy_qhj.abs() <= 1e-9, || format!("E0 = {}", ground.line.energy_qhj));
    // The ground state is exp(-∫W), so the momentum -i ψ'/ψ equals +iW.
    let points = (0..=200).map(|k| -1.5 + 3.0 * k as f64 / 200.0);
    match superpotential_mismatch(&spec, &ground.wavefunction, points) {
        Ok(worst) => o.require(worst <= 1e-8, || format!("|p - iW| = {worst:e}")),
        Err(e) => o.require(false, || e.to_string()),
    }
}

fn criterion_4(o: &mut Outcome) {
    spectrum_criterion("scarf_broken.json", &[11.25, 19.25, 29.25], o);
    let spec = PotentialSpec::scarf1(1.0, -3.0, 1.0).unwrap();
    let e0 = solve_level(&spec, 0).map(|l| l.energy_qhj).unwrap_or(f64::NAN);
    o.require(e0 > 0.0, || format!("E0 = {e0}"));
    // residues actually used: (A-B)/2 + 1/4 at y = 1 and -(A+B)/2 + 3/4 at y = -1
    for n in 0..3 {
        let used = solve_state(&spec, n).unwrap().residues.chosen;
        let want = [(1.0, 2.25), (-1.0, 1.75)];
        for (pole, b) in want {
            let got = used.iter().find(|(p, _)| *p == pole).map(|(_, b)| *b);
            o.require(got.is_some_and(|g| (g - b).abs() < 1e-12), || format!("n={n}: residue at {pole} is {got:?}"));
        }
    }
}

fn criterion_5(o: &mut Outcome) {
    let sets = [(PotentialSpec::harmonic(), 6), (PotentialSpec::rosen_morse(4.0, 1.0).unwrap(), 4)];
    for (spec, k) in sets {
        for n in 0..k {
            let wf = solve_state(&spec, n).unwrap().wavefunction;
            let value = ContourSpec::around_classical_region(&spec, &wf).and_then(|c| quantization_integral(&wf, &c));
            match value {
                Ok(v) => o.require((v.re - n as f64).abs() <= 1e-6 && v.im.abs() <= 1e-6, || {
                    format!("{} n={n}: {v}", spec.kind)
                }),
                Err(e) => o.require(false, || format!("{} n={n}: {e}", spec.kind)),
            }
        }
    }
}

fn criterion_6(o: &mut Outcome) {
    let sets = [
        (PotentialSpec::harmonic(), 11),
        (PotentialSpec::rosen_morse(4.0, 1.0).unwrap(), 4),
        (PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap(), 5),
        (PotentialSpec::scarf1(1.0, -3.0, 1.0).unwrap(), 3),
    ];
    for (spec, k) in sets {
        for n in 0..k {
            let wf = solve_state(&spec, n).unwrap().wavefunction;
            match locate_moving_poles(&wf) {
                Ok(poles) => {
                    o.require(poles.locations.len() == n, || {
                        format!("{} n={n}: {} poles", spec.kind, poles.locations.len())
                    });
                    for r in &poles.residues {
                        o.require((r.re).abs() <= 1e-6 && (r.im + 1.0).abs() <= 1e-6, || {
                            format!("{} n={n}: residue {r}", spec.kind)
                        });
                    }
                }
                Err(e) => o.require(false, || format!("{} n={n}: {e}", spec.kind)),
            }
        }
    }
}

fn criterion_7(o: &mut Outcome) {
    let (a, alpha) = (4.0, 1.0);
    let spec = PotentialSpec::rosen_morse(a, alpha).unwrap();
    for k in 0..20 {
        let e = -3.0 + 18.9 * k as f64 / 19.0;
        let root = (a * a - e).sqrt() / (2.0 * alpha);
        let eq = build_chi_equation(&spec, e).unwrap();
        for pole in [1.0, -1.0] {
            let pair = fixed_pole_residues(&eq, pole).unwrap();
            let ok = (pair.root_plus - (0.5 + root)).abs() <= 1e-10 && (pair.root_minus - (0.5 - root)).abs() <= 1e-10;
            o.require(ok, || format!("rosen_morse E={e} y={pole}: {pair:?}"));
        }
    }
    for (a, b, alpha) in [(3.0, 1.0, 1.0), (1.0, -3.0, 1.0), (2.5, 0.5, 1.5), (4.0, -1.0, 0.5)] {
        let spec = PotentialSpec::scarf1(a, b, alpha).unwrap();
        for e in [0.0, 7.0, 30.0] {
            let eq = build_chi_equation(&spec, e).unwrap();
            for (pole, c) in [(1.0, a - b), (-1.0, a + b)] {
                let pair = fixed_pole_residues(&eq, pole).unwrap();
                let mut got = [pair.root_plus, pair.root_minus];
                let mut want = [c / (2.0 * alpha) + 0.25, -c / (2.0 * alpha) + 0.75];
                got.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                let ok = got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= 1e-10);
                o.require(ok, || format!("scarf1 ({a}, {b}, {alpha}) y={pole}: {got:?} vs {want:?}"));
            }
        }
    }
}

/// Gauss–Legendre rule by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
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

fn criterion_8(o: &mut Outcome) {
    // Vieta on the residue pairs
    for (spec, energies) in [
        (PotentialSpec::rosen_morse(4.0, 1.0).unwrap(), [0.0, 3.3, 9.1, 15.9]),
        (PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap(), [0.0, 5.0, 16.0, 41.5]),
    ] {
        for e in energies {
            let eq = build_chi_equation(&spec, e).unwrap();
            for pole in [1.0, -1.0] {
                let p = fixed_pole_residues(&eq, pole).unwrap();
                let ok = (p.root_plus + p.root_minus - 1.0).abs() < 1e-10
                    && (p.root_plus * p.root_minus - p.r2).abs() < 1e-10 * p.r2.abs().max(1.0);
                o.require(ok, || format!("vieta {} E={e}: {p:?}", spec.kind));
            }
        }
    }
    // residue theorem on (y³ + 2y - 1) / ((y - 1)² (y + 1/2))
    let q = |n| ratio(n, 1);
    let den = &Poly::new(vec![q(1), q(-2), q(1)]) * &Poly::new(vec![ratio(1, 2), q(1)]);
    let r = RationalFn::new(Poly::new(vec![q(-1), q(2), q(0), q(1)]), den).unwrap();
    let total = r.laurent_at(&q(1)).unwrap().residue() + r.laurent_at(&ratio(-1, 2)).unwrap().residue();
    let at_infinity = r.expansion_at_infinity(3).coefficient(-1);
    o.require(total == at_infinity, || format!("residue sum {total} vs {at_infinity}"));
    // Jacobi orthogonality
    let rule = gauss_legendre(200);
    for (a, b) in [(0.0, 0.0), (2.5, 3.0), (1.0, 5.5)] {
        for m in 0..6 {
            for n in (m + 1)..6 {
                let s: f64 = rule
                    .iter()
                    .map(|&(y, w)| {
                        w * jacobi_eval(m, a, b, y) * jacobi_eval(n, a, b, y) * (1.0 - y).powf(a) * (1.0 + y).powf(b)
                    })
                    .sum();
                o.require(s.abs() < 1e-8, || format!("jacobi ({a}, {b}) <{m}|{n}> = {s:e}"));
            }
        }
    }
    // Gram matrix of assembled states
    for (spec, k) in [
        (PotentialSpec::harmonic(), 6),
        (PotentialSpec::rosen_morse(4.0, 1.0).unwrap(), 4),
        (PotentialSpec::scarf1(3.0, 1.0, 1.0).unwrap(), 5),
        (PotentialSpec::scarf1(1.0, -3.0, 1.0).unwrap(), 3),
    ] {
        let wfs: Vec<_> = (0..k).map(|n| solve_state(&spec, n).unwrap().wavefunction).collect();
        for (i, a) in wfs.iter().enumerate() {
            for (j, b) in wfs.iter().enumerate() {
                let g = a.inner_product(b);
                let want = if i == j { 1.0 } else { 0.0 };
                o.require((g - want).abs() < 1e-8, || format!("gram {} <{i}|{j}> = {g}", spec.kind));
            }
        }
    }
    // Numerov refinement order
    let spec = PotentialSpec::harmonic();
    let errors = |count| {
        let op = discretize(&spec, &Grid::new(-12.0, 12.0, count).unwrap(), Scheme::Numerov).unwrap();
        lowest_eigenvalues(&op, 4).iter().enumerate().map(|(n, e)| (e - (2 * n + 1) as f64).abs()).collect::<Vec<_>>()
    };
    for (n, (c, f)) in errors(801).iter().zip(errors(1601)).enumerate() {
        o.require(c / f >= 12.0, || format!("numerov n={n}: ratio {}", c / f));
    }
}

fn criterion_9(o: &mut Outcome) {
    let config = config_path("rosen_morse.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ca, _) = run_cli(&["verify", config.to_str().unwrap()], a.path());
    let (cb, _) = run_cli(&["verify", config.to_str().unwrap()], b.path());
    o.require(ca == 0 && cb == 0, || format!("exit codes {ca}, {cb}"));
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    o.require(names.len() == 9, || format!("csv files {names:?}"));
    for name in names {
        let same = fs::read(a.path().join(&name)).ok() == fs::read(b.path().join(&name)).ok();
        o.require(same, || format!("{name} differs"));
    }
}

type Criterion = (&'static str, fn(&mut Outcome));

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("harmonic spectrum", criterion_1),
        ("rosen_morse A=4", criterion_2),
        ("scarf1 unbroken A=3 B=1", criterion_3),
        ("scarf1 broken A=1 B=-3", criterion_4),
        ("quantization contour", criterion_5),
        ("moving-pole residues", criterion_6),
        ("fixed-pole residue formulas", criterion_7),
        ("property suites", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut o = Outcome::default();
        run(&mut o);
        if o.0.is_empty() {
            println!("criterion {}: PASS  {name}", i + 1);
        } else {
            println!("criterion {}: FAIL  {name}: {}", i + 1, o.0.join("; "));
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
