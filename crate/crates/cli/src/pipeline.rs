//! Per-level solve, oracle comparison, and probe checks.

use rayon::prelude::*;
use serde::Serialize;

use qhj_core::catalog::PotentialSpec;
use qhj_core::oracle::{self, Grid, OracleEigenpair, OracleError, Scheme};
use qhj_core::qhj::{solve_state, QhjError, SolvedLevel};
use qhj_core::qmfprobe::{self, ContourSpec, QmfError};

use crate::config::{JobConfig, DEFAULT_ORACLE_COUNT};

pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const ORACLE_ENERGY_TOL: f64 = 1e-5;
pub const OVERLAP_TOL: f64 = 1e-6;
pub const RESIDUE_TOL: f64 = 1e-6;
pub const CONTOUR_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const SUSY_TOL: f64 = 1e-8;
/// Number of real sample points for the pointwise checks.
const PROBE_POINTS: usize = 100;
/// Minimum distance of a sample point from a node.
const NODE_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Energies, wave functions and the oracle comparison.
    Solve,
    /// Everything in `Solve` plus the momentum-function probes.
    Verify,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value <= tolerance`.
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, passed: value <= tolerance, value, tolerance, detail: None }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        Self { name, passed: false, value: f64::NAN, tolerance: f64::NAN, detail: Some(detail) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub n: usize,
    pub energy_qhj: Option<f64>,
    pub energy_closed_form: Option<f64>,
    pub energy_oracle: Option<f64>,
    pub abs_err: Option<f64>,
    pub overlap: Option<f64>,
    pub nodes: Option<usize>,
    pub susy_phase: String,
    pub residues_used: Vec<(f64, f64)>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The failure points at a defect in the solver rather than at the input.
    #[serde(skip)]
    pub internal: bool,
}

impl LevelReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

/// Everything computed for one level, kept for the output writers.
pub struct LevelResult {
    pub report: LevelReport,
    pub solved: Option<SolvedLevel>,
    pub oracle: Option<OracleEigenpair>,
}

pub struct RunResult {
    pub levels: Vec<LevelResult>,
    pub grid: Option<Grid>,
    /// Set when the oracle could not be built at all.
    pub oracle_error: Option<String>,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.oracle_error.is_none() && self.levels.iter().all(|l| l.report.passed())
    }

    pub fn internal_failure(&self) -> bool {
        self.levels.iter().any(|l| l.report.internal)
    }
}

fn is_internal(e: &QhjError) -> bool {
    matches!(
        e,
        QhjError::InconsistentReduction(_)
            | QhjError::UndeclaredPole(_)
            | QhjError::ComplexResidues { .. }
            | QhjError::Polyrat(_)
            | QhjError::Ortho(_)
    )
}

/// The oracle grid: automatic unless the configuration fixes an end or the count.
pub fn oracle_grid(spec: &PotentialSpec, cfg: &JobConfig, e_max: f64) -> Result<Grid, OracleError> {
    let count = cfg.oracle.count.unwrap_or(DEFAULT_ORACLE_COUNT);
    let auto = Grid::auto(spec, e_max, count)?;
    Grid::new(cfg.oracle.x_min.unwrap_or(auto.x_min), cfg.oracle.x_max.unwrap_or(auto.x_max), count)
}

/// Solves levels `levels` and checks each one.
pub fn run(spec: &PotentialSpec, cfg: &JobConfig, levels: &[usize], mode: Mode) -> RunResult {
    let phase = spec.classify_susy().map(|p| p.name().to_string()).unwrap_or_default();
    let solved: Vec<Result<SolvedLevel, QhjError>> = levels.par_iter().map(|&n| solve_state(spec, n)).collect();

    let e_max = levels
        .iter()
        .zip(&solved)
        .map(|(&n, s)| match s {
            Ok(s) => s.line.energy_qhj,
            Err(_) => spec.closed_form_energy(n).unwrap_or(f64::NAN),
        })
        .filter(|e| e.is_finite())
        .fold(spec.energy_floor().unwrap_or(0.0), f64::max);
    let top = levels.iter().max().map_or(0, |n| n + 1);
    let oracle = oracle_grid(spec, cfg, e_max).and_then(|grid| {
        let op = oracle::discretize(spec, &grid, Scheme::Numerov)?;
        let energies = oracle::lowest_eigenvalues(&op, top);
        Ok((grid, op, energies))
    });
    let (grid, oracle_error) = match &oracle {
        Ok((g, _, _)) => (Some(*g), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let results = levels
        .par_iter()
        .zip(solved)
        .map(|(&n, solved)| {
            let mut report = LevelReport {
                n,
                energy_qhj: None,
                energy_closed_form: spec.closed_form_energy(n).ok(),
                energy_oracle: None,
                abs_err: None,
                overlap: None,
                nodes: None,
                susy_phase: phase.clone(),
                residues_used: Vec::new(),
                checks: Vec::new(),
                error: None,
                internal: false,
            };
            let level = match solved {
                Ok(level) => level,
                Err(e) => {
                    report.internal = is_internal(&e);
                    report.error = Some(e.to_string());
                    return LevelResult { report, solved: None, oracle: None };
                }
            };
            let e = level.line.energy_qhj;
            let scale = e.abs().max(1.0);
            report.energy_qhj = Some(e);
            report.residues_used = level.residues.chosen.clone();
            let nodes = level.wavefunction.nodes().len();
            report.nodes = Some(nodes);
            let checks = &mut report.checks;
            checks.push(Check::at_most(
                "closed_form_energy",
                (e - level.line.energy_closed_form).abs() / scale,
                CLOSED_FORM_TOL,
            ));
            checks.push(Check {
                name: "selection_normalizable",
                passed: level.residues.agrees_with_normalizability,
                value: if level.residues.agrees_with_normalizability { 1.0 } else { 0.0 },
                tolerance: 1.0,
                detail: Some(level.residues.selection_rule.name().to_string()),
            });

            let mut pair = None;
            match &oracle {
                Ok((_, op, energies)) => match energies.get(n) {
                    Some(&eo) => {
                        report.energy_oracle = Some(eo);
                        report.abs_err = Some((e - eo).abs());
                        report.checks.push(Check::at_most("oracle_energy", (e - eo).abs() / scale, ORACLE_ENERGY_TOL));
                        match oracle::eigenvector(op, eo) {
                            Ok(p) => {
                                let ov = oracle::overlap(&level.wavefunction, &p);
                                report.overlap = Some(ov);
                                report.checks.push(Check::at_most("overlap", 1.0 - ov, OVERLAP_TOL));
                                let changes = p.sign_changes();
                                report.checks.push(Check {
                                    name: "node_count",
                                    passed: changes == n && nodes == n && p.index == n,
                                    value: changes as f64,
                                    tolerance: n as f64,
                                    detail: Some(format!("closed form {nodes}, oracle {changes}, index {}", p.index)),
                                });
                                pair = Some(p);
                            }
                            Err(err) => report.checks.push(Check::failed("overlap", err.to_string())),
                        }
                    }
                    None => report
                        .checks
                        .push(Check::failed("oracle_energy", format!("oracle grid holds fewer than {} states", n + 1))),
                },
                Err(err) => report.checks.push(Check::failed("oracle_energy", err.to_string())),
            }

            if mode == Mode::Verify {
                probe_checks(spec, &level, &mut report.checks);
            }
            LevelResult { report, solved: Some(level), oracle: pair }
        })
        .collect();
    RunResult { levels: results, grid, oracle_error }
}

fn probe_error(name: &'static str, e: QmfError) -> Check {
    Check::failed(name, e.to_string())
}

/// Moving poles, their residues, the contour integral, the pointwise
/// Schrödinger residual and, for unbroken ground states, the superpotential identity.
pub fn probe_checks(spec: &PotentialSpec, level: &SolvedLevel, checks: &mut Vec<Check>) {
    let wf = &level.wavefunction;
    let n = level.line.n;
    match qmfprobe::locate_moving_poles(wf) {
        Ok(poles) => {
            checks.push(Check::at_most("moving_pole_residues", poles.max_residue_error(), RESIDUE_TOL));
            match qmfprobe::unexplained_singularity(spec, wf, &poles) {
                Ok(rest) => checks.push(Check::at_most("unexplained_singularity", rest, CONTOUR_TOL)),
                Err(e) => checks.push(probe_error("unexplained_singularity", e)),
            }
        }
        Err(e) => checks.push(probe_error("moving_pole_residues", e)),
    }
    let contour = match ContourSpec::around_classical_region(spec, wf) {
        Ok(c) => c,
        Err(e) => {
            checks.push(probe_error("quantization_integral", e));
            return;
        }
    };
    match qmfprobe::quantization_integral(wf, &contour) {
        Ok(v) => checks.push(Check::at_most("quantization_integral", (v - n as f64).norm(), CONTOUR_TOL)),
        Err(e) => checks.push(probe_error("quantization_integral", e)),
    }
    let points = qmfprobe::probe_points(wf, contour.rect.re_min, contour.rect.re_max, PROBE_POINTS, NODE_GAP);
    let residual =
        points.iter().map(|&x| qmfprobe::qhj_residual(spec, wf, x)).try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
    match residual {
        Ok(r) => checks.push(Check::at_most("qhj_residual", r, RESIDUAL_TOL)),
        Err(e) => checks.push(probe_error("qhj_residual", e)),
    }
    let unbroken = matches!(spec.classify_susy(), Ok(qhj_core::catalog::SusyPhase::Exact));
    if n == 0 && unbroken && spec.superpotential(0.0).is_some() {
        match qmfprobe::superpotential_mismatch(spec, wf, points) {
            Ok(r) => checks.push(Check::at_most("superpotential_identity", r, SUSY_TOL)),
            Err(e) => checks.push(probe_error("superpotential_identity", e)),
        }
    }
}
