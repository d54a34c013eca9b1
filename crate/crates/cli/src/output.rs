//! CSV and JSON writers. Floats use a fixed scientific format so identical runs
//! give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use qhj_core::oracle::Grid;
use qhj_core::qmfprobe::QmfSample;

use crate::config::JobConfig;
use crate::pipeline::{LevelReport, LevelResult, RunResult};

pub const SPECTRUM_HEADER: &str = "n,E_qhj,E_closed_form,E_oracle,abs_err,overlap,nodes,susy_phase,residues_used";

#[derive(Debug, Clone, Copy)]
pub struct FloatFormat {
    pub digits: usize,
}

impl FloatFormat {
    pub fn fmt(&self, v: f64) -> String {
        if v.is_nan() {
            "nan".into()
        } else {
            format!("{:.*e}", self.digits.saturating_sub(1), v)
        }
    }

    fn opt(&self, v: Option<f64>) -> String {
        v.map_or_else(|| "nan".into(), |v| self.fmt(v))
    }
}

fn residues_field(f: FloatFormat, residues: &[(f64, f64)]) -> String {
    if residues.is_empty() {
        return "none".into();
    }
    residues.iter().map(|(pole, b)| format!("{pole}:{}", f.fmt(*b))).collect::<Vec<_>>().join(";")
}

pub fn spectrum_csv(f: FloatFormat, rows: &[&LevelReport]) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            f.opt(r.energy_qhj),
            f.opt(r.energy_closed_form),
            f.opt(r.energy_oracle),
            f.opt(r.abs_err),
            f.opt(r.overlap),
            r.nodes.map_or_else(|| "nan".into(), |n| n.to_string()),
            r.susy_phase,
            residues_field(f, &r.residues_used),
        );
    }
    out
}

/// `x, psi_qhj, psi_oracle` at every oracle grid point.
pub fn wavefunction_csv(f: FloatFormat, level: &LevelResult, grid: &Grid) -> String {
    let mut out = String::from("x,psi_qhj,psi_oracle\n");
    for (i, x) in grid.points().enumerate() {
        let qhj = level.solved.as_ref().map_or(f64::NAN, |s| s.wavefunction.eval(x));
        let oracle = level.oracle.as_ref().map_or(f64::NAN, |p| p.vector[i]);
        let _ = writeln!(out, "{},{},{}", f.fmt(x), f.fmt(qhj), f.fmt(oracle));
    }
    out
}

pub fn qmf_csv(f: FloatFormat, samples: &[QmfSample]) -> String {
    let mut out = String::from("re_x,im_x,re_p,im_p\n");
    for s in samples {
        let Complex64 { re, im } = s.x;
        let _ = writeln!(out, "{},{},{},{}", f.fmt(re), f.fmt(im), f.fmt(s.p.re), f.fmt(s.p.im));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a JobConfig,
    pub csv_digits: usize,
    pub oracle_grid: Option<GridSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_error: Option<&'a str>,
    pub passed: bool,
    pub levels: Vec<&'a LevelReport>,
}

#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
    pub step: f64,
}

impl<'a> Report<'a> {
    pub fn new(command: &'a str, config: &'a JobConfig, digits: usize, run: &'a RunResult) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            csv_digits: digits,
            oracle_grid: run.grid.map(|g| GridSummary { x_min: g.x_min, x_max: g.x_max, count: g.count, step: g.step }),
            oracle_error: run.oracle_error.as_deref(),
            passed: run.passed(),
            levels: run.levels.iter().map(|l| &l.report).collect(),
        }
    }
}

/// Writes `contents` to `dir/name`, creating `dir` when needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
