//! Front end for the bound-state solver: job configuration, the per-level
//! pipeline, and the CSV/JSON writers behind the `qhj` binary.

pub mod config;
pub mod output;
pub mod pipeline;

use std::fmt::Write as _;
use std::path::Path;

use qhj_core::catalog::{PotentialKind, PotentialSpec};
use qhj_core::qmfprobe::{self, ContourSpec};

use config::{ConfigError, JobConfig, OutputKind, Overrides};
use output::{FloatFormat, Report};
use pipeline::{Mode, RunResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Points per axis of the complex-plane sample written for each QMF dataset.
const QMF_SAMPLES: (usize, usize) = (101, 51);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    Qmf { level: usize },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Qmf { .. } => "qmf",
        }
    }
}

/// Catalog names, parameter constraints, and the Scarf phase table.
pub fn list_potentials() -> String {
    let mut out = String::new();
    for kind in PotentialKind::ALL {
        let _ = writeln!(out, "{}", kind.summary());
    }
    out.push_str("\nscarf1 supersymmetry phases:\n");
    out.push_str("  exact          A-B > 0, A+B > 0   E_n = (A+n alpha)^2 - A^2\n");
    out.push_str("  broken         A-B > 0, A+B < 0   E_n = (B-(n+1/2) alpha)^2 - A^2\n");
    out.push_str("  broken_mirror  A-B < 0, A+B > 0   E_n = (B+(n+1/2) alpha)^2 - A^2\n");
    out.push_str("  exact_swapped  A-B < 0, A+B < 0   E_n = ((n+1) alpha-A)^2 - A^2\n");
    out.push_str("  A-B = 0 or A+B = 0 is a phase boundary and is rejected\n");
    out
}

fn load(path: &Path, overrides: &Overrides) -> Result<(JobConfig, PotentialSpec, FloatFormat), ConfigError> {
    let mut cfg = JobConfig::load(path)?;
    cfg.apply(overrides);
    let spec = cfg.resolve()?;
    let digits = config::csv_digits()?;
    Ok((cfg, spec, FloatFormat { digits }))
}

/// Runs one subcommand and returns the process exit status.
pub fn execute(command: Command, path: &Path, overrides: &Overrides) -> i32 {
    let (mut cfg, spec, fmt) = match load(path, overrides) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (levels, mode): (Vec<usize>, Mode) = match command {
        Command::Solve => ((0..cfg.levels).collect(), Mode::Solve),
        Command::Verify => ((0..cfg.levels).collect(), Mode::Verify),
        Command::Qmf { level } => {
            if !spec.bound_state_count().contains(level) {
                eprintln!("config error: {} has no level {level}", spec.kind);
                return EXIT_CONFIG;
            }
            (vec![level], Mode::Verify)
        }
    };
    let run = pipeline::run(&spec, &cfg, &levels, mode);
    if run.oracle_error.is_some() && cfg.oracle.is_overridden() {
        eprintln!("config error: oracle grid: {}", run.oracle_error.as_deref().unwrap_or_default());
        return EXIT_CONFIG;
    }
    // record the grid actually used so the report reproduces itself
    if let Some(g) = run.grid {
        cfg.oracle.x_min = Some(g.x_min);
        cfg.oracle.x_max = Some(g.x_max);
        cfg.oracle.count = Some(g.count);
    }
    print_summary(&run);
    if let Err(e) = write_outputs(command, &spec, &cfg, fmt, &run) {
        eprintln!("config error: cannot write to {}: {e}", cfg.output_dir.display());
        return EXIT_CONFIG;
    }
    if run.internal_failure() {
        EXIT_INTERNAL
    } else if run.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

fn print_summary(run: &RunResult) {
    if let Some(e) = &run.oracle_error {
        println!("oracle unavailable: {e}");
    }
    for level in &run.levels {
        let r = &level.report;
        let status = if r.passed() { "ok" } else { "FAIL" };
        match (&r.error, r.energy_qhj) {
            (Some(e), _) => println!("n={:<3} {status:<4} {e}", r.n),
            (None, Some(e)) => println!("n={:<3} {status:<4} E={e:.12}", r.n),
            (None, None) => println!("n={:<3} {status:<4}", r.n),
        }
        for c in r.checks.iter().filter(|c| !c.passed) {
            let detail = c.detail.as_deref().unwrap_or("");
            println!("       {} = {:e} (limit {:e}) {detail}", c.name, c.value, c.tolerance);
        }
    }
}

fn write_outputs(
    command: Command,
    spec: &PotentialSpec,
    cfg: &JobConfig,
    fmt: FloatFormat,
    run: &RunResult,
) -> std::io::Result<()> {
    let dir = &cfg.output_dir;
    let wanted = |k: OutputKind| cfg.outputs.contains(&k);
    let qmf_only = matches!(command, Command::Qmf { .. });
    if !qmf_only && wanted(OutputKind::Spectrum) {
        let rows: Vec<_> = run.levels.iter().map(|l| &l.report).collect();
        output::write_file(dir, "spectrum.csv", &output::spectrum_csv(fmt, &rows))?;
    }
    if !qmf_only && wanted(OutputKind::Wavefunctions) {
        if let Some(grid) = &run.grid {
            for level in &run.levels {
                let name = format!("wavefunction_n{}.csv", level.report.n);
                output::write_file(dir, &name, &output::wavefunction_csv(fmt, level, grid))?;
            }
        }
    }
    if qmf_only || wanted(OutputKind::Qmf) {
        for level in &run.levels {
            let Some(solved) = &level.solved else { continue };
            let wf = &solved.wavefunction;
            let Ok(contour) = ContourSpec::around_classical_region(spec, wf) else { continue };
            let samples = qmfprobe::sample_plane(wf, &contour.rect, QMF_SAMPLES.0, QMF_SAMPLES.1);
            let name = format!("qmf_n{}.csv", level.report.n);
            output::write_file(dir, &name, &output::qmf_csv(fmt, &samples))?;
        }
    }
    let report = Report::new(command.name(), cfg, fmt.digits, run);
    let json = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
    output::write_file(dir, "report.json", &(json + "\n"))?;
    Ok(())
}
