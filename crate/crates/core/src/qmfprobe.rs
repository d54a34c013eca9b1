//! Numerical probes of the quantum momentum function `p = -i ψ'/ψ` built from a
//! closed-form state: moving poles, their residues, and the contour integral
//! `(1/2π) ∮ p dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::catalog::{AnalyticRegion, PotentialSpec};
use crate::qhj::{ClosedFormWavefunction, QhjError};

/// `|P| / scale` below which a point counts as a zero of `ψ`.
pub const POLE_THRESHOLD: f64 = 1e-12;
/// Offsets used for the residue limit.
pub const RESIDUE_OFFSETS: (f64, f64) = (1e-4, 1e-5);
pub const TURNING_POINT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES_PER_SIDE: usize = 4000;

/// Fraction of the classical width added on each side of the turning points.
const SPAN_MARGIN: f64 = 0.2;
/// Half-height of the rectangle as a fraction of the classical width.
const HEIGHT_FRACTION: f64 = 0.25;
/// Largest usable fraction of the distance to a fixed singularity.
const SINGULARITY_CLEARANCE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmfError {
    #[error("ψ vanishes at x = {0}")]
    AtPole(Complex64),
    #[error("found {found} moving poles, expected {expected}")]
    CountMismatch { found: usize, expected: usize },
    #[error("contour passes through a zero of ψ at x = {0}")]
    ContourThroughPole(Complex64),
    #[error("no classical turning points at E = {0}")]
    NoTurningPoints(f64),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error(transparent)]
    Qhj(#[from] QhjError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmfSample {
    pub x: Complex64,
    pub p: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingPoleReport {
    pub locations: Vec<f64>,
    pub residues: Vec<Complex64>,
    pub expected_count: usize,
}

impl MovingPoleReport {
    /// Largest `|residue + i|`.
    pub fn max_residue_error(&self) -> f64 {
        self.residues.iter().map(|r| (r + Complex64::i()).norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_half_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub rect: Rect,
    pub samples_per_side: usize,
}

impl ContourSpec {
    pub fn new(re_min: f64, re_max: f64, im_half_height: f64, samples_per_side: usize) -> Self {
        Self { rect: Rect { re_min, re_max, im_half_height }, samples_per_side }
    }

    /// Rectangle around the classical region of `wf`, kept clear of the fixed singularities.
    pub fn around_classical_region(spec: &PotentialSpec, wf: &ClosedFormWavefunction) -> Result<Self, QmfError> {
        let dom = spec.x_domain;
        let (x1, x2) = match turning_points(spec, wf.energy) {
            Ok(t) => t,
            // no well to speak of: use most of a finite interval
            Err(_) if dom.is_bounded() => {
                let w = dom.hi - dom.lo;
                (dom.lo + 0.05 * w, dom.hi - 0.05 * w)
            }
            Err(e) => return Err(e),
        };
        let width = x2 - x1;
        let mut re_min = x1 - SPAN_MARGIN * width;
        let mut re_max = x2 + SPAN_MARGIN * width;
        if dom.is_bounded() {
            re_min = re_min.max(x1 - 0.5 * (x1 - dom.lo));
            re_max = re_max.min(x2 + 0.5 * (dom.hi - x2));
        }
        let mut half = HEIGHT_FRACTION * width;
        if let AnalyticRegion::HorizontalStrip { half_height } = spec.analytic_region() {
            half = half.min(SINGULARITY_CLEARANCE * half_height);
        }
        let contour = Self::new(re_min, re_max, half, DEFAULT_SAMPLES_PER_SIDE);
        contour.validate(spec)?;
        Ok(contour)
    }

    /// Checks that the rectangle stays inside the region where `ψ` is single valued.
    pub fn validate(&self, spec: &PotentialSpec) -> Result<(), QmfError> {
        let r = self.rect;
        if !(r.re_max > r.re_min && r.im_half_height > 0.0 && self.samples_per_side >= 2) {
            return Err(QmfError::InvalidContour(format!("degenerate rectangle {r:?}")));
        }
        match spec.analytic_region() {
            AnalyticRegion::Entire => Ok(()),
            AnalyticRegion::HorizontalStrip { half_height } if r.im_half_height >= half_height => {
                Err(QmfError::InvalidContour(format!(
                    "half-height {} reaches the singularities at ±{half_height}i",
                    r.im_half_height
                )))
            }
            AnalyticRegion::VerticalStrip { half_width } if r.re_min <= -half_width || r.re_max >= half_width => {
                Err(QmfError::InvalidContour(format!(
                    "real span [{}, {}] reaches the walls at ±{half_width}",
                    r.re_min, r.re_max
                )))
            }
            _ => Ok(()),
        }
    }

    /// Counter-clockwise corners starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        let r = self.rect;
        [
            Complex64::new(r.re_min, -r.im_half_height),
            Complex64::new(r.re_max, -r.im_half_height),
            Complex64::new(r.re_max, r.im_half_height),
            Complex64::new(r.re_min, r.im_half_height),
        ]
    }
}

/// `p(x) = -i ψ'(x)/ψ(x)` from the analytic log-derivative of the closed form.
pub fn qmf_eval(wf: &ClosedFormWavefunction, x: Complex64) -> Result<QmfSample, QmfError> {
    let local = wf.local(x)?;
    let size = local.poly_value.norm();
    if !size.is_finite() || size <= POLE_THRESHOLD * local.poly_scale {
        return Err(QmfError::AtPole(x));
    }
    Ok(QmfSample { x, p: -Complex64::i() * local.log_derivative })
}

/// Real zeros of `ψ` inside the domain and the residue of `p` at each.
pub fn locate_moving_poles(wf: &ClosedFormWavefunction) -> Result<MovingPoleReport, QmfError> {
    let locations = wf.nodes();
    if locations.len() != wf.level {
        return Err(QmfError::CountMismatch { found: locations.len(), expected: wf.level });
    }
    let residues = locations.iter().map(|&a| measure_residue(wf, a)).collect::<Result<Vec<_>, _>>()?;
    Ok(MovingPoleReport { locations, residues, expected_count: wf.level })
}

/// `lim (x - a) p(x)` from two offsets with Richardson extrapolation.
fn measure_residue(wf: &ClosedFormWavefunction, a: f64) -> Result<Complex64, QmfError> {
    let (h1, h2) = RESIDUE_OFFSETS;
    let r = |h: f64| -> Result<Complex64, QmfError> { Ok(qmf_eval(wf, Complex64::new(a + h, 0.0))?.p * h) };
    let ratio = h1 / h2;
    Ok((r(h2)? * ratio - r(h1)?) / (ratio - 1.0))
}

/// `(1/2π) ∮ p dx` counter-clockwise around the rectangle.
///
/// Each side uses the trapezoid rule on `samples_per_side` panels, improved by one
/// Richardson step against the rule with half as many panels.
pub fn quantization_integral(wf: &ClosedFormWavefunction, contour: &ContourSpec) -> Result<Complex64, QmfError> {
    let corners = contour.corners();
    let panels = contour.samples_per_side.max(2) & !1;
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        let step = (b - a) / panels as f64;
        for k in 0..=panels {
            let x = a + step * k as f64;
            let p = qmf_eval(wf, x)
                .map_err(|e| match e {
                    QmfError::AtPole(x) => QmfError::ContourThroughPole(x),
                    other => other,
                })?
                .p;
            let end = k == 0 || k == panels;
            let w = if end { 0.5 } else { 1.0 };
            fine += p * step * w;
            if k % 2 == 0 {
                coarse += p * step * 2.0 * w;
            }
        }
    }
    Ok((fine * 4.0 - coarse) / 3.0 / (2.0 * PI))
}

/// `|(1/2π)∮p dx - Σ i·res|` around the classical region: what remains after the
/// measured moving poles are accounted for.
pub fn unexplained_singularity(
    spec: &PotentialSpec,
    wf: &ClosedFormWavefunction,
    poles: &MovingPoleReport,
) -> Result<f64, QmfError> {
    let contour = ContourSpec::around_classical_region(spec, wf)?;
    let total = quantization_integral(wf, &contour)?;
    let accounted: Complex64 = poles.residues.iter().map(|r| Complex64::i() * r).sum();
    Ok((total - accounted).norm())
}

/// Largest step of the five-point difference used for `p'` in [`qhj_residual`].
const RESIDUAL_STEP: f64 = 1e-3;

/// `|p² - i p' - (E - V)|` at real `x`, relative to `max(1, |p|², |E - V|)`,
/// with `p'` from a five-point difference whose step shrinks near a node.
pub fn qhj_residual(spec: &PotentialSpec, wf: &ClosedFormWavefunction, x: f64) -> Result<f64, QmfError> {
    let at = |t: f64| qmf_eval(wf, Complex64::new(t, 0.0)).map(|s| s.p);
    let to_node = wf.nodes().iter().map(|a| (x - a).abs()).fold(f64::INFINITY, f64::min);
    let h = RESIDUAL_STEP.min(0.02 * to_node);
    let p = at(x)?;
    let dp = (at(x - 2.0 * h)? - at(x + 2.0 * h)? + (at(x + h)? - at(x - h)?) * 8.0) / (12.0 * h);
    let kinetic = wf.energy - spec.potential(x);
    let residual = p * p - Complex64::i() * dp - kinetic;
    Ok(residual.norm() / 1f64.max(p.norm_sqr()).max(kinetic.abs()))
}

/// `count` deterministic, well-spread points in `[lo, hi]` at least `gap` away from every node.
pub fn probe_points(wf: &ClosedFormWavefunction, lo: f64, hi: f64, count: usize, gap: f64) -> Vec<f64> {
    let nodes = wf.nodes();
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    (0..)
        .map(|k| lo + (hi - lo) * (0.5 + golden * k as f64).fract())
        .filter(|x| nodes.iter().all(|a| (x - a).abs() > gap))
        .take(count)
        .collect()
}

/// The classical turning points at energy `e`.
pub fn turning_points(spec: &PotentialSpec, e: f64) -> Result<(f64, f64), QmfError> {
    spec.classical_turning_points(e, TURNING_POINT_TOL).ok_or(QmfError::NoTurningPoints(e))
}

/// Samples of `p` on a uniform grid of `nx × ny` points in a rectangle, skipping
/// points where `ψ` vanishes or the continuation is ambiguous.
pub fn sample_plane(wf: &ClosedFormWavefunction, rect: &Rect, nx: usize, ny: usize) -> Vec<QmfSample> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let im =
            if ny == 1 { 0.0 } else { -rect.im_half_height + 2.0 * rect.im_half_height * j as f64 / (ny - 1) as f64 };
        for i in 0..nx {
            let re = if nx == 1 {
                0.5 * (rect.re_min + rect.re_max)
            } else {
                rect.re_min + (rect.re_max - rect.re_min) * i as f64 / (nx - 1) as f64
            };
            if let Ok(s) = qmf_eval(wf, Complex64::new(re, im)) {
                out.push(s);
            }
        }
    }
    out
}

/// Largest `|p - iW|` over `points`.
pub fn superpotential_mismatch(
    spec: &PotentialSpec,
    wf: &ClosedFormWavefunction,
    points: impl IntoIterator<Item = f64>,
) -> Result<f64, QmfError> {
    let mut worst = 0.0f64;
    for x in points {
        let w = spec
            .superpotential(x)
            .ok_or_else(|| QmfError::InvalidContour(format!("{} has no superpotential", spec.kind)))?;
        let p = qmf_eval(wf, Complex64::new(x, 0.0))?.p;
        worst = worst.max((p - Complex64::new(0.0, w)).norm());
    }
    Ok(worst)
}
