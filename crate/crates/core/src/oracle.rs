//! Independent finite-difference eigensolver for `-ψ'' + V(x) ψ = E ψ`.
//!
//! Dirichlet conditions at both grid ends; eigenvalues by Sturm counting and
//! bisection, eigenvectors by inverse iteration. Nothing here depends on the
//! Hamilton–Jacobi machinery apart from the final overlap.

use thiserror::Error;

use crate::catalog::PotentialSpec;
use crate::qhj::ClosedFormWavefunction;

/// Bisection tolerance on eigenvalues.
pub const EIGENVALUE_TOL: f64 = 1e-12;
/// Offset from the target eigenvalue used in the shifted solves.
pub const SHIFT_OFFSET: f64 = 1e-8;
/// Relative residual at which inverse iteration stops.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

/// Minimum half-width of the box on the whole line.
const MIN_HALF_WIDTH: f64 = 12.0;
/// Decay lengths kept beyond the outer turning point (`e^-28 < 10^-12`).
const TAIL_DECAY_LENGTHS: f64 = 28.0;
/// Upper bound on `h² (V_max - V_min) / 12` for the Numerov transformation.
const NUMEROV_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid violates the domain: {0}")]
    DomainViolation(String),
    #[error("inverse iteration at E = {energy} did not converge in {iterations} steps (residual {residual:e})")]
    ConvergenceFailure { energy: f64, iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
    pub step: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self, OracleError> {
        if count < 3 {
            return Err(OracleError::InvalidGrid(format!("count = {count} < 3")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(OracleError::InvalidGrid(format!("bad range [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, count, step: (x_max - x_min) / (count - 1) as f64 })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    /// Default grid for states up to energy `e_max`.
    ///
    /// On the whole line the half-width is the largest of 12, three times the
    /// outer turning point, and the turning point plus 28 decay lengths when a
    /// continuum threshold bounds the decay rate. On a finite interval the ends
    /// are pulled in from the walls until the Numerov transformation is safe.
    pub fn auto(spec: &PotentialSpec, e_max: f64, count: usize) -> Result<Self, OracleError> {
        if count < 3 {
            return Err(OracleError::InvalidGrid(format!("count = {count} < 3")));
        }
        let dom = spec.x_domain;
        if !dom.is_bounded() {
            let turn = spec.classical_turning_points(e_max, 1e-10).map_or(0.0, |(a, b)| a.abs().max(b.abs()));
            let mut half = MIN_HALF_WIDTH.max(3.0 * turn);
            if let Some(t) = spec.continuum_threshold() {
                if e_max < t {
                    half = half.max(turn + TAIL_DECAY_LENGTHS / (t - e_max).sqrt());
                }
            }
            return Self::new(-half, half, count);
        }
        // each end starts very close to its wall (a wall of zero strength is a true
        // Dirichlet end) and moves in until the potential there is resolved
        let width = dom.hi - dom.lo;
        let (mut left, mut right) = (1e-9 * width, 1e-9 * width);
        for _ in 0..200 {
            let grid = Self::new(dom.lo + left, dom.hi - right, count)?;
            let v = interior_potential(spec, &grid);
            let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
            let excess = |w: f64| grid.step * grid.step * (w - vmin) / 12.0;
            let (l_ok, r_ok) = (excess(v[0]) < 0.25 * NUMEROV_LIMIT, excess(v[v.len() - 1]) < 0.25 * NUMEROV_LIMIT);
            if l_ok && r_ok && numerov_stiffness(spec, &grid) < 0.5 * NUMEROV_LIMIT {
                return Ok(grid);
            }
            if !l_ok {
                left *= 1.25;
            }
            if !r_ok {
                right *= 1.25;
            }
            if l_ok && r_ok {
                left *= 1.25;
                right *= 1.25;
            }
        }
        Err(OracleError::DomainViolation("no safe inset from the walls".into()))
    }
}

fn interior_potential(spec: &PotentialSpec, grid: &Grid) -> Vec<f64> {
    (1..grid.count - 1).map(|i| spec.potential(grid.point(i))).collect()
}

/// `h² (max V - min V) / 12` over the interior points.
fn numerov_stiffness(spec: &PotentialSpec, grid: &Grid) -> f64 {
    let v = interior_potential(spec, grid);
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    grid.step * grid.step * (hi - lo) / 12.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ThreePoint,
    Numerov,
}

/// Symmetric tridiagonal discretization on the interior grid points.
///
/// `diagonal` and `off_diagonal` hold the three-point operator `2/h² + V`, `-1/h²`.
/// The Numerov scheme is the pencil `T ψ = B (E - V) ψ` with `B = tridiag(1, 10, 1)/12`;
/// substituting `φ_i = (1 + h²(E - V_i)/12) ψ_i` turns it into the symmetric
/// condition `S(E) φ = 0`, whose inertia counts the eigenvalues below `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    pub scheme: Scheme,
    pub grid: Grid,
    potential: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEigenpair {
    pub index: usize,
    pub energy: f64,
    /// Samples at every grid point, zero at both ends; `Σ v² h = 1`.
    pub vector: Vec<f64>,
    pub grid: Grid,
}

pub fn discretize(spec: &PotentialSpec, grid: &Grid, scheme: Scheme) -> Result<TridiagonalOperator, OracleError> {
    let dom = spec.x_domain;
    if !(grid.x_min > dom.lo && grid.x_max < dom.hi) {
        return Err(OracleError::DomainViolation(format!(
            "grid [{}, {}] touches the boundary of ({}, {})",
            grid.x_min, grid.x_max, dom.lo, dom.hi
        )));
    }
    let potential = interior_potential(spec, grid);
    if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
        return Err(OracleError::DomainViolation(format!("potential is singular at x = {}", grid.point(i + 1))));
    }
    if scheme == Scheme::Numerov && numerov_stiffness(spec, grid) >= NUMEROV_LIMIT {
        return Err(OracleError::DomainViolation(
            "grid ends too close to a wall for the Numerov transformation".into(),
        ));
    }
    let h2 = grid.step * grid.step;
    let m = potential.len();
    Ok(TridiagonalOperator {
        diagonal: potential.iter().map(|v| 2.0 / h2 + v).collect(),
        off_diagonal: vec![-1.0 / h2; m.saturating_sub(1)],
        scheme,
        grid: *grid,
        potential,
    })
}

impl TridiagonalOperator {
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// Diagonal of the symmetric matrix whose null space holds the state at `e`
    /// (`H - e` for three points, `S(e)` for Numerov); the off-diagonal is unchanged.
    fn shifted_diagonal(&self, e: f64) -> Vec<f64> {
        match self.scheme {
            Scheme::ThreePoint => self.diagonal.iter().map(|d| d - e).collect(),
            Scheme::Numerov => {
                let h2 = self.grid.step * self.grid.step;
                self.potential
                    .iter()
                    .map(|v| {
                        let u = h2 * (e - v) / 12.0;
                        2.0 / h2 * (1.0 - 5.0 * u) / (1.0 + u)
                    })
                    .collect()
            }
        }
    }

    /// Number of eigenvalues strictly below `e`.
    pub fn count_below(&self, e: f64) -> usize {
        sturm_count(&self.shifted_diagonal(e), &self.off_diagonal)
    }

    /// An interval containing the lowest `k` eigenvalues.
    fn bracket(&self, k: usize) -> (f64, f64) {
        let vmin = self.potential.iter().copied().fold(f64::INFINITY, f64::min);
        let lo = vmin - 1.0;
        let mut hi = match self.scheme {
            Scheme::ThreePoint => {
                // Gershgorin
                let h2 = self.grid.step * self.grid.step;
                self.diagonal.iter().fold(f64::NEG_INFINITY, |m, d| m.max(d + 2.0 / h2)) + 1.0
            }
            Scheme::Numerov => vmin + 1.0,
        };
        while self.count_below(hi) < k {
            hi = lo + 2.0 * (hi - lo);
        }
        (lo, hi)
    }
}

/// Negative pivots of `LDLᵀ` for the symmetric tridiagonal matrix `(diag, off)`.
pub fn sturm_count(diag: &[f64], off: &[f64]) -> usize {
    let scale = off.iter().fold(1.0f64, |m, b| m.max(b * b));
    let pivmin = f64::MIN_POSITIVE * scale;
    let mut count = 0;
    let mut d = 1.0;
    for (i, a) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / d };
        d = a - coupling;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(op: &TridiagonalOperator, k: usize) -> Vec<f64> {
    let k = k.min(op.dimension());
    if k == 0 {
        return Vec::new();
    }
    let (lo, hi) = op.bracket(k);
    (0..k)
        .map(|j| {
            // smallest e with count_below(e) > j
            let (mut a, mut b) = (lo, hi);
            while b - a > EIGENVALUE_TOL {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if op.count_below(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves a general tridiagonal system in place by Gaussian elimination with partial pivoting.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let (mut dl, mut d, mut du) = (sub.to_vec(), diag.to_vec(), sup.to_vec());
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];
    let tiny = f64::EPSILON * diag.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            rhs.swap(i, i + 1);
        }
        rhs[i + 1] -= dl[i] * rhs[i];
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

fn tridiagonal_apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    (0..diag.len())
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < diag.len() {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

/// Eigenvector for an eigenvalue known to within `10⁻⁶`, by inverse iteration.
pub fn eigenvector(op: &TridiagonalOperator, energy: f64) -> Result<OracleEigenpair, OracleError> {
    let index = op.count_below(energy - 1e-5 * energy.abs().max(1.0));
    let diag = op.shifted_diagonal(energy);
    let off = &op.off_diagonal;
    let shifted: Vec<f64> = diag.iter().map(|d| d - SHIFT_OFFSET).collect();
    let norm_k = diag
        .iter()
        .enumerate()
        .map(|(i, d)| d.abs() + 2.0 * off.get(i).or(off.last()).map_or(0.0, |b| b.abs()))
        .fold(1.0f64, f64::max);
    let m = diag.len();
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        solve_tridiagonal(off, &shifted, off, &mut v);
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= len);
        let kv = tridiagonal_apply(&diag, off, &v);
        let rho: f64 = kv.iter().zip(&v).map(|(a, b)| a * b).sum();
        residual = kv.iter().zip(&v).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt() / norm_k;
        if residual < RESIDUAL_TOL {
            return Ok(finish_vector(op, energy, index, v));
        }
    }
    Err(OracleError::ConvergenceFailure { energy, iterations: MAX_ITERATIONS, residual })
}

fn finish_vector(op: &TridiagonalOperator, energy: f64, index: usize, mut v: Vec<f64>) -> OracleEigenpair {
    if op.scheme == Scheme::Numerov {
        let h2 = op.grid.step * op.grid.step;
        for (x, pot) in v.iter_mut().zip(&op.potential) {
            *x /= 1.0 + h2 * (energy - pot) / 12.0;
        }
    }
    let mut vector = Vec::with_capacity(v.len() + 2);
    vector.push(0.0);
    vector.extend(v);
    vector.push(0.0);
    let h = op.grid.step;
    let norm = (vector.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
    let peak = vector.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let first = vector.iter().find(|x| x.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
    let factor = first.signum() / norm;
    vector.iter_mut().for_each(|x| *x *= factor);
    OracleEigenpair { index, energy, vector, grid: op.grid }
}

impl OracleEigenpair {
    /// Sign changes between successive significant samples.
    pub fn sign_changes(&self) -> usize {
        let peak = self.vector.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut last = 0.0f64;
        let mut changes = 0;
        for &x in &self.vector {
            if x.abs() > 1e-8 * peak {
                if last != 0.0 && x.signum() != last.signum() {
                    changes += 1;
                }
                last = x;
            }
        }
        changes
    }
}

/// `|Σ f(x_i) v_i h|` with `f` normalized on the same grid.
pub fn overlap_with(f: impl Fn(f64) -> f64, pair: &OracleEigenpair) -> f64 {
    let h = pair.grid.step;
    let samples: Vec<f64> = pair.grid.points().map(f).collect();
    let norm_f = (samples.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
    let norm_v = (pair.vector.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
    let dot: f64 = samples.iter().zip(&pair.vector).map(|(a, b)| a * b).sum::<f64>() * h;
    (dot / (norm_f * norm_v)).abs()
}

pub fn overlap(wf: &ClosedFormWavefunction, pair: &OracleEigenpair) -> f64 {
    overlap_with(|x| wf.eval(x), pair)
}
