//! Exactly solvable potentials as data.
//!
//! Every entry carries its Schrödinger-form potential `V(x)` (ħ = 1, 2m = 1),
//! a change of variable `y = f(x)`, the potential and squared Jacobian
//! `G(y) = (dy/dx)²` as exact rational functions of `y`, and the closed-form
//! spectrum used as a cross-check.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::polyrat::{ratio, rational_from_f64, Poly, Rational, RationalFn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown potential '{0}' (expected harmonic, rosen_morse or scarf1)")]
    UnknownPotential(String),
    #[error("invalid parameters for {potential}: {constraint}")]
    InvalidParams { potential: PotentialKind, constraint: String },
    #[error("scarf1 parameters sit on the SUSY phase boundary: {0}")]
    PhaseBoundary(String),
    #[error("level {n} does not exist: {potential} has {count} bound states")]
    NoSuchLevel { potential: PotentialKind, n: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassConvention {
    TwoMEqualsOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConvention {
    pub hbar: f64,
    pub mass_convention: MassConvention,
}

/// The only convention used anywhere in the crate.
pub const UNITS: UnitConvention = UnitConvention { hbar: 1.0, mass_convention: MassConvention::TwoMEqualsOne };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PotentialKind {
    Harmonic,
    RosenMorse,
    Scarf1,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 3] = [PotentialKind::Harmonic, PotentialKind::RosenMorse, PotentialKind::Scarf1];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::RosenMorse => "rosen_morse",
            PotentialKind::Scarf1 => "scarf1",
        }
    }

    /// Accepted parameter names, in display order.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            PotentialKind::Harmonic => &[],
            PotentialKind::RosenMorse => &["A", "alpha"],
            PotentialKind::Scarf1 => &["A", "B", "alpha"],
        }
    }

    /// One-line summary of the potential and its parameter constraints.
    pub fn summary(self) -> &'static str {
        match self {
            PotentialKind::Harmonic => "harmonic (scaled units): V = xi^2, eigenvalue lambda = 2n+1, no parameters",
            PotentialKind::RosenMorse => {
                "rosen_morse: V = A^2 - A(A+alpha) sech^2(alpha x); A>0, alpha>0; y = tanh(alpha x)"
            }
            PotentialKind::Scarf1 => {
                "scarf1: V = -A^2 + (A^2+B^2-A alpha) sec^2(alpha x) - B(2A-alpha) tan(alpha x) sec(alpha x); \
                 alpha>0, A-B != 0, A+B != 0; y = sin(alpha x)"
            }
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| CatalogError::UnknownPotential(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusyPhase {
    Exact,
    Broken,
    ExactSwapped,
    BrokenMirror,
    NotApplicable,
}

impl SusyPhase {
    pub fn name(self) -> &'static str {
        match self {
            SusyPhase::Exact => "exact",
            SusyPhase::Broken => "broken",
            SusyPhase::ExactSwapped => "exact_swapped",
            SusyPhase::BrokenMirror => "broken_mirror",
            SusyPhase::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for SusyPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Phase table for the trigonometric Scarf potential.
pub fn classify_scarf1(a: f64, b: f64) -> Result<SusyPhase, CatalogError> {
    let minus = a - b;
    let plus = a + b;
    if minus == 0.0 {
        return Err(CatalogError::PhaseBoundary(format!("A-B = 0 (A={a}, B={b})")));
    }
    if plus == 0.0 {
        return Err(CatalogError::PhaseBoundary(format!("A+B = 0 (A={a}, B={b})")));
    }
    Ok(match (minus > 0.0, plus > 0.0) {
        (true, true) => SusyPhase::Exact,
        (true, false) => SusyPhase::Broken,
        (false, true) => SusyPhase::BrokenMirror,
        (false, false) => SusyPhase::ExactSwapped,
    })
}

/// How the physical root is picked at each fixed pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Continue the branch that reproduces `exp(-∫W)` at zero energy.
    SusyLimit,
    /// Keep the branch whose `1/ħ` term is positive as `ħ → 0`.
    HbarLimit,
    /// The unique choice giving positive prefactor exponents.
    Normalizability,
}

impl SelectionRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::SusyLimit => "susy_limit",
            SelectionRule::HbarLimit => "hbar_limit",
            SelectionRule::Normalizability => "normalizability",
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStateCount {
    Finite(usize),
    Unbounded,
}

impl BoundStateCount {
    pub fn contains(self, n: usize) -> bool {
        match self {
            BoundStateCount::Finite(c) => n < c,
            BoundStateCount::Unbounded => true,
        }
    }
}

/// Open interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// `y` together with `1 - y` and `1 + y`, the latter two computed without
/// cancellation near the ends of the interval `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YParts<T> {
    pub y: T,
    pub one_minus: T,
    pub one_plus: T,
}

impl YParts<f64> {
    pub fn from_y(y: f64) -> Self {
        Self { y, one_minus: 1.0 - y, one_plus: 1.0 + y }
    }
}

impl YParts<Complex64> {
    pub fn from_y(y: Complex64) -> Self {
        Self { y, one_minus: 1.0 - y, one_plus: 1.0 + y }
    }
}

/// Where the transformed solution stops being analytic, as seen from the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticRegion {
    Entire,
    /// Singular lines at `Im x = ±half_height`.
    HorizontalStrip {
        half_height: f64,
    },
    /// Singular lines at `Re x = ±half_width`.
    VerticalStrip {
        half_width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChangeOfVariable {
    Identity,
    /// `y = tanh(alpha x)`
    Tanh {
        alpha: f64,
    },
    /// `y = sin(alpha x)`
    Sin {
        alpha: f64,
    },
}

impl ChangeOfVariable {
    pub fn y_of_x(&self, x: f64) -> f64 {
        match *self {
            ChangeOfVariable::Identity => x,
            ChangeOfVariable::Tanh { alpha } => (alpha * x).tanh(),
            ChangeOfVariable::Sin { alpha } => (alpha * x).sin(),
        }
    }

    pub fn x_of_y(&self, y: f64) -> f64 {
        match *self {
            ChangeOfVariable::Identity => y,
            ChangeOfVariable::Tanh { alpha } => y.atanh() / alpha,
            ChangeOfVariable::Sin { alpha } => y.asin() / alpha,
        }
    }

    pub fn parts(&self, x: f64) -> YParts<f64> {
        match *self {
            ChangeOfVariable::Identity => YParts::<f64>::from_y(x),
            ChangeOfVariable::Tanh { alpha } => {
                let z = alpha * x;
                YParts {
                    y: z.tanh(),
                    one_minus: 2.0 / (1.0 + (2.0 * z).exp()),
                    one_plus: 2.0 / (1.0 + (-2.0 * z).exp()),
                }
            }
            ChangeOfVariable::Sin { alpha } => {
                let half = std::f64::consts::FRAC_PI_4 - 0.5 * alpha * x;
                YParts { y: (alpha * x).sin(), one_minus: 2.0 * half.sin().powi(2), one_plus: 2.0 * half.cos().powi(2) }
            }
        }
    }

    pub fn parts_complex(&self, x: Complex64) -> YParts<Complex64> {
        match *self {
            ChangeOfVariable::Identity => YParts::<Complex64>::from_y(x),
            ChangeOfVariable::Tanh { alpha } => {
                let z = x * alpha;
                let e = (z * 2.0).exp();
                let one_minus = 2.0 / (1.0 + e);
                YParts { y: 1.0 - one_minus, one_minus, one_plus: 2.0 * e / (1.0 + e) }
            }
            ChangeOfVariable::Sin { alpha } => {
                let half = std::f64::consts::FRAC_PI_4 - x * (0.5 * alpha);
                let (s, c) = (half.sin(), half.cos());
                YParts { y: (x * alpha).sin(), one_minus: 2.0 * s * s, one_plus: 2.0 * c * c }
            }
        }
    }

    /// `dy/dx` expressed through the parts of `y`, positive on the physical interval.
    pub fn jacobian(&self, p: &YParts<f64>) -> f64 {
        match *self {
            ChangeOfVariable::Identity => 1.0,
            ChangeOfVariable::Tanh { alpha } => alpha * p.one_minus * p.one_plus,
            ChangeOfVariable::Sin { alpha } => alpha * (p.one_minus * p.one_plus).sqrt(),
        }
    }

    /// `dy/dx` at complex `x`, taken from the entire function of `x` so that no branch is chosen.
    pub fn jacobian_complex(&self, x: Complex64) -> Complex64 {
        match *self {
            ChangeOfVariable::Identity => Complex64::new(1.0, 0.0),
            ChangeOfVariable::Tanh { alpha } => {
                let p = self.parts_complex(x);
                alpha * p.one_minus * p.one_plus
            }
            ChangeOfVariable::Sin { alpha } => alpha * (x * alpha).cos(),
        }
    }

    /// `G(y) = (dy/dx)²` as an exact rational function of `y`.
    pub fn jacobian_squared(&self) -> RationalFn<Rational> {
        let one_minus_y2 = Poly::new(vec![ratio(1, 1), ratio(0, 1), ratio(-1, 1)]);
        match *self {
            ChangeOfVariable::Identity => RationalFn::constant(ratio(1, 1)),
            ChangeOfVariable::Tanh { alpha } => {
                let a2 = exact(alpha * alpha, alpha);
                RationalFn::from_poly(one_minus_y2.pow(2).scale(&a2))
            }
            ChangeOfVariable::Sin { alpha } => {
                let a2 = exact(alpha * alpha, alpha);
                RationalFn::from_poly(one_minus_y2.scale(&a2))
            }
        }
    }

    /// Finite points of the `y` plane where the Jacobian vanishes.
    pub fn fixed_poles(&self) -> Vec<f64> {
        match self {
            ChangeOfVariable::Identity => Vec::new(),
            _ => vec![1.0, -1.0],
        }
    }

    /// Order of the zero of `G` at a fixed pole.
    pub fn jacobian_zero_order(&self, pole: f64) -> usize {
        let g = self.jacobian_squared();
        match rational_from_f64(pole) {
            Ok(q) => g.numerator().root_multiplicity(&q),
            Err(_) => 0,
        }
    }

    pub fn y_domain(&self) -> Interval {
        match self {
            ChangeOfVariable::Identity => Interval::LINE,
            _ => Interval { lo: -1.0, hi: 1.0 },
        }
    }
}

/// Validated parameters of one catalog entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Harmonic,
    RosenMorse { a: f64, alpha: f64 },
    Scarf1 { a: f64, b: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub potential: Potential,
    pub params: BTreeMap<String, f64>,
    pub x_domain: Interval,
    pub change: ChangeOfVariable,
}

fn exact(value: f64, context: f64) -> Rational {
    rational_from_f64(value).unwrap_or_else(|_| panic!("non-finite parameter derived from {context}"))
}

impl PotentialSpec {
    pub fn instantiate(kind: PotentialKind, params: &BTreeMap<String, f64>) -> Result<Self, CatalogError> {
        let invalid = |constraint: String| CatalogError::InvalidParams { potential: kind, constraint };
        for (name, value) in params {
            if !kind.parameter_names().contains(&name.as_str()) {
                return Err(invalid(format!("unknown parameter '{name}'")));
            }
            if !value.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        let get = |name: &str| params.get(name).copied().ok_or_else(|| invalid(format!("missing parameter '{name}'")));
        let (potential, x_domain, change) = match kind {
            PotentialKind::Harmonic => (Potential::Harmonic, Interval::LINE, ChangeOfVariable::Identity),
            PotentialKind::RosenMorse => {
                let (a, alpha) = (get("A")?, get("alpha")?);
                if a <= 0.0 {
                    return Err(invalid(format!("A > 0 required (A = {a})")));
                }
                if alpha <= 0.0 {
                    return Err(invalid(format!("alpha > 0 required (alpha = {alpha})")));
                }
                (Potential::RosenMorse { a, alpha }, Interval::LINE, ChangeOfVariable::Tanh { alpha })
            }
            PotentialKind::Scarf1 => {
                let (a, b, alpha) = (get("A")?, get("B")?, get("alpha")?);
                if alpha <= 0.0 {
                    return Err(invalid(format!("alpha > 0 required (alpha = {alpha})")));
                }
                classify_scarf1(a, b)?;
                let half = FRAC_PI_2 / alpha;
                (Potential::Scarf1 { a, b, alpha }, Interval { lo: -half, hi: half }, ChangeOfVariable::Sin { alpha })
            }
        };
        Ok(Self { kind, potential, params: params.clone(), x_domain, change })
    }

    /// Convenience constructor from `(name, value)` pairs.
    pub fn from_pairs(kind: PotentialKind, pairs: &[(&str, f64)]) -> Result<Self, CatalogError> {
        let params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self::instantiate(kind, &params)
    }

    pub fn harmonic() -> Self {
        Self::instantiate(PotentialKind::Harmonic, &BTreeMap::new()).expect("no parameters")
    }

    pub fn rosen_morse(a: f64, alpha: f64) -> Result<Self, CatalogError> {
        Self::from_pairs(PotentialKind::RosenMorse, &[("A", a), ("alpha", alpha)])
    }

    pub fn scarf1(a: f64, b: f64, alpha: f64) -> Result<Self, CatalogError> {
        Self::from_pairs(PotentialKind::Scarf1, &[("A", a), ("B", b), ("alpha", alpha)])
    }

    /// `A² + B² - Aα` and `B(2A - α)`: the `sec²` and `tan·sec` strengths.
    fn scarf_strengths(a: f64, b: f64, alpha: f64) -> (f64, f64) {
        (a * a + b * b - a * alpha, b * (2.0 * a - alpha))
    }

    pub fn potential(&self, x: f64) -> f64 {
        let p = self.change.parts(x);
        self.potential_from_parts(&p)
    }

    /// `V` written as a function of `y` (the transformed potential).
    pub fn potential_from_parts(&self, p: &YParts<f64>) -> f64 {
        match self.potential {
            Potential::Harmonic => p.y * p.y,
            Potential::RosenMorse { a, alpha } => a * a - a * (a + alpha) * p.one_minus * p.one_plus,
            Potential::Scarf1 { a, b, alpha } => {
                // partial fractions keep a vanishing wall strength exact
                let (c, d) = Self::scarf_strengths(a, b, alpha);
                -a * a + 0.5 * (c - d) / p.one_minus + 0.5 * (c + d) / p.one_plus
            }
        }
    }

    pub fn potential_complex(&self, x: Complex64) -> Complex64 {
        let p = self.change.parts_complex(x);
        match self.potential {
            Potential::Harmonic => p.y * p.y,
            Potential::RosenMorse { a, alpha } => a * a - a * (a + alpha) * p.one_minus * p.one_plus,
            Potential::Scarf1 { a, b, alpha } => {
                let (c, d) = Self::scarf_strengths(a, b, alpha);
                -a * a + 0.5 * (c - d) / p.one_minus + 0.5 * (c + d) / p.one_plus
            }
        }
    }

    /// `W(x)` with `V = W² - W'` at zero ground energy, where a superpotential is defined.
    pub fn superpotential(&self, x: f64) -> Option<f64> {
        match self.potential {
            Potential::Harmonic => None,
            Potential::RosenMorse { a, alpha } => Some(a * (alpha * x).tanh()),
            Potential::Scarf1 { a, b, alpha } => {
                let (s, c) = (alpha * x).sin_cos();
                Some((a * s - b) / c)
            }
        }
    }

    /// Exponents of `exp(-∫W dx)` at each fixed pole, i.e. powers of the distance to the pole in `y`.
    pub fn superpotential_exponents(&self) -> Option<Vec<(f64, f64)>> {
        match self.potential {
            Potential::Harmonic => None,
            Potential::RosenMorse { a, alpha } => {
                let e = a / (2.0 * alpha);
                Some(vec![(1.0, e), (-1.0, e)])
            }
            Potential::Scarf1 { a, b, alpha } => {
                Some(vec![(1.0, (a - b) / (2.0 * alpha)), (-1.0, (a + b) / (2.0 * alpha))])
            }
        }
    }

    /// Coefficient of `1/ħ` in the fixed-pole residue whose classical limit is taken,
    /// for potentials where residues are selected by the small-ħ limit.
    pub fn classical_pole_strengths(&self) -> Option<Vec<(f64, f64)>> {
        match self.potential {
            Potential::Scarf1 { a, b, alpha } => {
                Some(vec![(1.0, (a - b) / (2.0 * alpha)), (-1.0, (a + b) / (2.0 * alpha))])
            }
            _ => None,
        }
    }

    /// The transformed potential `Ṽ(y)` as an exact rational function.
    pub fn transformed_potential(&self) -> RationalFn<Rational> {
        let q = |v: f64| exact(v, v);
        match self.potential {
            Potential::Harmonic => RationalFn::from_poly(Poly::monomial(ratio(1, 1), 2)),
            Potential::RosenMorse { a, alpha } => {
                let (a, alpha) = (q(a), q(alpha));
                let k = &a * (&a + &alpha);
                // A² - A(A+α)(1 - y²)
                RationalFn::from_poly(Poly::new(vec![&a * &a - &k, ratio(0, 1), k]))
            }
            Potential::Scarf1 { a, b, alpha } => {
                let (a, b, alpha) = (q(a), q(b), q(alpha));
                let c = &a * &a + &b * &b - &a * &alpha;
                let d = &b * (ratio(2, 1) * &a - &alpha);
                let wall =
                    RationalFn::new(Poly::new(vec![c, -d]), Poly::new(vec![ratio(1, 1), ratio(0, 1), ratio(-1, 1)]))
                        .expect("nonzero denominator");
                &RationalFn::constant(-(&a * &a)) + &wall
            }
        }
    }

    pub fn selection_rule(&self) -> SelectionRule {
        match self.potential {
            Potential::Harmonic => SelectionRule::Normalizability,
            Potential::RosenMorse { .. } => SelectionRule::SusyLimit,
            Potential::Scarf1 { .. } => SelectionRule::HbarLimit,
        }
    }

    /// A lower bound on the spectrum: the minimum of `V`, or zero when `V` is
    /// unbounded below but factorizes as `W² - W'` (then `H = A†A ≥ 0`).
    pub fn energy_floor(&self) -> Option<f64> {
        match self.potential_minimum() {
            Some((_, v)) => Some(v),
            None => self.superpotential(0.0).map(|_| 0.0),
        }
    }

    pub fn classify_susy(&self) -> Result<SusyPhase, CatalogError> {
        match self.potential {
            Potential::Harmonic => Ok(SusyPhase::NotApplicable),
            Potential::RosenMorse { .. } => Ok(SusyPhase::Exact),
            Potential::Scarf1 { a, b, .. } => classify_scarf1(a, b),
        }
    }

    pub fn bound_state_count(&self) -> BoundStateCount {
        match self.potential {
            // exponent (A - nα)/(2α) must stay positive
            Potential::RosenMorse { a, alpha } => BoundStateCount::Finite((a / alpha).ceil() as usize),
            // the selected exponents do not depend on the energy and are always positive
            Potential::Harmonic | Potential::Scarf1 { .. } => BoundStateCount::Unbounded,
        }
    }

    /// Energy of level `n` from the closed-form spectrum (scaled `λ` for the oscillator).
    pub fn closed_form_energy(&self, n: usize) -> Result<f64, CatalogError> {
        if let BoundStateCount::Finite(count) = self.bound_state_count() {
            if n >= count {
                return Err(CatalogError::NoSuchLevel { potential: self.kind, n, count });
            }
        }
        let nf = n as f64;
        Ok(match self.potential {
            Potential::Harmonic => 2.0 * nf + 1.0,
            Potential::RosenMorse { a, alpha } => a * a - (a - nf * alpha).powi(2),
            Potential::Scarf1 { a, b, alpha } => {
                let shifted = match self.classify_susy()? {
                    SusyPhase::Exact => a + nf * alpha,
                    SusyPhase::Broken => b - (nf + 0.5) * alpha,
                    SusyPhase::BrokenMirror => b + (nf + 0.5) * alpha,
                    SusyPhase::ExactSwapped => (nf + 1.0) * alpha - a,
                    SusyPhase::NotApplicable => unreachable!("scarf1 always has a phase"),
                };
                shifted * shifted - a * a
            }
        })
    }

    /// Bottom of the continuum, where one exists.
    pub fn continuum_threshold(&self) -> Option<f64> {
        match self.potential {
            Potential::RosenMorse { a, .. } => Some(a * a),
            _ => None,
        }
    }

    /// Location and value of the minimum of `V`; `None` when `V` is unbounded below.
    pub fn potential_minimum(&self) -> Option<(f64, f64)> {
        match self.potential {
            Potential::Harmonic => Some((0.0, 0.0)),
            Potential::RosenMorse { a, alpha } => Some((0.0, -a * alpha)),
            Potential::Scarf1 { a, b, alpha } => {
                let (c, d) = Self::scarf_strengths(a, b, alpha);
                if c < d.abs() {
                    return None;
                }
                if c == d.abs() {
                    // monotone between the walls, infimum at one of them
                    let x = if d > 0.0 { self.x_domain.hi } else { self.x_domain.lo };
                    return Some((x, -a * a + 0.5 * c));
                }
                let y = if d == 0.0 { 0.0 } else { (c - (c * c - d * d).sqrt()) / d };
                let x = self.change.x_of_y(y);
                Some((x, -a * a + (c - d * y) / (1.0 - y * y)))
            }
        }
    }

    /// The two roots of `V(x) = e` around the well minimum, by bisection.
    ///
    /// `None` when `e` does not exceed the minimum or `V` never climbs back above `e`
    /// on one side (for example above a continuum threshold).
    pub fn classical_turning_points(&self, e: f64, tol: f64) -> Option<(f64, f64)> {
        let (xm, vm) = self.potential_minimum()?;
        if e <= vm || !xm.is_finite() || !self.x_domain.contains(xm) {
            return None;
        }
        let root = |dir: f64| -> Option<f64> {
            let wall = if dir > 0.0 { self.x_domain.hi } else { self.x_domain.lo };
            let mut outside = None;
            for k in 0..80 {
                let x =
                    if wall.is_finite() { wall - (wall - xm) * 0.5f64.powi(k + 1) } else { xm + dir * 2f64.powi(k) };
                if self.potential(x) > e {
                    outside = Some(x);
                    break;
                }
            }
            let (mut inside, mut outside) = (xm, outside?);
            while (outside - inside).abs() > tol {
                let mid = 0.5 * (inside + outside);
                if self.potential(mid) > e {
                    outside = mid;
                } else {
                    inside = mid;
                }
            }
            Some(0.5 * (inside + outside))
        };
        Some((root(-1.0)?, root(1.0)?))
    }

    /// Natural energy unit of the entry.
    pub fn energy_scale(&self) -> f64 {
        match self.potential {
            Potential::Harmonic => 1.0,
            Potential::RosenMorse { alpha, .. } | Potential::Scarf1 { alpha, .. } => alpha * alpha,
        }
    }

    /// Singularities of the potential and of the transformed prefactors nearest the real axis.
    pub fn analytic_region(&self) -> AnalyticRegion {
        match self.change {
            ChangeOfVariable::Identity => AnalyticRegion::Entire,
            ChangeOfVariable::Tanh { alpha } => AnalyticRegion::HorizontalStrip { half_height: FRAC_PI_2 / alpha },
            ChangeOfVariable::Sin { alpha } => AnalyticRegion::VerticalStrip { half_width: FRAC_PI_2 / alpha },
        }
    }

    /// Fixed singular points of `V` nearest the origin in the complex `x` plane.
    pub fn singular_points(&self) -> Vec<Complex64> {
        match self.analytic_region() {
            AnalyticRegion::Entire => Vec::new(),
            AnalyticRegion::HorizontalStrip { half_height } => {
                vec![Complex64::new(0.0, half_height), Complex64::new(0.0, -half_height)]
            }
            AnalyticRegion::VerticalStrip { half_width } => {
                vec![Complex64::new(-half_width, 0.0), Complex64::new(half_width, 0.0)]
            }
        }
    }
}
