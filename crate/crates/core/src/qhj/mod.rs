//! Quantum Hamilton–Jacobi solution of the catalog potentials.
//!
//! After the change of variable `y = f(x)` with `F = dy/dx`, the wave function
//! is written `ψ(y) = F^(-1/2) · exp(∫χ dy)` and `χ` obeys
//!
//! ```text
//! χ² + χ' + R(y) = 0,   R = (E - Ṽ)/G - G''/(4G) + 3G'²/(16G²),   G = F².
//! ```
//!
//! With the quantum momentum function `p = -i ψ'/ψ` this means `q = i p = F·φ`
//! and `χ = φ + (1/2) d(ln F)/dy`.
//!
//! Fixed poles of `χ` sit where `G` vanishes. Their residues solve
//! `b² - b + r₂ = 0`; the moving poles (zeros of `ψ`) all have residue one.

mod wavefunction;

pub use wavefunction::{
    assemble_wavefunction, wavefunction_eval, ClosedFormWavefunction, LocalValue, PolynomialFamily,
};

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::catalog::{CatalogError, ChangeOfVariable, PotentialSpec, SelectionRule};
use crate::orthopoly::{OrthoError, PolynomialOde};
use crate::polyrat::{
    rational_from_f64, rational_to_f64, AsymptoticExpansion, LaurentData, Poly, PolyratError, Rational, RationalFn,
};

/// Relative tolerance for leftover terms after substituting the ansatz.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Absolute bisection tolerance on energies.
pub const ENERGY_TOL: f64 = 1e-12;
/// Initial scan brackets per unit energy.
pub const SCAN_DENSITY: f64 = 400.0;
/// Number of times the scan density is doubled before giving up.
pub const SCAN_REFINEMENTS: u32 = 3;
/// Number of times an open-ended energy window is doubled.
const CAP_DOUBLINGS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QhjError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Polyrat(#[from] PolyratError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("coefficient function is singular away from the declared fixed poles: {0}")]
    UndeclaredPole(String),
    #[error("complex residues at y = {pole}: 1 - 4 r2 = {discriminant:e}")]
    ComplexResidues { pole: f64, discriminant: f64 },
    #[error("no physical residue selection: {0}")]
    NoPhysicalSelection(String),
    #[error("inconsistent reduction: {0}")]
    InconsistentReduction(String),
    #[error("termination condition for n = {n} has no root in [{lo}, {hi}] (g = {g_lo:e} .. {g_hi:e})")]
    RootNotFound { n: usize, lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("wave function is not normalizable: exponent {exponent} at y = {pole}")]
    NotNormalizable { pole: f64, exponent: f64 },
    #[error("x = {0} lies on a branch cut of the prefactor")]
    BranchCut(Complex64),
}

/// How the `χ` equation was obtained from the Schrödinger equation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRecord {
    pub change: ChangeOfVariable,
    /// `G(y) = F(y)²` with `F = dy/dx`.
    pub jacobian_squared: RationalFn<Rational>,
}

/// Energy-independent data of `R(y) = E·Q(y) + R₀(y)` for one catalog entry.
///
/// Everything the energy scan needs is precomputed here so that evaluating the
/// termination condition at a trial energy is a handful of `f64` polynomial
/// operations.
#[derive(Debug)]
pub struct ChiFamily {
    spec: PotentialSpec,
    transform: TransformRecord,
    poles: Vec<f64>,
    poles_exact: Vec<Rational>,
    /// Order of the zero of `G` at each pole.
    map_orders: Vec<usize>,
    energy_part: RationalFn<Rational>,
    base: RationalFn<Rational>,
    r2_energy: Vec<f64>,
    r2_base: Vec<f64>,
    /// `L(y) = ∏(y - y_i)` over the fixed poles.
    locator: Poly<f64>,
    /// `L² / D` where `D` is the common denominator of `R`.
    locator_sq_over_den: Poly<f64>,
    num_energy: Poly<f64>,
    num_base: Poly<f64>,
    inf_energy: AsymptoticExpansion<f64>,
    inf_base: AsymptoticExpansion<f64>,
    growth_degree: i64,
}

/// `χ² + χ' + R(y) = 0` at a fixed energy.
#[derive(Debug, Clone)]
pub struct ChiEquation {
    pub energy: f64,
    pub coefficient: RationalFn<Rational>,
    pub fixed_pole_data: Vec<LaurentData<Rational>>,
    pub transform: TransformRecord,
    family: Arc<ChiFamily>,
}

/// Both roots of `b² - b + r₂ = 0` at one fixed pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResiduePair {
    pub pole: f64,
    pub root_plus: f64,
    pub root_minus: f64,
    pub r2: f64,
}

impl ResiduePair {
    fn from_r2(pole: f64, r2: f64) -> Result<Self, QhjError> {
        let mut disc = 1.0 - 4.0 * r2;
        if disc < 0.0 {
            // rounding right at the threshold
            if disc > -1e-13 * (1.0 + 4.0 * r2.abs()) {
                disc = 0.0;
            } else {
                return Err(QhjError::ComplexResidues { pole, discriminant: disc });
            }
        }
        let s = disc.sqrt();
        Ok(Self { pole, root_plus: 0.5 * (1.0 + s), root_minus: 0.5 * (1.0 - s), r2 })
    }
}

/// The physical residues at the fixed poles plus the analytic remainder of `χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueSet {
    /// `(pole, residue)` in the order of the declared fixed poles.
    pub chosen: Vec<(f64, f64)>,
    /// Polynomial part `Π(y)` of `χ` at large `y`.
    pub growth: Poly<f64>,
    pub constant_c: f64,
    pub selection_rule: SelectionRule,
    /// The chosen set is the only one giving positive prefactor exponents.
    pub agrees_with_normalizability: bool,
    /// Prefactor exponent of `ψ` at each pole: residue minus a quarter of the order of `G`.
    pub exponents: Vec<(f64, f64)>,
}

impl ResidueSet {
    pub fn residue_at(&self, pole: f64) -> Option<f64> {
        self.chosen.iter().find(|(p, _)| *p == pole).map(|(_, b)| *b)
    }
}

/// The polynomial ODE for `P` together with the consistency measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub ode: PolynomialOde,
    /// Relative size of the non-constant leftover after dividing by `L`.
    pub consistency_residual: f64,
    /// Residual of the first subleading coefficient match at large `y`.
    pub infinity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub n: usize,
    pub energy_qhj: f64,
    pub energy_closed_form: f64,
    /// The oscillator eigenvalue in scaled units.
    pub lambda_scaled: Option<f64>,
}

fn to_f64_poly(p: &Poly<Rational>) -> Poly<f64> {
    p.map(rational_to_f64)
}

fn to_f64_expansion(e: &AsymptoticExpansion<Rational>) -> AsymptoticExpansion<f64> {
    AsymptoticExpansion { leading_power: e.leading_power, coeffs: e.coeffs.iter().map(rational_to_f64).collect() }
}

/// Coefficient of `(y - pole)^(-2)`, zero where `r` is regular.
fn double_pole_coefficient(r: &RationalFn<Rational>, pole: &Rational) -> Result<Rational, QhjError> {
    if r.pole_order(pole) == 0 {
        return Ok(Rational::from_integer(0.into()));
    }
    Ok(r.laurent_at(pole)?.coefficient(2))
}

fn exact_division(a: &Poly<Rational>, b: &Poly<Rational>) -> Result<Poly<Rational>, QhjError> {
    let (q, r) = a.div_rem(b)?;
    if !r.is_zero() {
        return Err(QhjError::UndeclaredPole(format!("{b} does not divide {a}")));
    }
    Ok(q)
}

impl ChiFamily {
    pub fn new(spec: &PotentialSpec) -> Result<Self, QhjError> {
        let g = spec.change.jacobian_squared();
        let one = RationalFn::constant(Rational::from_integer(1.into()));
        let energy_part = one.checked_div(&g)?;
        let gp = g.derivative();
        let gpp = gp.derivative();
        let vt = spec.transformed_potential();
        let q = |num: i64, den: i64| RationalFn::constant(crate::polyrat::ratio(num, den));
        let base = &(&(-&vt.checked_div(&g)?) - &(&q(1, 4) * &gpp.checked_div(&g)?))
            + &(&q(3, 16) * &(&gp * &gp).checked_div(&(&g * &g))?);

        let poles = spec.change.fixed_poles();
        let poles_exact = poles.iter().map(|&p| rational_from_f64(p)).collect::<Result<Vec<_>, _>>()?;

        let de = energy_part.denominator();
        let db = base.denominator();
        let common = exact_division(&(de * db), &Poly::gcd(de, db))?.monic();
        let mut declared = Poly::one();
        for p in &poles_exact {
            let k = common.root_multiplicity(p);
            if k > 2 {
                return Err(QhjError::UndeclaredPole(format!("pole of order {k} at y = {p}")));
            }
            declared = &declared * &Poly::from_roots(&vec![p.clone(); k]);
        }
        if declared != common {
            return Err(QhjError::UndeclaredPole(format!("denominator {common} has roots other than the fixed poles")));
        }
        let locator = Poly::from_roots(&poles_exact);
        let locator_sq_over_den = exact_division(&(&locator * &locator), &common)?;
        let num_energy = energy_part.numerator() * &exact_division(&common, de)?;
        let num_base = base.numerator() * &exact_division(&common, db)?;

        let mut r2_energy = Vec::new();
        let mut r2_base = Vec::new();
        let mut map_orders = Vec::new();
        for p in &poles_exact {
            r2_energy.push(rational_to_f64(&double_pole_coefficient(&energy_part, p)?));
            r2_base.push(rational_to_f64(&double_pole_coefficient(&base, p)?));
            map_orders.push(g.numerator().root_multiplicity(p));
        }

        let inf_energy = to_f64_expansion(&energy_part.expansion_at_infinity(3));
        let inf_base = to_f64_expansion(&base.expansion_at_infinity(3));
        let lead = |r: &RationalFn<Rational>, e: &AsymptoticExpansion<f64>| {
            if r.is_zero() {
                i64::MIN
            } else {
                e.leading_power
            }
        };
        let growth_degree = lead(&energy_part, &inf_energy).max(lead(&base, &inf_base));

        Ok(Self {
            spec: spec.clone(),
            transform: TransformRecord { change: spec.change, jacobian_squared: g },
            poles,
            poles_exact,
            map_orders,
            energy_part,
            base,
            r2_energy,
            r2_base,
            locator: to_f64_poly(&locator),
            locator_sq_over_den: to_f64_poly(&locator_sq_over_den),
            num_energy: to_f64_poly(&num_energy),
            num_base: to_f64_poly(&num_base),
            inf_energy,
            inf_base,
            growth_degree,
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    /// Order of the zero of `G = F²` at the `i`-th fixed pole.
    pub fn map_order(&self, pole: f64) -> usize {
        self.poles.iter().position(|&p| p == pole).map_or(0, |i| self.map_orders[i])
    }

    /// The exact equation at energy `e`.
    pub fn at(self: &Arc<Self>, e: f64) -> Result<ChiEquation, QhjError> {
        let coefficient = &self.energy_part.scale(&rational_from_f64(e)?) + &self.base;
        let mut fixed_pole_data = Vec::new();
        for p in &self.poles_exact {
            if coefficient.pole_order(p) > 0 {
                let data = coefficient.laurent_at(p)?;
                if data.max_order > 2 {
                    return Err(QhjError::UndeclaredPole(format!("pole of order {} at y = {p}", data.max_order)));
                }
                fixed_pole_data.push(data);
            }
        }
        Ok(ChiEquation {
            energy: e,
            coefficient,
            fixed_pole_data,
            transform: self.transform.clone(),
            family: Arc::clone(self),
        })
    }

    /// Residue pairs from the precomputed linear dependence of `r₂` on the energy.
    pub fn pairs_at(&self, e: f64) -> Result<Vec<ResiduePair>, QhjError> {
        self.poles
            .iter()
            .enumerate()
            .map(|(i, &p)| ResiduePair::from_r2(p, e * self.r2_energy[i] + self.r2_base[i]))
            .collect()
    }

    /// Coefficient of `y^power` in the large-`y` expansion of `R` at energy `e`.
    fn r_at_infinity(&self, e: f64, power: i64) -> f64 {
        e * self.inf_energy.coefficient(power) + self.inf_base.coefficient(power)
    }

    /// Polynomial part `Π` of `χ` and the constant `C`, from matching at large `y`.
    fn growth_and_constant(&self, e: f64) -> Result<(Poly<f64>, f64), QhjError> {
        let tol = CONSISTENCY_TOL * e.abs().max(1.0);
        match self.growth_degree {
            d if d <= 0 => {
                // C² + R₀ = 0
                let r0 = self.r_at_infinity(e, 0);
                if r0.abs() > tol {
                    return Err(QhjError::InconsistentReduction(format!(
                        "analytic constant C² = {:e} is not zero",
                        -r0
                    )));
                }
                Ok((Poly::zero(), 0.0))
            }
            2 => {
                // Π = π₁ y with π₁² = -R₂, then 2π₁C + R₁ = 0
                let r2 = self.r_at_infinity(e, 2);
                if r2 >= 0.0 {
                    return Err(QhjError::InconsistentReduction(format!("R grows like {r2} y², no decaying branch")));
                }
                let pi1 = -(-r2).sqrt();
                let c = -self.r_at_infinity(e, 1) / (2.0 * pi1);
                if c.abs() > tol {
                    return Err(QhjError::InconsistentReduction(format!("analytic constant C = {c:e} is not zero")));
                }
                Ok((Poly::new(vec![0.0, pi1]), c))
            }
            d => Err(QhjError::InconsistentReduction(format!("unsupported growth of R at large y: y^{d}"))),
        }
    }

    fn select(&self, pairs: &[ResiduePair], e: f64) -> Result<ResidueSet, QhjError> {
        let ordered: Vec<ResiduePair> = self
            .poles
            .iter()
            .map(|&p| {
                pairs
                    .iter()
                    .find(|q| q.pole == p)
                    .copied()
                    .ok_or_else(|| QhjError::NoPhysicalSelection(format!("no residue pair for pole y = {p}")))
            })
            .collect::<Result<_, _>>()?;
        let quarter = |i: usize| self.map_orders[i] as f64 / 4.0;

        let positive: Vec<Vec<f64>> = (0..1usize << ordered.len())
            .map(|mask| {
                ordered
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if mask >> i & 1 == 1 { p.root_minus } else { p.root_plus })
                    .collect::<Vec<f64>>()
            })
            .filter(|set| set.iter().enumerate().all(|(i, b)| b - quarter(i) > 0.0))
            .collect();
        if positive.is_empty() {
            return Err(QhjError::NoPhysicalSelection(format!(
                "no residue combination gives positive exponents at E = {e}"
            )));
        }

        let rule = self.spec.selection_rule();
        let chosen: Vec<f64> = match rule {
            SelectionRule::Normalizability => {
                if positive.len() > 1 {
                    return Err(QhjError::NoPhysicalSelection(format!(
                        "{} residue combinations give positive exponents",
                        positive.len()
                    )));
                }
                positive[0].clone()
            }
            SelectionRule::SusyLimit => {
                let targets = self
                    .spec
                    .superpotential_exponents()
                    .ok_or_else(|| QhjError::NoPhysicalSelection("no superpotential for the susy limit".into()))?;
                let at_zero = self.pairs_at(0.0)?;
                ordered
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| {
                        let target = exponent_for(&targets, pair.pole)? + quarter(i);
                        let z = &at_zero[i];
                        let plus = (z.root_plus - target).abs() <= (z.root_minus - target).abs();
                        let hit = if plus { z.root_plus } else { z.root_minus };
                        if (hit - target).abs() > 1e-8 * target.abs().max(1.0) {
                            return Err(QhjError::NoPhysicalSelection(format!(
                                "exp(-∫W) is not a zero-energy solution at y = {}",
                                pair.pole
                            )));
                        }
                        Ok(if plus { pair.root_plus } else { pair.root_minus })
                    })
                    .collect::<Result<_, _>>()?
            }
            SelectionRule::HbarLimit => {
                let strengths = self
                    .spec
                    .classical_pole_strengths()
                    .ok_or_else(|| QhjError::NoPhysicalSelection("no classical pole strengths".into()))?;
                ordered
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| {
                        let c = exponent_for(&strengths, pair.pole)?;
                        // the root carrying +c/ħ is c + (order of G)/4
                        let aligned = c + quarter(i);
                        let (near, far) = if (pair.root_plus - aligned).abs() <= (pair.root_minus - aligned).abs() {
                            (pair.root_plus, pair.root_minus)
                        } else {
                            (pair.root_minus, pair.root_plus)
                        };
                        if (near - aligned).abs() > 1e-8 * aligned.abs().max(1.0) {
                            return Err(QhjError::NoPhysicalSelection(format!(
                                "classical strength {c} does not match the roots at y = {}",
                                pair.pole
                            )));
                        }
                        Ok(if c > 0.0 { near } else { far })
                    })
                    .collect::<Result<_, _>>()?
            }
        };

        let (growth, constant_c) = self.growth_and_constant(e)?;
        let agrees = positive.len() == 1 && positive[0] == chosen;
        Ok(ResidueSet {
            exponents: chosen.iter().enumerate().map(|(i, b)| (self.poles[i], b - quarter(i))).collect(),
            chosen: self.poles.iter().copied().zip(chosen).collect(),
            growth,
            constant_c,
            selection_rule: rule,
            agrees_with_normalizability: agrees,
        })
    }

    /// Substitutes `χ = w + P'/P`, `w = Σ b_i/(y - y_i) + Π + C`, into the `χ` equation.
    ///
    /// Multiplying by `L = ∏(y - y_i)` gives `L P'' + 2 W P' + κ P = 0` with
    /// `W = L w` and `κ = (W² + W' L - W L' + R L²) / L`, which must be constant.
    fn reduce(&self, e: f64, residues: &ResidueSet, n: usize) -> Result<Reduction, QhjError> {
        let l = &self.locator;
        let mut w = &(&residues.growth + &Poly::constant(residues.constant_c)) * l;
        for &p in &self.poles {
            let b = residues
                .residue_at(p)
                .ok_or_else(|| QhjError::NoPhysicalSelection(format!("no residue chosen at y = {p}")))?;
            let (cofactor, _) = l.div_rem(&Poly::from_roots(&[p]))?;
            w = &w + &cofactor.scale(&b);
        }
        let rn = &self.num_energy.scale(&e) + &self.num_base;
        let square = &w * &w;
        let potential_term = &rn * &self.locator_sq_over_den;
        let nt = &(&(&square + &(&w.derivative() * l)) - &(&w * &l.derivative())) + &potential_term;
        let scale = square.max_abs_coeff().max(potential_term.max_abs_coeff()).max(1.0);
        let (quot, rem) = nt.div_rem(l)?;
        let leftover = quot.coeffs().iter().skip(1).map(|c| c.abs()).fold(rem.max_abs_coeff(), f64::max);
        let consistency_residual = leftover / scale;
        if consistency_residual > CONSISTENCY_TOL {
            return Err(QhjError::InconsistentReduction(format!(
                "non-constant leftover of relative size {consistency_residual:e} at E = {e}"
            )));
        }
        let kappa = quot.coeff(0);

        let infinity_residual = if residues.growth.is_zero() {
            // 1/y balance: 2 C s + R₋₁ with s the total residue
            let s: f64 = residues.chosen.iter().map(|(_, b)| b).sum::<f64>() + n as f64;
            (2.0 * residues.constant_c * s + self.r_at_infinity(e, -1)).abs()
        } else {
            // y¹ balance: 2 π₁ C + R₁
            (2.0 * residues.growth.coeff(1) * residues.constant_c + self.r_at_infinity(e, 1)).abs()
        };
        if infinity_residual > CONSISTENCY_TOL * e.abs().max(1.0) {
            return Err(QhjError::InconsistentReduction(format!(
                "large-y matching fails with residual {infinity_residual:e}"
            )));
        }

        let (mut sigma, mut tau, mut lambda0) = (l.clone(), w.scale(&2.0), kappa);
        let dom = self.spec.change.y_domain();
        let mid = if dom.is_bounded() { 0.5 * (dom.lo + dom.hi) } else { 0.0 };
        if sigma.eval(&mid) < 0.0 {
            sigma = -sigma;
            tau = -tau;
            lambda0 = -lambda0;
        }
        Ok(Reduction { ode: PolynomialOde::new(sigma, tau, lambda0)?, consistency_residual, infinity_residual })
    }

    /// `g(E)`: the termination gap of the degree-`n` polynomial at trial energy `e`.
    pub fn termination_gap(&self, e: f64, n: usize) -> Result<f64, QhjError> {
        let pairs = self.pairs_at(e)?;
        let residues = self.select(&pairs, e)?;
        Ok(self.reduce(e, &residues, n)?.ode.termination_gap(n))
    }
}

fn exponent_for(table: &[(f64, f64)], pole: f64) -> Result<f64, QhjError> {
    table
        .iter()
        .find(|(p, _)| *p == pole)
        .map(|(_, v)| *v)
        .ok_or_else(|| QhjError::NoPhysicalSelection(format!("no boundary data for pole y = {pole}")))
}

pub fn build_chi_equation(spec: &PotentialSpec, e: f64) -> Result<ChiEquation, QhjError> {
    Arc::new(ChiFamily::new(spec)?).at(e)
}

impl ChiEquation {
    pub fn family(&self) -> &Arc<ChiFamily> {
        &self.family
    }

    pub fn poles(&self) -> &[f64] {
        &self.family.poles
    }

    /// Residue pairs at every declared fixed pole.
    pub fn residue_pairs(&self) -> Result<Vec<ResiduePair>, QhjError> {
        self.family.poles.iter().map(|&p| fixed_pole_residues(self, p)).collect()
    }
}

pub fn fixed_pole_residues(eq: &ChiEquation, pole: f64) -> Result<ResiduePair, QhjError> {
    if !eq.family.poles.contains(&pole) {
        return Err(QhjError::UndeclaredPole(format!("y = {pole} is not a fixed pole")));
    }
    let exact = rational_from_f64(pole)?;
    let r2 = eq.fixed_pole_data.iter().find(|d| d.pole == exact).map_or(0.0, |d| rational_to_f64(&d.coefficient(2)));
    ResiduePair::from_r2(pole, r2)
}

pub fn select_residues(spec: &PotentialSpec, eq: &ChiEquation, pairs: &[ResiduePair]) -> Result<ResidueSet, QhjError> {
    if spec != eq.family.spec() {
        return Err(QhjError::NoPhysicalSelection("equation built for a different potential".into()));
    }
    eq.family.select(pairs, eq.energy)
}

pub fn reduce_to_polynomial_ode(eq: &ChiEquation, residues: &ResidueSet, n: usize) -> Result<Reduction, QhjError> {
    eq.family.reduce(eq.energy, residues, n)
}

fn scan_for_root(family: &ChiFamily, n: usize, lo: f64, hi: f64) -> Result<Option<(f64, f64)>, QhjError> {
    for k in 0..=SCAN_REFINEMENTS {
        let steps = ((hi - lo) * SCAN_DENSITY * f64::from(1u32 << k)).ceil().max(8.0) as usize;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let e = lo + (hi - lo) * i as f64 / steps as f64;
            let Ok(g) = family.termination_gap(e, n) else {
                prev = None;
                continue;
            };
            if g == 0.0 {
                return Ok(Some((e, e)));
            }
            if let Some((pe, pg)) = prev {
                if pg.signum() != g.signum() {
                    return Ok(Some((pe, e)));
                }
            }
            prev = Some((e, g));
        }
    }
    Ok(None)
}

fn bisect(family: &ChiFamily, n: usize, mut lo: f64, mut hi: f64) -> Result<f64, QhjError> {
    let mut g_lo = family.termination_gap(lo, n)?;
    for _ in 0..200 {
        if hi - lo <= ENERGY_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = family.termination_gap(mid, n)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lowest root of the termination condition for level `n`.
pub fn solve_energy(family: &ChiFamily, n: usize) -> Result<f64, QhjError> {
    let spec = family.spec();
    let floor = spec.energy_floor().ok_or(QhjError::RootNotFound {
        n,
        lo: f64::NEG_INFINITY,
        hi: f64::NAN,
        g_lo: f64::NAN,
        g_hi: f64::NAN,
    })?;
    let (mut lo, mut hi, windows) = match spec.continuum_threshold() {
        Some(t) => (floor, t, 1),
        None => {
            let width = 4.0 * spec.energy_scale() * ((n + 1) as f64).powi(2);
            (floor, floor + width, CAP_DOUBLINGS)
        }
    };
    let start = lo;
    for _ in 0..windows {
        if let Some((a, b)) = scan_for_root(family, n, lo, hi)? {
            return if a == b { Ok(a) } else { bisect(family, n, a, b) };
        }
        let width = hi - lo;
        lo = hi;
        hi += 2.0 * width;
    }
    let gap = |e: f64| family.termination_gap(e, n).unwrap_or(f64::NAN);
    Err(QhjError::RootNotFound { n, lo: start, hi, g_lo: gap(start), g_hi: gap(hi) })
}

/// Everything produced for one level.
#[derive(Debug, Clone)]
pub struct SolvedLevel {
    pub line: SpectralLine,
    pub residues: ResidueSet,
    pub reduction: Reduction,
    pub wavefunction: ClosedFormWavefunction,
}

pub fn solve_level(spec: &PotentialSpec, n: usize) -> Result<SpectralLine, QhjError> {
    let family = Arc::new(ChiFamily::new(spec)?);
    Ok(solve_with_family(&family, n)?.0)
}

fn solve_with_family(family: &Arc<ChiFamily>, n: usize) -> Result<(SpectralLine, ResidueSet, Reduction), QhjError> {
    let spec = family.spec();
    let energy_closed_form = spec.closed_form_energy(n)?;
    let e = solve_energy(family, n)?;
    // full exact-path checks at the root
    let eq = family.at(e)?;
    let pairs = eq.residue_pairs()?;
    let residues = family.select(&pairs, e)?;
    let reduction = family.reduce(e, &residues, n)?;
    let gap = reduction.ode.termination_gap(n);
    if gap.abs() > crate::orthopoly::TERMINATION_TOL {
        return Err(QhjError::InconsistentReduction(format!("termination gap {gap:e} at the refined root E = {e}")));
    }
    let lambda_scaled = matches!(spec.kind, crate::catalog::PotentialKind::Harmonic).then_some(e);
    let line = SpectralLine { n, energy_qhj: e, energy_closed_form, lambda_scaled };
    Ok((line, residues, reduction))
}

/// Solves level `n` and assembles its normalized wave function.
pub fn solve_state(spec: &PotentialSpec, n: usize) -> Result<SolvedLevel, QhjError> {
    let family = Arc::new(ChiFamily::new(spec)?);
    let (line, residues, reduction) = solve_with_family(&family, n)?;
    let wavefunction = wavefunction::assemble_with(spec, &line, &residues, &reduction)?;
    Ok(SolvedLevel { line, residues, reduction, wavefunction })
}
