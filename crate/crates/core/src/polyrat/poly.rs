use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{Coeff, PolyratError};

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// Trailing exact zeros are always trimmed, so the zero polynomial has no
/// coefficients and `degree() == coeffs().len() - 1` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `y`.
    pub fn identity() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `∏ (y - r)` over the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| &acc * &Self::new(vec![-r.clone(), T::one()]))
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `y^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * small_int::<T>(k)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self) -> Poly<Complex64> {
        self.map(Coeff::to_complex)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => {
                let inv = T::one() / lead.clone();
                let mut p = self.scale(&inv);
                if let Some(last) = p.coeffs.last_mut() {
                    *last = T::one();
                }
                p
            }
            None => self.clone(),
        }
    }

    /// Drops leading coefficients that are negligible relative to `scale`.
    pub fn trim_negligible(&self, scale: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.negligible(scale)) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyratError> {
        let dd = divisor.degree().ok_or(PolyratError::DivisionByZero)?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return Ok((Self::zero(), self.clone()));
        };
        let mut quot = vec![T::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd].clone() / lead.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - q.clone() * d.clone();
            }
            // the leading term cancels by construction
            rem[k + dd] = T::zero();
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor by Euclid, normalizing every remainder.
    ///
    /// For inexact coefficient types a remainder whose coefficients are all
    /// below `ZERO_TOL` relative to the current divisor counts as zero.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.monic(), b.monic());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let scale = b.max_abs_coeff().max(a.max_abs_coeff());
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero");
            let r = r.trim_negligible(scale);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Multiplicity of `root` (0 if not a root), with the pole-detection tolerance for inexact types.
    pub fn root_multiplicity(&self, root: &T) -> usize {
        let scale = self.max_abs_coeff();
        self.taylor_shift(root)
            .coeffs()
            .iter()
            .take_while(|c| {
                if T::ZERO_TOL == 0.0 {
                    c.is_zero()
                } else {
                    c.magnitude() <= super::rational::POLE_TOL * scale
                }
            })
            .count()
    }

    /// Coefficients of `P(center + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, center: &T) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = c[j].clone() + center.clone() * c[j + 1].clone();
            }
        }
        Self::new(c)
    }
}

impl Poly<f64> {
    /// Number of distinct real roots in `(lo, hi]` by a Sturm sequence.
    /// Infinite bounds are allowed.
    pub fn sturm_count(&self, lo: f64, hi: f64) -> usize {
        let seq = self.sturm_sequence();
        let lo_changes = sign_changes(&seq, lo);
        let hi_changes = sign_changes(&seq, hi);
        lo_changes.saturating_sub(hi_changes)
    }

    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return seq;
        }
        seq.push(self.derivative());
        let scale = self.max_abs_coeff();
        loop {
            let k = seq.len();
            let (_, r) = seq[k - 2].div_rem(&seq[k - 1]).expect("nonzero");
            let r = -r.trim_negligible(scale * 1e-4);
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Distinct real roots inside `(lo, hi)`, isolated with the Sturm count and
    /// refined by bisection on the sign of `self` to absolute `tol`.
    pub fn real_roots(&self, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let (lo, hi) = (finite_bound(self, lo, -1.0), finite_bound(self, hi, 1.0));
        let mut roots = Vec::new();
        self.isolate(lo, hi, tol, 0, &mut roots);
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn isolate(&self, lo: f64, hi: f64, tol: f64, depth: usize, out: &mut Vec<f64>) {
        let count = self.sturm_count(lo, hi);
        if count == 0 {
            return;
        }
        if count == 1 || depth > 200 || hi - lo <= tol {
            if let Some(r) = self.bisect_root(lo, hi, tol) {
                out.push(r);
            }
            return;
        }
        let mid = 0.5 * (lo + hi);
        self.isolate(lo, mid, tol, depth + 1, out);
        self.isolate(mid, hi, tol, depth + 1, out);
    }

    fn bisect_root(&self, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
        let mut flo = self.eval(&lo);
        let fhi = self.eval(&hi);
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo == 0.0 {
            // `lo` is excluded from the count; the isolated root lies strictly inside
            flo = -fhi;
        }
        if flo.signum() == fhi.signum() {
            // even-multiplicity root: fall back to the derivative's root
            return self.derivative().bisect_root(lo, hi, tol);
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(&mid);
            if fm == 0.0 {
                return Some(mid);
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Replaces an infinite bound by a finite one beyond every real root (Cauchy bound).
fn finite_bound(p: &Poly<f64>, x: f64, dir: f64) -> f64 {
    if x.is_finite() {
        return x;
    }
    let lead = p.leading().copied().unwrap_or(1.0).abs();
    let cauchy = 1.0 + p.coeffs()[..p.coeffs().len() - 1].iter().map(|c| c.abs() / lead).fold(0.0, f64::max);
    dir * (cauchy + 1.0)
}

fn sign_changes(seq: &[Poly<f64>], x: f64) -> usize {
    let signs = seq.iter().filter_map(|p| {
        let v = if x.is_infinite() {
            let d = p.degree().unwrap_or(0);
            let lead = p.leading().copied().unwrap_or(0.0);
            if d % 2 == 1 && x < 0.0 {
                -lead
            } else {
                lead
            }
        } else {
            p.eval(&x)
        };
        (v != 0.0).then_some(v > 0.0)
    });
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for s in signs {
        if prev.is_some_and(|p| p != s) {
            changes += 1;
        }
        prev = Some(s);
    }
    changes
}

fn small_int<T: Coeff>(k: usize) -> T {
    (0..k).fold(T::zero(), |acc, _| acc + T::one())
}

impl<T: Coeff> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})·y")?,
                _ => write!(f, "({c})·y^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl<T: Coeff> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Self) -> Poly<T> { (&self).$m(&rhs) }
        }
        impl<T: Coeff> $tr<&Poly<T>> for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: &Poly<T>) -> Poly<T> { (&self).$m(rhs) }
        }
        impl<T: Coeff> $tr<Poly<T>> for &Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl<T: Coeff> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}
