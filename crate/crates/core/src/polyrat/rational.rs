use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{Coeff, Poly, PolyratError};

/// Relative threshold on `|denominator(pole)|` for accepting a candidate pole.
pub const POLE_TOL: f64 = 1e-10;

/// Quotient of two polynomials, kept in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn<T> {
    num: Poly<T>,
    den: Poly<T>,
}

/// Principal part of a Laurent expansion: `Σ_k c_k (y - pole)^(-k)` for `k = 1..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentData<T> {
    pub pole: T,
    pub coefficients: BTreeMap<usize, T>,
    pub max_order: usize,
}

impl<T: Coeff> LaurentData<T> {
    /// Coefficient of `(y - pole)^(-order)`; zero when absent.
    pub fn coefficient(&self, order: usize) -> T {
        self.coefficients.get(&order).cloned().unwrap_or_else(T::zero)
    }

    pub fn residue(&self) -> T {
        self.coefficient(1)
    }
}

/// Large-`y` expansion `Σ_j c_j y^(leading_power - j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion<T> {
    pub leading_power: i64,
    pub coeffs: Vec<T>,
}

impl<T: Coeff> AsymptoticExpansion<T> {
    /// Coefficient of `y^power` (zero outside the computed range).
    pub fn coefficient(&self, power: i64) -> T {
        let j = self.leading_power - power;
        if j < 0 {
            return T::zero();
        }
        self.coeffs.get(j as usize).cloned().unwrap_or_else(T::zero)
    }
}

impl<T: Coeff> RationalFn<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self, PolyratError> {
        if den.is_zero() {
            return Err(PolyratError::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly<T>, den: Poly<T>) -> Self {
        if num.is_zero() {
            return Self { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            let (n, _) = num.div_rem(&g).expect("gcd is nonzero");
            let (d, _) = den.div_rem(&g).expect("gcd is nonzero");
            (n, d)
        } else {
            (num, den)
        };
        let lead = den.leading().cloned().expect("nonzero denominator");
        let inv = T::one() / lead;
        Self { num: num.scale(&inv), den: den.monic() }
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn numerator(&self) -> &Poly<T> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, y: &T) -> T {
        self.num.eval(y) / self.den.eval(y)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Coefficient-wise conversion; the result is not re-reduced.
    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> RationalFn<U> {
        RationalFn { num: self.num.map(&f), den: self.den.map(&f) }
    }

    pub fn to_complex(&self) -> RationalFn<Complex64> {
        self.map(Coeff::to_complex)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Quotient rule, reduced.
    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduced(num, &self.den * &self.den)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, PolyratError> {
        if rhs.is_zero() {
            return Err(PolyratError::DivisionByZero);
        }
        Ok(Self::reduced(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    /// Order of `pole` as a root of the denominator; 0 when it is not a root.
    pub fn pole_order(&self, pole: &T) -> usize {
        self.den.root_multiplicity(pole)
    }

    /// Negative-order part of the Laurent expansion about a root of the denominator.
    pub fn laurent_at(&self, pole: &T) -> Result<LaurentData<T>, PolyratError> {
        let scale = self.den.max_abs_coeff();
        let residual = self.den.eval(pole).magnitude();
        let tol = POLE_TOL * scale;
        let accepted = if T::ZERO_TOL == 0.0 { residual == 0.0 } else { residual <= tol };
        if !accepted {
            return Err(PolyratError::NotAPole { pole: pole.to_string(), residual });
        }
        let den_shift = self.den.taylor_shift(pole);
        let num_shift = self.num.taylor_shift(pole);
        let m = den_shift.coeffs().iter().take_while(|c| is_small(*c, scale)).count().max(1);
        let reduced_den: Vec<T> = den_shift.coeffs()[m..].to_vec();
        let series = series_div(num_shift.coeffs(), &reduced_den, m);
        let mut coefficients = BTreeMap::new();
        for k in 1..=m {
            let c = series[m - k].clone();
            if !is_small(&c, self.num.max_abs_coeff().max(f64::MIN_POSITIVE)) {
                coefficients.insert(k, c);
            }
        }
        let max_order = coefficients
            .keys()
            .next_back()
            .copied()
            .ok_or_else(|| PolyratError::NotAPole { pole: pole.to_string(), residual })?;
        Ok(LaurentData { pole: pole.clone(), coefficients, max_order })
    }

    /// Coefficients of `y^j` for `j` from `deg num - deg den` down to `-depth`.
    pub fn expansion_at_infinity(&self, depth: usize) -> AsymptoticExpansion<T> {
        let n = self.num.degree().map_or(0, |d| d as i64);
        let d = self.den.degree().unwrap_or(0) as i64;
        let leading_power = n - d;
        let terms = (leading_power + depth as i64 + 1).max(0) as usize;
        if self.num.is_zero() {
            return AsymptoticExpansion { leading_power, coeffs: vec![T::zero(); terms] };
        }
        let rev_num: Vec<T> = self.num.coeffs().iter().rev().cloned().collect();
        let rev_den: Vec<T> = self.den.coeffs().iter().rev().cloned().collect();
        AsymptoticExpansion { leading_power, coeffs: series_div(&rev_num, &rev_den, terms) }
    }
}

fn is_small<T: Coeff>(c: &T, scale: f64) -> bool {
    if T::ZERO_TOL == 0.0 {
        c.is_zero()
    } else {
        c.magnitude() <= POLE_TOL * scale
    }
}

/// First `terms` coefficients of the power series `a(t) / b(t)`; requires `b(0) != 0`.
fn series_div<T: Coeff>(a: &[T], b: &[T], terms: usize) -> Vec<T> {
    let b0 = b[0].clone();
    let mut out: Vec<T> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = a.get(k).cloned().unwrap_or_else(T::zero);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            acc = acc - b[j].clone() * out[k - j].clone();
        }
        out.push(acc / b0.clone());
    }
    out
}

impl<T: Coeff> Add for &RationalFn<T> {
    type Output = RationalFn<T>;
    fn add(self, rhs: Self) -> RationalFn<T> {
        if self.den == rhs.den {
            return RationalFn::reduced(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::reduced(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<T: Coeff> Sub for &RationalFn<T> {
    type Output = RationalFn<T>;
    fn sub(self, rhs: Self) -> RationalFn<T> {
        self + &(-rhs)
    }
}

impl<T: Coeff> Mul for &RationalFn<T> {
    type Output = RationalFn<T>;
    fn mul(self, rhs: Self) -> RationalFn<T> {
        RationalFn::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<T: Coeff> Div for &RationalFn<T> {
    type Output = RationalFn<T>;
    /// Panics on division by the zero function; see [`RationalFn::checked_div`].
    fn div(self, rhs: Self) -> RationalFn<T> {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl<T: Coeff> Neg for &RationalFn<T> {
    type Output = RationalFn<T>;
    fn neg(self) -> RationalFn<T> {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl<T: Coeff> $tr for RationalFn<T> {
            type Output = RationalFn<T>;
            fn $m(self, rhs: Self) -> RationalFn<T> { (&self).$m(&rhs) }
        }
        impl<T: Coeff> $tr<&RationalFn<T>> for RationalFn<T> {
            type Output = RationalFn<T>;
            fn $m(self, rhs: &RationalFn<T>) -> RationalFn<T> { (&self).$m(rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl<T: Coeff> From<Poly<T>> for RationalFn<T> {
    fn from(p: Poly<T>) -> Self {
        Self::from_poly(p)
    }
}
