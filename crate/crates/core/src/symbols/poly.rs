use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use super::SymbolError;

/// Exponent vector over `(x_1..x_n, xi_1..xi_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(dim_n: usize) -> Self {
        Monomial(vec![0; 2 * dim_n])
    }

    /// Builds `x^beta xi^alpha`.
    pub fn new(beta: &[u32], alpha: &[u32]) -> Self {
        assert_eq!(beta.len(), alpha.len());
        let mut e = Vec::with_capacity(2 * beta.len());
        e.extend_from_slice(beta);
        e.extend_from_slice(alpha);
        Monomial(e)
    }

    pub fn dim_n(&self) -> usize {
        self.0.len() / 2
    }

    /// Exponents over `x`.
    pub fn beta(&self) -> &[u32] {
        &self.0[..self.dim_n()]
    }

    /// Exponents over `xi`.
    pub fn alpha(&self) -> &[u32] {
        &self.0[self.dim_n()..]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn deg_x(&self) -> u32 {
        self.beta().iter().sum()
    }

    pub fn deg_xi(&self) -> u32 {
        self.alpha().iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `true` when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Sparse polynomial `sum c_{alpha beta} x^beta xi^alpha` with complex
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol {
    dim_n: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl PolySymbol {
    pub fn zero(dim_n: usize) -> Self {
        assert!(dim_n > 0, "phase space dimension must be positive");
        PolySymbol {
            dim_n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim_n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim_n);
        p.add_term(Monomial::one(dim_n), c);
        p
    }

    pub fn one(dim_n: usize) -> Self {
        Self::constant(dim_n, Complex64::new(1.0, 0.0))
    }

    /// The coordinate `x_j` (0-based).
    pub fn x(dim_n: usize, j: usize) -> Self {
        let mut e = vec![0; 2 * dim_n];
        e[j] = 1;
        Self::monomial(Monomial(e), Complex64::new(1.0, 0.0))
    }

    /// The coordinate `xi_j` (0-based).
    pub fn xi(dim_n: usize, j: usize) -> Self {
        let mut e = vec![0; 2 * dim_n];
        e[dim_n + j] = 1;
        Self::monomial(Monomial(e), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(m: Monomial, c: Complex64) -> Self {
        let mut p = Self::zero(m.dim_n());
        p.add_term(m, c);
        p
    }

    /// `|x|^2 = sum x_j^2`
    pub fn x_sq_norm(dim_n: usize) -> Self {
        (0..dim_n).fold(Self::zero(dim_n), |acc, j| {
            let xj = Self::x(dim_n, j);
            acc + &xj * &xj
        })
    }

    /// `|xi|^2 = sum xi_j^2`
    pub fn xi_sq_norm(dim_n: usize) -> Self {
        (0..dim_n).fold(Self::zero(dim_n), |acc, j| {
            let xij = Self::xi(dim_n, j);
            acc + &xij * &xij
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        assert_eq!(m.dim_n(), self.dim_n, "monomial from a different phase space");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.dim_n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Divides every coefficient by `d`.
    pub fn div_scalar(&self, d: f64) -> Self {
        let mut out = Self::zero(self.dim_n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v / d);
        }
        out
    }

    /// Drops coefficients with modulus `<= tol`.
    pub fn chop(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.dim_n);
        for (m, v) in &self.terms {
            if v.norm() > tol {
                out.add_term(m.clone(), *v);
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::deg_x).max()
    }

    pub fn deg_xi(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::deg_xi).max()
    }

    /// Shubin order: total degree in `(x, xi)`.
    pub fn shubin_order(&self) -> Result<u32, SymbolError> {
        self.total_degree().ok_or(SymbolError::ZeroPolynomial)
    }

    /// SG order `(deg_xi, deg_x)`.
    pub fn sg_order(&self) -> Result<(u32, u32), SymbolError> {
        match (self.deg_xi(), self.deg_x()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(SymbolError::ZeroPolynomial),
        }
    }

    /// Terms of maximal weighted degree, where `x` carries weight `wx` and
    /// `xi` carries weight `wxi`. Returns the part together with its degree.
    pub fn quasi_top_part(&self, wx: u32, wxi: u32) -> Option<(PolySymbol, u32)> {
        let wdeg = |m: &Monomial| wx * m.deg_x() + wxi * m.deg_xi();
        let d = self.terms.keys().map(wdeg).max()?;
        let mut top = Self::zero(self.dim_n);
        for (m, c) in &self.terms {
            if wdeg(m) == d {
                top.add_term(m.clone(), *c);
            }
        }
        Some((top, d))
    }

    pub fn homogeneous_top_part(&self) -> Option<(PolySymbol, u32)> {
        self.quasi_top_part(1, 1)
    }

    /// Monomials not dividing any other monomial of the polynomial. Each of
    /// them has a nonzero constant derivative of order equal to its degree.
    pub fn maximal_monomials(&self) -> Vec<Monomial> {
        self.terms
            .keys()
            .filter(|m| !self.terms.keys().any(|o| o != *m && m.divides(o)))
            .cloned()
            .collect()
    }

    /// Exact `d_xi^alpha d_x^beta`.
    pub fn differentiate(&self, alpha: &[u32], beta: &[u32]) -> Self {
        assert_eq!(alpha.len(), self.dim_n);
        assert_eq!(beta.len(), self.dim_n);
        let mut order = Vec::with_capacity(2 * self.dim_n);
        order.extend_from_slice(beta);
        order.extend_from_slice(alpha);
        let mut out = Self::zero(self.dim_n);
        'terms: for (m, c) in &self.terms {
            let mut factor = 1.0f64;
            let mut e = m.0.clone();
            for (k, &d) in order.iter().enumerate() {
                if d > e[k] {
                    continue 'terms;
                }
                for t in 0..d {
                    factor *= (e[k] - t) as f64;
                }
                e[k] -= d;
            }
            out.add_term(Monomial(e), c * factor);
        }
        out
    }

    /// Partial derivative in a single variable: index `< n` is `x_j`,
    /// otherwise `xi_{j-n}`.
    pub fn partial(&self, var: usize) -> Self {
        let mut alpha = vec![0; self.dim_n];
        let mut beta = vec![0; self.dim_n];
        if var < self.dim_n {
            beta[var] = 1;
        } else {
            alpha[var - self.dim_n] = 1;
        }
        self.differentiate(&alpha, &beta)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, SymbolError> {
        if x.len() != self.dim_n || xi.len() != self.dim_n {
            return Err(SymbolError::DimensionMismatch {
                n: self.dim_n,
                x: x.len(),
                xi: xi.len(),
            });
        }
        Ok(self.eval_unchecked(x, xi))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let maxdeg = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // power table per variable, then one product per monomial
        let mut powers: Vec<Vec<f64>> = Vec::with_capacity(2 * self.dim_n);
        for &v in x.iter().chain(xi.iter()) {
            let mut row = Vec::with_capacity(maxdeg + 1);
            let mut acc = 1.0;
            for _ in 0..=maxdeg {
                row.push(acc);
                acc *= v;
            }
            powers.push(row);
        }
        let mut sum = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = 1.0;
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= powers[k][e as usize];
                }
            }
            sum += c * t;
        }
        sum
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.dim_n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum |c| * deg(m)`: a Lipschitz constant of the polynomial on the unit
    /// cube in the max-norm.
    pub fn cube_lipschitz(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.norm() * m.degree() as f64)
            .sum()
    }

    /// Exact equality up to coefficient tolerance `tol` (absolute).
    pub fn approx_eq(&self, other: &PolySymbol, tol: f64) -> bool {
        let diff = self - other;
        diff.terms.values().all(|c| c.norm() <= tol)
    }
}

impl<'a> Add<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;

    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim_n, rhs.dim_n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Add for PolySymbol {
    type Output = PolySymbol;

    fn add(self, rhs: PolySymbol) -> PolySymbol {
        &self + &rhs
    }
}

impl<'a> Sub<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;

    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim_n, rhs.dim_n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for PolySymbol {
    type Output = PolySymbol;

    fn sub(self, rhs: PolySymbol) -> PolySymbol {
        &self - &rhs
    }
}

impl<'a> Mul<&'a PolySymbol> for &'a PolySymbol {
    type Output = PolySymbol;

    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim_n, rhs.dim_n);
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Complex64::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PolySymbol {
            dim_n: self.dim_n,
            terms: acc,
        }
    }
}

impl Mul for PolySymbol {
    type Output = PolySymbol;

    fn mul(self, rhs: PolySymbol) -> PolySymbol {
        &self * &rhs
    }
}

impl Neg for PolySymbol {
    type Output = PolySymbol;

    fn neg(self) -> PolySymbol {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;

    fn neg(self) -> PolySymbol {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

pub(crate) fn fmt_real(v: f64) -> String {
    if v == libm::trunc(v) && v.abs() < 1e15 {
        alloc::format!("{}", v as i64)
    } else {
        alloc::format!("{}", v)
    }
}

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.re == 0.0 {
        alloc::format!("({}i)", fmt_real(c.im))
    } else {
        let sign = if c.im < 0.0 { "-" } else { "+" };
        alloc::format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs()))
    }
}

/// Prints in the same text syntax accepted by [`super::parse_symbol`].
impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // highest degree first
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.cmp(a.0)));
        for (idx, (m, c)) in items.into_iter().enumerate() {
            let mut vars = Vec::new();
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if k < self.dim_n {
                    alloc::format!("x{}", k + 1)
                } else {
                    alloc::format!("xi{}", k - self.dim_n + 1)
                };
                vars.push(if e == 1 { name } else { alloc::format!("{}^{}", name, e) });
            }
            let (neg, mag) = if c.im == 0.0 && c.re < 0.0 {
                (true, Complex64::new(-c.re, 0.0))
            } else {
                (false, *c)
            };
            if idx > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let unit = mag == Complex64::new(1.0, 0.0);
            if vars.is_empty() {
                f.write_str(&fmt_coeff(mag))?;
            } else if unit {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_coeff(mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}
