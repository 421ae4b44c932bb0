use core::fmt;

use num_complex::Complex64;

use super::{PolySymbol, SymbolError};

/// Quotient `num / base^power`.
///
/// Every rational symbol produced by the parametrix recursion is a polynomial
/// over a power of the same base symbol `p`, so the denominator is stored as
/// a base and an exponent. Quotient-rule derivatives raise the exponent by
/// one and never simplify.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSymbol {
    num: PolySymbol,
    base: PolySymbol,
    power: u32,
    guard_radius: f64,
}

impl RationalSymbol {
    pub fn new(num: PolySymbol, base: PolySymbol, power: u32) -> Result<Self, SymbolError> {
        if base.is_zero() {
            return Err(SymbolError::ZeroDenominator);
        }
        if num.dim_n() != base.dim_n() {
            return Err(SymbolError::PhaseSpaceMismatch(num.dim_n(), base.dim_n()));
        }
        Ok(RationalSymbol {
            num,
            base,
            power,
            guard_radius: 0.0,
        })
    }

    pub fn from_poly(p: PolySymbol) -> Self {
        let n = p.dim_n();
        RationalSymbol {
            num: p,
            base: PolySymbol::one(n),
            power: 0,
            guard_radius: 0.0,
        }
    }

    /// `1 / p`
    pub fn reciprocal(p: &PolySymbol) -> Result<Self, SymbolError> {
        Self::new(PolySymbol::one(p.dim_n()), p.clone(), 1)
    }

    pub fn with_guard_radius(mut self, r: f64) -> Self {
        self.guard_radius = r;
        self
    }

    pub fn guard_radius(&self) -> f64 {
        self.guard_radius
    }

    pub fn dim_n(&self) -> usize {
        self.num.dim_n()
    }

    pub fn num(&self) -> &PolySymbol {
        &self.num
    }

    pub fn base(&self) -> &PolySymbol {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Expanded denominator `base^power`.
    pub fn den(&self) -> PolySymbol {
        self.base.pow(self.power)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.power == 0
    }

    /// Number of stored numerator terms.
    pub fn term_count(&self) -> usize {
        self.num.len()
    }

    /// Same value with denominator `base^target`.
    pub fn raise_to(&self, target: u32) -> Self {
        assert!(target >= self.power);
        let mut out = self.clone();
        if target > self.power {
            out.num = &self.num * &self.base.pow(target - self.power);
            out.power = target;
        }
        out
    }

    fn common_base(&self, other: &RationalSymbol) -> Result<PolySymbol, SymbolError> {
        match (self.power, other.power) {
            (0, _) => Ok(other.base.clone()),
            (_, 0) => Ok(self.base.clone()),
            _ if self.base == other.base => Ok(self.base.clone()),
            _ => Err(SymbolError::IncompatibleDenominators),
        }
    }

    fn rebased(&self, base: &PolySymbol) -> Self {
        if self.power == 0 {
            RationalSymbol {
                num: self.num.clone(),
                base: base.clone(),
                power: 0,
                guard_radius: self.guard_radius,
            }
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &RationalSymbol) -> Result<Self, SymbolError> {
        let base = self.common_base(other)?;
        let power = self.power.max(other.power);
        let a = self.rebased(&base).raise_to(power);
        let b = other.rebased(&base).raise_to(power);
        Ok(RationalSymbol {
            num: &a.num + &b.num,
            base,
            power,
            guard_radius: self.guard_radius.max(other.guard_radius),
        })
    }

    pub fn sub(&self, other: &RationalSymbol) -> Result<Self, SymbolError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &RationalSymbol) -> Result<Self, SymbolError> {
        let base = self.common_base(other)?;
        Ok(RationalSymbol {
            num: &self.num * &other.num,
            base,
            power: self.power + other.power,
            guard_radius: self.guard_radius.max(other.guard_radius),
        })
    }

    pub fn mul_poly(&self, p: &PolySymbol) -> Self {
        RationalSymbol {
            num: &self.num * p,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        RationalSymbol {
            num: self.num.scale(c),
            ..self.clone()
        }
    }

    pub fn div_scalar(&self, d: f64) -> Self {
        RationalSymbol {
            num: self.num.div_scalar(d),
            ..self.clone()
        }
    }

    /// Drops numerator coefficients with modulus `<= tol`.
    pub fn chop(&self, tol: f64) -> Self {
        RationalSymbol {
            num: self.num.chop(tol),
            ..self.clone()
        }
    }

    /// Growth degree `deg num - power * deg base` along generic rays.
    pub fn degree(&self) -> i64 {
        let dn = self.num.total_degree().map_or(0, |d| d as i64);
        let db = self.base.total_degree().map_or(0, |d| d as i64);
        dn - self.power as i64 * db
    }

    /// Divides by one more power of the base.
    pub fn div_base(&self) -> Self {
        RationalSymbol {
            power: self.power + 1,
            ..self.clone()
        }
    }

    /// Single partial derivative by the quotient rule:
    /// `d(N / B^k) = (dN B - k N dB) / B^(k+1)`.
    pub fn partial(&self, var: usize) -> Self {
        let dn = self.num.partial(var);
        if self.power == 0 {
            return RationalSymbol { num: dn, ..self.clone() };
        }
        let db = self.base.partial(var);
        let k = Complex64::new(self.power as f64, 0.0);
        let num = &(&dn * &self.base) - &(&self.num * &db).scale(k);
        RationalSymbol {
            num,
            power: self.power + 1,
            ..self.clone()
        }
    }

    /// Exact `d_xi^alpha d_x^beta`, applied as a sequence of single partials.
    pub fn differentiate(&self, alpha: &[u32], beta: &[u32]) -> Self {
        let n = self.dim_n();
        assert_eq!(alpha.len(), n);
        assert_eq!(beta.len(), n);
        if self.power == 0 {
            return RationalSymbol {
                num: self.num.differentiate(alpha, beta),
                ..self.clone()
            };
        }
        let mut out = self.clone();
        for (j, &b) in beta.iter().enumerate() {
            for _ in 0..b {
                out = out.partial(j);
            }
        }
        for (j, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                out = out.partial(n + j);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, SymbolError> {
        let num = self.num.eval(x, xi)?;
        if self.power == 0 {
            return Ok(num);
        }
        let b = self.base.eval_unchecked(x, xi);
        let den = b.powu(self.power);
        if den.norm() == 0.0 || !den.norm().is_finite() {
            return Err(SymbolError::VanishingDenominator);
        }
        Ok(num / den)
    }

    /// Fails with [`SymbolError::ExpressionSwell`] above `cap` numerator terms.
    pub fn check_cap(&self, cap: usize) -> Result<(), SymbolError> {
        if self.num.len() > cap {
            Err(SymbolError::ExpressionSwell {
                terms: self.num.len(),
                cap,
            })
        } else {
            Ok(())
        }
    }
}

impl From<PolySymbol> for RationalSymbol {
    fn from(p: PolySymbol) -> Self {
        RationalSymbol::from_poly(p)
    }
}

impl fmt::Display for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => write!(f, "{}", self.num),
            1 => write!(f, "({}) / ({})", self.num, self.base),
            k => write!(f, "({}) / ({})^{}", self.num, self.base, k),
        }
    }
}
