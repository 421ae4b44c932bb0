//! Weight functions on phase space built from the three Japanese brackets
//! `<x>`, `<xi>` and `<z>`, where `<z>^2 = 1 + |x|^2 + |xi|^2`.
//!
//! Every weight used for Shubin, SG and Hörmander classes (and their Planck
//! functions) is a monomial `<x>^a <xi>^b <z>^c` with rational exponents.
//! Growth along phase space is captured exactly by three ray orders, which
//! makes order comparison decidable.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Div, Mul};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::Rational;

/// Largest exponent denominator accepted by the text parser.
pub const MAX_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("point has dimension ({x}, {xi}) but the weight lives on R^{n} x R^{n}")]
    DimensionMismatch { n: usize, x: usize, xi: usize },
    #[error("weights on different phase spaces (n = {0} vs n = {1})")]
    PhaseSpaceMismatch(usize, usize),
    #[error("weight {0} is not sub-linear")]
    NotSublinear(String),
    #[error("cannot parse weight: {0}")]
    Parse(String),
}

/// `<x>^a <xi>^b <z>^c` on `R^n x R^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightExpr {
    dim_n: usize,
    a: Rational,
    b: Rational,
    c: Rational,
}

/// Growth exponents of a weight along `(x, 0)`, `(0, xi)` and diagonal rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RayOrders {
    pub x_ray: Rational,
    pub xi_ray: Rational,
    pub diag_ray: Rational,
}

impl RayOrders {
    pub fn as_array(&self) -> [Rational; 3] {
        [self.x_ray, self.xi_ray, self.diag_ray]
    }

    pub fn min(&self) -> Rational {
        self.x_ray.min(self.xi_ray).min(self.diag_ray)
    }

    pub fn max(&self) -> Rational {
        self.x_ray.max(self.xi_ray).max(self.diag_ray)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    /// `w1 <~ w2`
    Le,
    /// `w1 >~ w2`
    Ge,
    /// `w1 ~ w2`
    Eq,
    Incomparable,
}

impl Comparison {
    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Le | Comparison::Eq)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Comparison::Ge | Comparison::Eq)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Le => "LE",
            Comparison::Ge => "GE",
            Comparison::Eq => "EQ",
            Comparison::Incomparable => "INCOMPARABLE",
        })
    }
}

fn bracket(sq_norm: f64) -> f64 {
    libm::sqrt(1.0 + sq_norm)
}

fn rpow(base: f64, e: Rational) -> f64 {
    if e.is_zero() {
        1.0
    } else if e.is_integer() {
        libm::pow(base, e.to_integer() as f64)
    } else {
        libm::pow(base, e.to_f64().unwrap_or(0.0))
    }
}

impl WeightExpr {
    pub fn new(dim_n: usize, a: Rational, b: Rational, c: Rational) -> Self {
        assert!(dim_n > 0, "phase space dimension must be positive");
        WeightExpr { dim_n, a, b, c }
    }

    pub fn one(dim_n: usize) -> Self {
        Self::new(dim_n, Rational::zero(), Rational::zero(), Rational::zero())
    }

    /// `<x>^a`
    pub fn x(dim_n: usize, a: Rational) -> Self {
        Self::new(dim_n, a, Rational::zero(), Rational::zero())
    }

    /// `<xi>^b`
    pub fn xi(dim_n: usize, b: Rational) -> Self {
        Self::new(dim_n, Rational::zero(), b, Rational::zero())
    }

    /// `<z>^c`
    pub fn z(dim_n: usize, c: Rational) -> Self {
        Self::new(dim_n, Rational::zero(), Rational::zero(), c)
    }

    /// Shubin weight `<z>^m`.
    pub fn shubin(dim_n: usize, m: Rational) -> Self {
        Self::z(dim_n, m)
    }

    /// SG weight `<xi>^m1 <x>^m2`.
    pub fn sg(dim_n: usize, m1: Rational, m2: Rational) -> Self {
        Self::new(dim_n, m2, m1, Rational::zero())
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    /// Exponent triple `(a, b, c)`.
    pub fn exponents(&self) -> (Rational, Rational, Rational) {
        (self.a, self.b, self.c)
    }

    pub fn ray_orders(&self) -> RayOrders {
        RayOrders {
            x_ray: self.a + self.c,
            xi_ray: self.b + self.c,
            diag_ray: self.a + self.b + self.c,
        }
    }

    /// Exponent `s` in the temperance estimate
    /// `w(x+y, xi+eta) <~ w(x, xi) (1+|y|+|eta|)^s`.
    pub fn temperance_exponent(&self) -> Rational {
        self.a.abs() + self.b.abs() + self.c.abs()
    }

    pub fn pow(&self, e: Rational) -> Self {
        Self::new(self.dim_n, self.a * e, self.b * e, self.c * e)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.dim_n, -self.a, -self.b, -self.c)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<f64, WeightError> {
        if x.len() != self.dim_n || xi.len() != self.dim_n {
            return Err(WeightError::DimensionMismatch {
                n: self.dim_n,
                x: x.len(),
                xi: xi.len(),
            });
        }
        let sx: f64 = x.iter().map(|v| v * v).sum();
        let sxi: f64 = xi.iter().map(|v| v * v).sum();
        Ok(self.eval_sq_norms(sx, sxi))
    }

    /// Evaluation from `|x|^2` and `|xi|^2` only; weights are radial in each
    /// variable separately.
    pub fn eval_sq_norms(&self, sx: f64, sxi: f64) -> f64 {
        rpow(bracket(sx), self.a) * rpow(bracket(sxi), self.b) * rpow(bracket(sx + sxi), self.c)
    }

    pub fn compare(&self, other: &WeightExpr) -> Result<Comparison, WeightError> {
        if self.dim_n != other.dim_n {
            return Err(WeightError::PhaseSpaceMismatch(self.dim_n, other.dim_n));
        }
        let d = (self.clone() / other.clone()).ray_orders();
        let d = d.as_array();
        let le = d.iter().all(|v| *v <= Rational::zero());
        let ge = d.iter().all(|v| *v >= Rational::zero());
        Ok(match (le, ge) {
            (true, true) => Comparison::Eq,
            (true, false) => Comparison::Le,
            (false, true) => Comparison::Ge,
            (false, false) => Comparison::Incomparable,
        })
    }

    /// `1 <~ w <~ <z>`: every ray order in `[0, 1]`.
    pub fn is_sublinear(&self) -> bool {
        self.ray_orders()
            .as_array()
            .iter()
            .all(|v| *v >= Rational::zero() && *v <= Rational::from_integer(1))
    }

    pub fn is_bounded(&self) -> bool {
        self.ray_orders().max() <= Rational::zero()
    }
}

impl Mul for WeightExpr {
    type Output = WeightExpr;

    fn mul(self, rhs: WeightExpr) -> WeightExpr {
        assert_eq!(self.dim_n, rhs.dim_n, "weights on different phase spaces");
        WeightExpr::new(self.dim_n, self.a + rhs.a, self.b + rhs.b, self.c + rhs.c)
    }
}

impl Div for WeightExpr {
    type Output = WeightExpr;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: WeightExpr) -> WeightExpr {
        self * rhs.inv()
    }
}

fn fmt_exp(e: Rational) -> String {
    if e.is_integer() {
        alloc::format!("{}", e.to_integer())
    } else {
        alloc::format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("<x>", self.a), ("<xi>", self.b), ("<z>", self.c)] {
            if e.is_zero() {
                continue;
            }
            if e == Rational::from_integer(1) {
                parts.push(String::from(name));
            } else {
                parts.push(alloc::format!("{}^{}", name, fmt_exp(e)));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}

/// Parses an exponent: integer, fraction `p/q`, or terminating decimal, with
/// optional parentheses and sign. The reduced denominator must not exceed
/// [`MAX_DENOMINATOR`].
pub fn parse_rational(text: &str) -> Result<Rational, WeightError> {
    let t = text.trim();
    let t = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(t)
        .trim();
    let err = || WeightError::Parse(alloc::format!("bad exponent `{}`", text));
    let value = if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| err())?;
        let q: i64 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        Rational::new(p, q)
    } else if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.trim_start().starts_with('-');
        let int_val: i64 = match int.trim() {
            "" | "-" | "+" => 0,
            s => s.parse().map_err(|_| err())?,
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_val: i64 = frac.parse().map_err(|_| err())?;
        let mag = int_val.abs() * scale + frac_val;
        Rational::new(if negative { -mag } else { mag }, scale)
    } else {
        Rational::from_integer(t.parse().map_err(|_| err())?)
    };
    if *value.denom() > MAX_DENOMINATOR {
        return Err(WeightError::Parse(alloc::format!(
            "exponent `{}` has denominator {} > {}",
            text,
            value.denom(),
            MAX_DENOMINATOR
        )));
    }
    Ok(value)
}

/// Parses `<x>^a * <xi>^b * <z>^c`. Factors may be omitted, repeated or
/// reordered; repeated factors add their exponents. `1` is the unit weight.
pub fn parse_weight(text: &str, dim_n: usize) -> Result<WeightExpr, WeightError> {
    let mut w = WeightExpr::one(dim_n);
    let body = text.trim();
    if body.is_empty() {
        return Err(WeightError::Parse(String::from("empty weight")));
    }
    for factor in body.split('*') {
        let factor = factor.trim();
        if factor == "1" {
            continue;
        }
        let (head, exp) = match factor.split_once('^') {
            Some((h, e)) => (h.trim(), parse_rational(e)?),
            None => (factor, Rational::from_integer(1)),
        };
        let unit = match head {
            "<x>" => WeightExpr::x(dim_n, exp),
            "<xi>" => WeightExpr::xi(dim_n, exp),
            "<z>" => WeightExpr::z(dim_n, exp),
            _ => {
                return Err(WeightError::Parse(alloc::format!(
                    "unknown factor `{}` (expected <x>, <xi> or <z>)",
                    factor
                )))
            }
        };
        w = w * unit;
    }
    Ok(w)
}

/// Planck function `h = 1 / (Phi Psi)`.
pub fn planck(phi: &WeightExpr, psi: &WeightExpr) -> Result<WeightExpr, WeightError> {
    for w in [phi, psi] {
        if !w.is_sublinear() {
            return Err(WeightError::NotSublinear(alloc::format!("{}", w)));
        }
    }
    if phi.dim_n != psi.dim_n {
        return Err(WeightError::PhaseSpaceMismatch(phi.dim_n, psi.dim_n));
    }
    Ok((phi.clone() * psi.clone()).inv())
}

/// Largest `delta` with `Phi Psi >~ (1+|x|+|xi|)^delta`, if positive.
pub fn sup_exponent(phi: &WeightExpr, psi: &WeightExpr) -> Result<Option<Rational>, WeightError> {
    for w in [phi, psi] {
        if !w.is_sublinear() {
            return Err(WeightError::NotSublinear(alloc::format!("{}", w)));
        }
    }
    let delta = (phi.clone() * psi.clone()).ray_orders().min();
    Ok(if delta > Rational::zero() { Some(delta) } else { None })
}

/// Largest `eps > 0` with `h^{-eps} <~ M0 / Mt`, or `None` if no positive
/// exponent works. Rays where `h` does not decay only impose `M0/Mt >~ 1`.
pub fn epsilon_gain(
    m0: &WeightExpr,
    mt: &WeightExpr,
    h: &WeightExpr,
) -> Result<Option<Rational>, WeightError> {
    for w in [mt, h] {
        if w.dim_n != m0.dim_n {
            return Err(WeightError::PhaseSpaceMismatch(m0.dim_n, w.dim_n));
        }
    }
    let ratio = (m0.clone() / mt.clone()).ray_orders().as_array();
    let hr = h.ray_orders().as_array();
    let mut eps: Option<Rational> = None;
    for (r, hk) in ratio.iter().zip(hr.iter()) {
        if hk.is_zero() {
            if *r < Rational::zero() {
                return Ok(None);
            }
        } else if *hk < Rational::zero() {
            let e = *r / -*hk;
            eps = Some(eps.map_or(e, |cur| cur.min(e)));
        } else {
            // h grows along this ray: h^{-eps} decays, no constraint for eps > 0
            // beyond the others.
        }
    }
    Ok(eps.filter(|e| *e > Rational::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn int(p: i64) -> Rational {
        Rational::from_integer(p)
    }

    #[test]
    fn eval_examples() {
        let z2 = WeightExpr::z(1, int(2));
        assert_eq!(z2.eval(&[0.0], &[0.0]).unwrap(), 1.0);

        let xxi = WeightExpr::x(1, int(1)) * WeightExpr::xi(1, int(1));
        let v = xxi.eval(&[3.0], &[4.0]).unwrap();
        assert!((v - libm::sqrt(10.0) * libm::sqrt(17.0)).abs() < 1e-12);
        assert!((v - 13.0384).abs() < 1e-4);

        let zm2 = WeightExpr::z(1, int(-2));
        let v = zm2.eval(&[1.0], &[libm::sqrt(2.0)]).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let w = WeightExpr::z(2, int(1));
        assert!(matches!(
            w.eval(&[1.0], &[1.0, 2.0]),
            Err(WeightError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compare_examples() {
        let xxi = WeightExpr::x(1, int(1)) * WeightExpr::xi(1, int(1));
        let z = |c| WeightExpr::z(1, int(c));
        assert_eq!(xxi.compare(&z(2)).unwrap(), Comparison::Le);
        assert_eq!(
            WeightExpr::x(1, int(1)).compare(&WeightExpr::xi(1, int(1))).unwrap(),
            Comparison::Incomparable
        );
        assert_eq!(z(1).compare(&xxi).unwrap(), Comparison::Le);
        assert_eq!(z(1).compare(&z(1)).unwrap(), Comparison::Eq);
        assert_eq!(z(3).compare(&xxi).unwrap(), Comparison::Ge);
    }

    #[test]
    fn sublinearity() {
        assert!(WeightExpr::z(1, int(1)).is_sublinear());
        assert!(WeightExpr::x(1, int(1)).is_sublinear());
        assert!(!WeightExpr::z(1, int(2)).is_sublinear());
        assert!(WeightExpr::xi(1, r(1, 2)).is_sublinear());
    }

    #[test]
    fn planck_examples() {
        let z = WeightExpr::z(1, int(1));
        assert_eq!(planck(&z, &z).unwrap(), WeightExpr::z(1, int(-2)));
        let h = planck(&WeightExpr::x(1, int(1)), &WeightExpr::xi(1, int(1))).unwrap();
        assert_eq!(h, WeightExpr::new(1, int(-1), int(-1), int(0)));
        assert_eq!(h.eval(&[0.0], &[0.0]).unwrap(), 1.0);
        assert!(matches!(
            planck(&WeightExpr::z(1, int(2)), &z),
            Err(WeightError::NotSublinear(_))
        ));
    }

    #[test]
    fn sup_exponent_examples() {
        let z = WeightExpr::z(1, int(1));
        assert_eq!(sup_exponent(&z, &z).unwrap(), Some(int(2)));
        let sg = sup_exponent(&WeightExpr::x(1, int(1)), &WeightExpr::xi(1, int(1))).unwrap();
        assert_eq!(sg, Some(int(1)));
        let horm = sup_exponent(&WeightExpr::xi(1, r(1, 2)), &WeightExpr::xi(1, int(1))).unwrap();
        assert_eq!(horm, None);
    }

    #[test]
    fn epsilon_gain_examples() {
        let z = |c| WeightExpr::z(1, int(c));
        assert_eq!(epsilon_gain(&z(2), &z(1), &z(-2)).unwrap(), Some(r(1, 2)));
        assert_eq!(epsilon_gain(&z(2), &z(2), &z(-2)).unwrap(), None);
        let m0 = WeightExpr::sg(1, int(2), int(2));
        let mt = WeightExpr::sg(1, int(1), int(1));
        let h = WeightExpr::new(1, int(-1), int(-1), int(0));
        assert_eq!(epsilon_gain(&m0, &mt, &h).unwrap(), Some(int(1)));
    }

    #[test]
    fn parse_roundtrip_and_canonical() {
        let w = parse_weight("<x>^3/2 * <xi>^-1 * <z>", 2).unwrap();
        assert_eq!(w.exponents(), (r(3, 2), int(-1), int(1)));
        let w2 = parse_weight(&alloc::format!("{}", w), 2).unwrap();
        assert_eq!(w, w2);
        // repeated generators merge
        let w3 = parse_weight("<z> * <z>^(1/2) * <x>^0", 1).unwrap();
        assert_eq!(w3, WeightExpr::z(1, r(3, 2)));
        assert_eq!(parse_weight("1", 1).unwrap(), WeightExpr::one(1));
        assert_eq!(parse_weight("<xi>^0.5", 1).unwrap(), WeightExpr::xi(1, r(1, 2)));
    }

    #[test]
    fn parse_rejects_coarse_denominators() {
        assert!(parse_weight("<x>^1/65", 1).is_err());
        assert!(parse_weight("<x>^0.33", 1).is_err());
        assert!(parse_weight("<x>^0.3", 1).is_ok());
        assert!(parse_weight("<y>^2", 1).is_err());
        assert!(parse_rational("1/64").is_ok());
    }
}
