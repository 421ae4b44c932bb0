//! Left-quantized composition and truncated parametrices.
//!
//! Composition follows `p # q ~ sum_alpha (1/alpha!) d_xi^alpha p D_x^alpha q`
//! with `D = -i d/dx`; for polynomial symbols the sum is finite and exact.
//! The left parametrix of a hypoelliptic `p` is built by grading on
//! `j = k + |alpha|`:
//!
//! ```text
//! q_0 = 1/p,   q_j = -(1/p) sum_{k<j, |alpha|=j-k} (1/alpha!) d_xi^alpha q_k D_x^alpha p
//! ```
//!
//! so that all gradings `1..=N` of `(q_0 + ... + q_N) # p` cancel and the
//! remainder is the sum of the gradings above `N`.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::certify::{Certificate, CertificateParams, Verdict};
use crate::fit::log_log_fit;
use crate::sampling::{radial_shells, PhasePoint, SamplingConfig};
use crate::symbols::{factorial, multi_indices, PolySymbol, RationalSymbol, SymbolError, DEFAULT_TERM_CAP};
use crate::weights::{planck, sup_exponent, WeightError, WeightExpr};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalculusError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("certificate verdict is {0}, a parametrix needs a certified symbol")]
    NotCertified(Verdict),
    #[error("order estimate needs at least 4 shells (got {0})")]
    TooFewShells(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTerm {
    pub level: u32,
    pub symbol: RationalSymbol,
    /// `leading * gain^level`.
    pub expected_order: WeightExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSymbol {
    dim_n: usize,
    pub terms: Vec<AsymptoticTerm>,
    pub leading: WeightExpr,
    /// Weight gained per level (a Planck function).
    pub gain: WeightExpr,
    /// Order improvement per level along the worst ray.
    pub base_gain: Rational,
}

impl AsymptoticSymbol {
    fn new(dim_n: usize, symbols: Vec<RationalSymbol>, leading: WeightExpr, gain: WeightExpr, base_gain: Rational) -> Self {
        let terms = symbols
            .into_iter()
            .enumerate()
            .map(|(j, symbol)| AsymptoticTerm {
                level: j as u32,
                expected_order: leading.clone() * gain.pow(Rational::from_integer(j as i64)),
                symbol,
            })
            .collect();
        AsymptoticSymbol {
            dim_n,
            terms,
            leading,
            gain,
            base_gain,
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, j: usize) -> Option<&RationalSymbol> {
        self.terms.get(j).map(|t| &t.symbol)
    }

    /// `terms[0] + ... + terms[upto]` over a common denominator.
    pub fn partial_sum(&self, upto: usize) -> Result<RationalSymbol, CalculusError> {
        let mut acc = RationalSymbol::from_poly(PolySymbol::zero(self.dim_n));
        for t in self.terms.iter().take(upto + 1) {
            acc = acc.add(&t.symbol)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64], upto: usize) -> Result<Complex64, CalculusError> {
        let mut acc = Complex64::zero();
        for t in self.terms.iter().take(upto + 1) {
            acc += t.symbol.eval(x, xi)?;
        }
        Ok(acc)
    }
}

fn alpha_factorial(alpha: &[u32]) -> f64 {
    alpha.iter().map(|a| factorial(*a)).product()
}

/// `(-i)^k`
fn minus_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `sum_{|alpha| = level} (1/alpha!) d_xi^alpha p D_x^alpha q`.
fn composition_level(p: &RationalSymbol, q: &RationalSymbol, level: u32, cap: usize) -> Result<RationalSymbol, CalculusError> {
    let n = p.dim_n();
    let zero = alloc::vec![0u32; n];
    let mut acc = RationalSymbol::from_poly(PolySymbol::zero(n));
    for alpha in multi_indices(n, level) {
        if alpha.iter().sum::<u32>() != level {
            continue;
        }
        let dq = q.differentiate(&zero, &alpha);
        if dq.is_zero() {
            continue;
        }
        let dp = p.differentiate(&alpha, &zero);
        if dp.is_zero() {
            continue;
        }
        let term = dp
            .mul(&dq)?
            .scale(minus_i_pow(level))
            .div_scalar(alpha_factorial(&alpha));
        acc = acc.add(&term)?;
        acc.check_cap(cap)?;
    }
    Ok(acc)
}

/// Terms `|alpha| = 0..=n_max` of `p # q`. Orders are tagged in the Shubin
/// scale, `<z>^(deg p + deg q - 2j)` for level `j`.
pub fn compose_expansion(p: &RationalSymbol, q: &RationalSymbol, n_max: u32) -> Result<AsymptoticSymbol, CalculusError> {
    compose_expansion_capped(p, q, n_max, DEFAULT_TERM_CAP)
}

pub fn compose_expansion_capped(
    p: &RationalSymbol,
    q: &RationalSymbol,
    n_max: u32,
    cap: usize,
) -> Result<AsymptoticSymbol, CalculusError> {
    if p.dim_n() != q.dim_n() {
        return Err(SymbolError::PhaseSpaceMismatch(p.dim_n(), q.dim_n()).into());
    }
    let n = p.dim_n();
    let levels = (0..=n_max)
        .map(|l| composition_level(p, q, l, cap))
        .collect::<Result<Vec<_>, _>>()?;
    let lead = Rational::from_integer(p.degree() + q.degree());
    Ok(AsymptoticSymbol::new(
        n,
        levels,
        WeightExpr::z(n, lead),
        WeightExpr::z(n, Rational::from_integer(-2)),
        Rational::from_integer(2),
    ))
}

/// Leading weight `M0^-1`, per-level gain and its worst-ray order for the
/// certificate's setting.
fn certificate_geometry(n: usize, cert: &Certificate) -> Result<(WeightExpr, WeightExpr, Rational), CalculusError> {
    let one = Rational::from_integer(1);
    Ok(match &cert.params {
        CertificateParams::Shubin { m_prime, rho, .. } => (
            WeightExpr::z(n, -*m_prime),
            WeightExpr::z(n, -*rho * 2),
            *rho * 2,
        ),
        CertificateParams::Sg { m_prime, .. } => (
            WeightExpr::sg(n, -m_prime.0, -m_prime.1),
            WeightExpr::sg(n, -one, -one),
            one,
        ),
        CertificateParams::Lambda { implied_sg, .. } => (
            WeightExpr::sg(n, -implied_sg.0, -implied_sg.1),
            WeightExpr::sg(n, -one, -one),
            one,
        ),
        CertificateParams::General { m0, phi, psi, .. } => (
            m0.inv(),
            planck(phi, psi)?,
            sup_exponent(phi, psi)?.unwrap_or_else(Rational::zero),
        ),
    })
}

/// Left parametrix terms `q_0..=q_N` of a certified symbol, each guarded
/// by the certificate radius.
pub fn parametrix(p: &PolySymbol, cert: &Certificate, n_terms: u32) -> Result<AsymptoticSymbol, CalculusError> {
    parametrix_capped(p, cert, n_terms, DEFAULT_TERM_CAP)
}

pub fn parametrix_capped(
    p: &PolySymbol,
    cert: &Certificate,
    n_terms: u32,
    cap: usize,
) -> Result<AsymptoticSymbol, CalculusError> {
    if cert.verdict != Verdict::Certified {
        return Err(CalculusError::NotCertified(cert.verdict));
    }
    let n = p.dim_n();
    let zero = alloc::vec![0u32; n];
    let pr = RationalSymbol::from_poly(p.clone());
    let mut qs: Vec<RationalSymbol> = alloc::vec![RationalSymbol::reciprocal(p)?.with_guard_radius(cert.radius)];
    for j in 1..=n_terms {
        let mut acc = RationalSymbol::from_poly(PolySymbol::zero(n)).with_guard_radius(cert.radius);
        for (k, qk) in qs.iter().enumerate() {
            let l = j - k as u32;
            for alpha in multi_indices(n, l) {
                if alpha.iter().sum::<u32>() != l {
                    continue;
                }
                let dp = pr.differentiate(&zero, &alpha);
                if dp.is_zero() {
                    continue;
                }
                let dq = qk.differentiate(&alpha, &zero);
                if dq.is_zero() {
                    continue;
                }
                let term = dq
                    .mul(&dp)?
                    .scale(minus_i_pow(l))
                    .div_scalar(alpha_factorial(&alpha));
                acc = acc.add(&term)?;
                acc.check_cap(cap)?;
            }
        }
        let qj = acc.scale(Complex64::new(-1.0, 0.0)).div_base();
        let qj = if qj.is_zero() {
            RationalSymbol::from_poly(PolySymbol::zero(n)).with_guard_radius(cert.radius)
        } else {
            qj
        };
        qs.push(qj);
    }
    let (leading, gain, g) = certificate_geometry(n, cert)?;
    Ok(AsymptoticSymbol::new(n, qs, leading, gain, g))
}

/// Gradings `j = k + |alpha|` of `(q_0 + ... + q_N) # p`, indexed by `j`.
pub fn composition_gradings(q: &AsymptoticSymbol, p: &PolySymbol) -> Result<Vec<RationalSymbol>, CalculusError> {
    let n = p.dim_n();
    let pr = RationalSymbol::from_poly(p.clone());
    let dx = p.deg_x().unwrap_or(0);
    let top = q.len() as u32 + dx;
    let mut grades: Vec<RationalSymbol> = (0..top).map(|_| RationalSymbol::from_poly(PolySymbol::zero(n))).collect();
    for (k, t) in q.terms.iter().enumerate() {
        for l in 0..=dx {
            let lvl = composition_level(&t.symbol, &pr, l, usize::MAX)?;
            if !lvl.is_zero() {
                let g = k + l as usize;
                grades[g] = grades[g].add(&lvl)?;
            }
        }
    }
    Ok(grades)
}

/// `r_N = (q_0 + ... + q_N) # p - 1`, as the sum of gradings above `N`.
pub fn parametrix_remainder(q: &AsymptoticSymbol, p: &PolySymbol) -> Result<RationalSymbol, CalculusError> {
    let grades = composition_gradings(q, p)?;
    let n = p.dim_n();
    let mut acc = RationalSymbol::from_poly(PolySymbol::zero(n));
    for g in grades.iter().skip(q.len()) {
        acc = acc.add(g)?;
    }
    let guard = q.terms.first().map_or(0.0, |t| t.symbol.guard_radius());
    Ok(acc.with_guard_radius(guard))
}

/// Largest numerator coefficient left in gradings `0..=N` after subtracting
/// the identity from grading 0; zero when the recursion telescopes exactly.
pub fn telescoping_defect(q: &AsymptoticSymbol, p: &PolySymbol) -> Result<f64, CalculusError> {
    let grades = composition_gradings(q, p)?;
    let n = p.dim_n();
    let mut worst = 0.0f64;
    for (j, g) in grades.iter().take(q.len()).enumerate() {
        let g = if j == 0 {
            g.sub(&RationalSymbol::from_poly(PolySymbol::one(n)))?
        } else {
            g.clone()
        };
        worst = worst.max(g.num().max_abs_coeff());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub slope: f64,
    /// Half-width of the 95% band on the slope.
    pub half_width: f64,
    /// Slope divided by the decay order of the Planck function along the
    /// diagonal, when that order is nonzero.
    pub planck_units: Option<f64>,
    /// `(radius, max |r|)` per shell.
    pub shells: Vec<(f64, f64)>,
}

fn estimate_with(
    eval: &dyn Fn(&PhasePoint) -> Result<Complex64, CalculusError>,
    dim_n: usize,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<OrderEstimate, CalculusError> {
    let shells = radial_shells(cfg, dim_n);
    if shells.len() < 4 {
        return Err(CalculusError::TooFewShells(shells.len()));
    }
    let mut rows = Vec::with_capacity(shells.len());
    for shell in &shells {
        let mut best = 0.0f64;
        for pt in &shell.points {
            best = best.max(eval(pt)?.norm());
        }
        rows.push((shell.radius, best));
    }
    let (radii, vals): (Vec<f64>, Vec<f64>) = rows.iter().cloned().unzip();
    let fit = log_log_fit(&radii, &vals);
    let (slope, half_width) = match fit {
        Some(f) => (f.slope, f.half_width),
        // identically zero on every shell
        None => (f64::NEG_INFINITY, 0.0),
    };
    let h = planck(phi, psi)?;
    let diag = h.ray_orders().diag_ray;
    let planck_units = if diag.is_zero() {
        None
    } else {
        Some(slope / (-diag).to_f64().unwrap_or(1.0))
    };
    Ok(OrderEstimate {
        slope,
        half_width,
        planck_units,
        shells: rows,
    })
}

/// Fitted growth exponent of `max |r|` over the radial shells of `cfg`.
pub fn estimate_order(
    r: &RationalSymbol,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<OrderEstimate, CalculusError> {
    estimate_with(&|pt| Ok(r.eval(&pt.x, &pt.xi)?), r.dim_n(), phi, psi, cfg)
}

/// Same as [`estimate_order`] for the partial sum of terms `0..=upto`.
pub fn estimate_order_partial(
    a: &AsymptoticSymbol,
    upto: usize,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<OrderEstimate, CalculusError> {
    estimate_with(&|pt| a.eval(&pt.x, &pt.xi, upto), a.dim_n(), phi, psi, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify_elliptic;
    use crate::symbols::parse_symbol;

    fn sym(s: &str) -> PolySymbol {
        parse_symbol(s, Some(1)).unwrap()
    }

    fn rat(s: &str) -> RationalSymbol {
        RationalSymbol::from_poly(sym(s))
    }

    fn z1() -> WeightExpr {
        WeightExpr::z(1, Rational::from_integer(1))
    }

    fn shubin_cert(p: &PolySymbol) -> Certificate {
        let z = WeightExpr::z(p.dim_n(), Rational::from_integer(1));
        let m = WeightExpr::z(p.dim_n(), Rational::from_integer(2));
        certify_elliptic(p, &m, &z, &z, &SamplingConfig::for_dimension(p.dim_n())).unwrap()
    }

    #[test]
    fn composition_examples() {
        let c = compose_expansion(&rat("xi"), &rat("x"), 2).unwrap();
        assert_eq!(c.partial_sum(2).unwrap().num(), &sym("x*xi - (0+1i)"));
        let c = compose_expansion(&rat("x^2 + xi^3"), &rat("1"), 3).unwrap();
        assert_eq!(c.partial_sum(3).unwrap().num(), &sym("x^2 + xi^3"));
        let c = compose_expansion(&rat("x"), &rat("xi"), 2).unwrap();
        assert_eq!(c.partial_sum(2).unwrap().num(), &sym("x*xi"));
    }

    #[test]
    fn parametrix_first_terms() {
        let p = sym("1 + x^2 + xi^2");
        let q = parametrix(&p, &shubin_cert(&p), 2).unwrap();
        let q0 = q.term(0).unwrap();
        assert_eq!(q0.num(), &sym("1"));
        assert_eq!(q0.power(), 1);
        let q1 = q.term(1).unwrap();
        assert_eq!(q1.base(), &p);
        assert_eq!(q1.power(), 3);
        assert_eq!(q1.num(), &sym("(0-4i)*x*xi"));
        assert_eq!(telescoping_defect(&q, &p).unwrap(), 0.0);
        assert_eq!(q.base_gain, Rational::from_integer(2));
    }

    #[test]
    fn x_independent_symbol_has_exact_inverse() {
        let p = sym("1 + xi^2");
        let cfg = SamplingConfig::for_dimension(1);
        let xi = WeightExpr::xi(1, Rational::from_integer(1));
        let cert = certify_elliptic(&p, &WeightExpr::xi(1, Rational::from_integer(2)), &xi, &xi, &cfg).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let q = parametrix(&p, &cert, 3).unwrap();
        for j in 1..=3 {
            assert!(q.term(j).unwrap().is_zero());
        }
        assert!(parametrix_remainder(&q, &p).unwrap().is_zero());
    }

    #[test]
    fn refuses_uncertified() {
        let p = sym("xi^2");
        let cert = shubin_cert(&p);
        assert_eq!(cert.verdict, Verdict::Refuted);
        assert!(matches!(parametrix(&p, &cert, 1), Err(CalculusError::NotCertified(_))));
    }

    #[test]
    fn order_estimates() {
        let cfg = SamplingConfig::for_dimension(1);
        let r = RationalSymbol::reciprocal(&sym("1 + x^2 + xi^2")).unwrap();
        let e = estimate_order(&r, &z1(), &z1(), &cfg).unwrap();
        assert!((e.slope + 2.0).abs() < 0.05);
        assert!((e.planck_units.unwrap() + 1.0).abs() < 0.05);
        let e = estimate_order(&rat("1"), &z1(), &z1(), &cfg).unwrap();
        assert!(e.slope.abs() < 0.05);
        let few = SamplingConfig {
            j_min: 2,
            j_max: 4,
            ..cfg
        };
        assert_eq!(estimate_order(&rat("1"), &z1(), &z1(), &few), Err(CalculusError::TooFewShells(3)));
    }
}
