//! Exact sparse polynomial and rational symbols in the `2n` phase-space
//! variables `(x, xi)`.

mod parse;
mod poly;
mod rational;

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

pub use parse::{infer_dimension, parse_symbol};
pub use poly::{Monomial, PolySymbol};
pub use rational::RationalSymbol;

use crate::fit::log_log_fit;
use crate::sampling::{product_shells, radial_shells, PhasePoint, SamplingConfig, Shell};
use crate::weights::WeightExpr;

/// Default cap on numerator terms in rational-symbol recursions.
pub const DEFAULT_TERM_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolError {
    #[error("point has dimension ({x}, {xi}) but the symbol lives on R^{n} x R^{n}")]
    DimensionMismatch { n: usize, x: usize, xi: usize },
    #[error("symbols on different phase spaces (n = {0} vs n = {1})")]
    PhaseSpaceMismatch(usize, usize),
    #[error("the zero polynomial has no order")]
    ZeroPolynomial,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("denominator vanishes at the evaluation point")]
    VanishingDenominator,
    #[error("rational symbols over different denominators")]
    IncompatibleDenominators,
    #[error("expression swell: {terms} numerator terms exceed the cap of {cap}")]
    ExpressionSwell { terms: usize, cap: usize },
    #[error("cannot parse symbol: {0}")]
    Parse(String),
}

/// All multi-indices in `vars` variables with total degree `<= max_deg`,
/// ordered by degree.
pub fn multi_indices(vars: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let mut cur = alloc::vec![0u32; vars];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.to_vec());
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k;
        fill(out, cur, pos + 1, remaining - k);
    }
    cur[pos] = 0;
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}

/// Empirical constant for one `(alpha, beta)` seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEntry {
    /// Derivative order over `xi`.
    pub alpha: Vec<u32>,
    /// Derivative order over `x`.
    pub beta: Vec<u32>,
    /// `max |d p| / (M Psi^-|alpha| Phi^-|beta|)` over the sample set.
    pub constant: f64,
    pub argmax: Option<PhasePoint>,
    /// Log-log slope of the per-shell maxima over the outer shells.
    pub slope: f64,
    /// Per-shell maxima grow with slope above [`DIVERGENCE_SLOPE`].
    pub diverging: bool,
}

pub const DIVERGENCE_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormTable {
    pub entries: Vec<SeminormEntry>,
}

impl SeminormTable {
    pub fn get(&self, alpha: &[u32], beta: &[u32]) -> Option<&SeminormEntry> {
        self.entries
            .iter()
            .find(|e| e.alpha == alpha && e.beta == beta)
    }

    pub fn any_diverging(&self) -> bool {
        self.entries.iter().any(|e| e.diverging)
    }
}

/// Shells suited to the weight pair: radial shells when `Phi = Psi`,
/// otherwise the `|x|`/`|xi|` product grid.
pub fn shells_for(phi: &WeightExpr, psi: &WeightExpr, cfg: &SamplingConfig) -> Vec<Shell> {
    if phi == psi {
        radial_shells(cfg, phi.dim_n())
    } else {
        product_shells(cfg, phi.dim_n())
    }
}

/// Samples the symbol-class estimates
/// `|d_xi^alpha d_x^beta p| <~ M Psi^-|alpha| Phi^-|beta|` for every
/// derivative up to the total degree of `p`.
pub fn seminorm_estimate(
    p: &PolySymbol,
    m: &WeightExpr,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<SeminormTable, SymbolError> {
    let n = p.dim_n();
    for w in [m, phi, psi] {
        if w.dim_n() != n {
            return Err(SymbolError::PhaseSpaceMismatch(n, w.dim_n()));
        }
    }
    let cap = p.total_degree().unwrap_or(0);
    let shells = shells_for(phi, psi, cfg);
    let mut entries = Vec::new();
    for idx in multi_indices(2 * n, cap) {
        let (beta, alpha) = idx.split_at(n);
        let d = p.differentiate(alpha, beta);
        let (la, lb) = (alpha.iter().sum::<u32>(), beta.iter().sum::<u32>());
        let bound = m.clone()
            * psi.pow(crate::Rational::from_integer(-(la as i64)))
            * phi.pow(crate::Rational::from_integer(-(lb as i64)));
        let mut best = 0.0f64;
        let mut argmax = None;
        let mut radii = Vec::new();
        let mut maxima = Vec::new();
        for shell in &shells {
            let mut shell_max = 0.0f64;
            for pt in &shell.points {
                let (sx, sxi) = pt.sq_norms();
                let v = d.eval_unchecked(&pt.x, &pt.xi).norm() / bound.eval_sq_norms(sx, sxi);
                if v > shell_max {
                    shell_max = v;
                }
                if v > best {
                    best = v;
                    argmax = Some(pt.clone());
                }
            }
            radii.push(shell.radius);
            maxima.push(shell_max);
        }
        let start = if radii.len() >= 6 { radii.len() / 2 } else { 0 };
        let slope = log_log_fit(&radii[start..], &maxima[start..]).map_or(0.0, |f| f.slope);
        entries.push(SeminormEntry {
            alpha: alpha.to_vec(),
            beta: beta.to_vec(),
            constant: best,
            argmax,
            slope,
            diverging: slope > DIVERGENCE_SLOPE,
        });
    }
    Ok(SeminormTable { entries })
}

/// Convenience for complex constants.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn int(k: i64) -> Rational {
        Rational::from_integer(k)
    }

    fn sym(s: &str) -> PolySymbol {
        parse_symbol(s, Some(1)).unwrap()
    }

    #[test]
    fn differentiate_examples() {
        assert_eq!(sym("x*xi").differentiate(&[1], &[0]), sym("x"));
        assert_eq!(sym("x^2 + xi^2").differentiate(&[0], &[2]), sym("2"));
        assert!(sym("x^2").differentiate(&[0], &[3]).is_zero());
    }

    #[test]
    fn rational_derivative_matches_quotient_rule() {
        let p = sym("1 + x^2 + xi^2");
        let q = RationalSymbol::reciprocal(&p).unwrap();
        let dq = q.differentiate(&[1], &[0]);
        assert_eq!(dq.power(), 2);
        assert_eq!(dq.num(), &sym("-2*xi"));
        assert_eq!(dq.base(), &p);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(sym("x^2 + xi^2").eval(&[3.0], &[4.0]).unwrap(), c64(25.0, 0.0));
        assert_eq!(sym("1 + xi^4*(1 + x^2)").eval(&[1.0], &[1.0]).unwrap(), c64(3.0, 0.0));
        let q = RationalSymbol::reciprocal(&sym("1 + x^2 + xi^2")).unwrap();
        let v = q.eval(&[1.0], &[libm::sqrt(2.0)]).unwrap();
        assert!((v - c64(0.25, 0.0)).norm() < 1e-15);
        assert!(sym("x").eval(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn vanishing_denominator_is_an_error() {
        let q = RationalSymbol::reciprocal(&sym("x^2 + xi^2")).unwrap();
        assert_eq!(q.eval(&[0.0], &[0.0]), Err(SymbolError::VanishingDenominator));
        assert!(RationalSymbol::new(sym("1"), PolySymbol::zero(1), 1).is_err());
    }

    #[test]
    fn orders() {
        let p = parse_symbol("xi1^2 + x1^2 + xi2^2 + x2^2", None).unwrap();
        assert_eq!(p.shubin_order().unwrap(), 2);
        assert_eq!(sym("-xi^2 - 1").sg_order().unwrap(), (2, 0));
        assert_eq!(sym("xi^4*(1 + x^2) + 1").sg_order().unwrap(), (4, 2));
        assert_eq!(PolySymbol::zero(1).shubin_order(), Err(SymbolError::ZeroPolynomial));
        assert_eq!(PolySymbol::zero(1).sg_order(), Err(SymbolError::ZeroPolynomial));
    }

    #[test]
    fn parser_handles_complex_literals_and_display_roundtrip() {
        let p = sym("-xi1^2 - (0+1i)");
        assert_eq!(p.eval(&[0.0], &[2.0]).unwrap(), c64(-4.0, -1.0));
        let q = sym("3.5*x*xi - 2i*x^2 + (1-2i)");
        let back = parse_symbol(&alloc::format!("{}", q), Some(1)).unwrap();
        assert_eq!(q, back);
        assert!(parse_symbol("x3", Some(2)).is_err());
        assert!(parse_symbol("x +", Some(1)).is_err());
        assert!(parse_symbol("y", Some(1)).is_err());
        assert_eq!(infer_dimension("x2 + xi1").unwrap(), 2);
    }

    #[test]
    fn multi_index_enumeration() {
        let all = multi_indices(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], alloc::vec![0, 0]);
        assert!(all.iter().all(|m| m.iter().sum::<u32>() <= 2));
    }

    #[test]
    fn seminorm_examples() {
        let cfg = SamplingConfig::for_dimension(1);
        let z = WeightExpr::z(1, int(1));
        let t = seminorm_estimate(&sym("x^2 + xi^2"), &WeightExpr::z(1, int(2)), &z, &z, &cfg).unwrap();
        assert!(!t.any_diverging());
        assert!(t.get(&[0], &[0]).unwrap().constant <= 1.0);

        let t = seminorm_estimate(&sym("x^3"), &WeightExpr::z(1, int(2)), &z, &z, &cfg).unwrap();
        assert!(t.get(&[0], &[0]).unwrap().diverging);

        let (phi, psi) = (WeightExpr::x(1, int(1)), WeightExpr::xi(1, int(1)));
        let m = WeightExpr::sg(1, int(2), int(0));
        let t = seminorm_estimate(&sym("-xi^2 - 1"), &m, &phi, &psi, &cfg).unwrap();
        assert!(!t.any_diverging());
        assert!(t.entries.iter().all(|e| e.constant.is_finite() && e.constant <= 2.0));
    }
}
