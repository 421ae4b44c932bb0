//! Sobolev-order bootstrap for perturbed hypoelliptic operators.
//!
//! If `P` loses `M/M0` derivatives and the perturbation `A` has order `Mt`
//! with `M0/Mt >~ h^-eps`, then `(P + A)u in H(M)` and `u in H(M_u)` give
//! `u in H(min(M M0, M_u M0/Mt))`; iterating reaches `H(M M0)` after finitely
//! many rounds. Orders are tracked exactly as rational tuples.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::weights::{epsilon_gain, planck, sup_exponent, WeightError, WeightExpr};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BootstrapError {
    #[error("order tuples of different modes ({0} vs {1})")]
    ModeMismatch(OrderMode, OrderMode),
    #[error("eps-condition fails: m0 - mt = {gap} is not positive in every component")]
    EpsilonCondition { gap: String },
    #[error("Phi Psi has no positive growth exponent (no strong uncertainty principle)")]
    NoUncertainty,
    #[error("inadmissible perturbation: no eps > 0 with M0 / Mt >~ h^-eps")]
    Inadmissible,
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderMode {
    Shubin,
    Sg,
    /// Ray orders `(x, xi, diagonal)` of a general weight.
    General,
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderMode::Shubin => "shubin",
            OrderMode::Sg => "sg",
            OrderMode::General => "general",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderTuple {
    mode: OrderMode,
    comps: Vec<Rational>,
}

impl OrderTuple {
    pub fn shubin(m: Rational) -> Self {
        OrderTuple {
            mode: OrderMode::Shubin,
            comps: alloc::vec![m],
        }
    }

    /// `(m1, m2)` for the weight `<xi>^m1 <x>^m2`.
    pub fn sg(m1: Rational, m2: Rational) -> Self {
        OrderTuple {
            mode: OrderMode::Sg,
            comps: alloc::vec![m1, m2],
        }
    }

    pub fn general(w: &WeightExpr) -> Self {
        OrderTuple {
            mode: OrderMode::General,
            comps: w.ray_orders().as_array().to_vec(),
        }
    }

    pub fn mode(&self) -> OrderMode {
        self.mode
    }

    pub fn components(&self) -> &[Rational] {
        &self.comps
    }

    fn check(&self, other: &OrderTuple) -> Result<(), BootstrapError> {
        if self.mode != other.mode {
            Err(BootstrapError::ModeMismatch(self.mode, other.mode))
        } else {
            Ok(())
        }
    }

    fn zip(&self, other: &OrderTuple, f: impl Fn(Rational, Rational) -> Rational) -> OrderTuple {
        OrderTuple {
            mode: self.mode,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &OrderTuple) -> Result<OrderTuple, BootstrapError> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &OrderTuple) -> Result<OrderTuple, BootstrapError> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &OrderTuple) -> Result<OrderTuple, BootstrapError> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a.min(b)))
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &OrderTuple) -> bool {
        self.mode == other.mode && self.comps.iter().zip(&other.comps).all(|(a, b)| a >= b)
    }

    pub fn all_positive(&self) -> bool {
        self.comps.iter().all(|c| *c > Rational::zero())
    }

    /// The weight with these orders; `None` in general mode.
    pub fn to_weight(&self, dim_n: usize) -> Option<WeightExpr> {
        match self.mode {
            OrderMode::Shubin => Some(WeightExpr::z(dim_n, self.comps[0])),
            OrderMode::Sg => Some(WeightExpr::sg(dim_n, self.comps[0], self.comps[1])),
            OrderMode::General => None,
        }
    }

    /// Sobolev-space label, e.g. `H^2_Gamma` or `H^(1,-1)`.
    pub fn space_label(&self) -> String {
        match self.mode {
            OrderMode::Shubin => alloc::format!("H^{}_Gamma", self.comps[0]),
            OrderMode::Sg => alloc::format!("H^({},{})", self.comps[0], self.comps[1]),
            OrderMode::General => alloc::format!("H[rays {}]", self),
        }
    }
}

impl fmt::Display for OrderTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.len() == 1 {
            return write!(f, "{}", self.comps[0]);
        }
        f.write_str("(")?;
        for (k, c) in self.comps.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapTrace {
    /// `r_0 = m_u, r_1, ..., r_N`.
    pub chain: Vec<OrderTuple>,
    pub steps: usize,
    pub epsilon: Option<Rational>,
    pub terminated: bool,
    pub target: OrderTuple,
}

fn canonical_epsilon(gap: &OrderTuple) -> Option<Rational> {
    let h_rays = match gap.mode {
        OrderMode::Shubin => [Rational::from_integer(-2); 3],
        OrderMode::Sg => [
            Rational::from_integer(-1),
            Rational::from_integer(-1),
            Rational::from_integer(-2),
        ],
        OrderMode::General => return None,
    };
    let g = &gap.comps;
    let rays = match gap.mode {
        OrderMode::Shubin => [g[0]; 3],
        // <xi>^g1 <x>^g2 along the x-ray, xi-ray and diagonal
        _ => [g[1], g[0], g[0] + g[1]],
    };
    rays.iter()
        .zip(h_rays.iter())
        .map(|(r, h)| *r / -*h)
        .min()
        .filter(|e| *e > Rational::zero())
}

/// Iterates `r_{k+1} = min(m + m0, r_k + (m0 - mt))` from `r_0 = m_u`.
pub fn bootstrap_trace(
    m_u: &OrderTuple,
    m: &OrderTuple,
    m0: &OrderTuple,
    mt: &OrderTuple,
) -> Result<BootstrapTrace, BootstrapError> {
    let gap = m0.sub(mt)?;
    let target = m.add(m0)?;
    m_u.check(&target)?;
    if !gap.all_positive() {
        return Err(BootstrapError::EpsilonCondition {
            gap: alloc::format!("{}", gap),
        });
    }
    let mut chain = alloc::vec![m_u.clone()];
    let bound = min_steps(m_u, m, m0, mt)?;
    while !chain.last().is_some_and(|r| r.dominates(&target)) && chain.len() <= bound + 1 {
        let next = chain.last().map(|r| r.add(&gap)).transpose()?.map(|r| r.min(&target)).transpose()?;
        chain.extend(next);
    }
    let terminated = chain.last().is_some_and(|r| r.dominates(&target));
    Ok(BootstrapTrace {
        steps: chain.len() - 1,
        chain,
        epsilon: canonical_epsilon(&gap),
        terminated,
        target,
    })
}

/// Closed form `max(0, ceil(max_c (m + m0 - m_u)_c / (m0 - mt)_c))`.
pub fn min_steps(
    m_u: &OrderTuple,
    m: &OrderTuple,
    m0: &OrderTuple,
    mt: &OrderTuple,
) -> Result<usize, BootstrapError> {
    let gap = m0.sub(mt)?;
    let target = m.add(m0)?;
    m_u.check(&target)?;
    if !gap.all_positive() {
        return Err(BootstrapError::EpsilonCondition {
            gap: alloc::format!("{}", gap),
        });
    }
    let need = target.sub(m_u)?;
    let steps = need
        .comps
        .iter()
        .zip(&gap.comps)
        .map(|(d, g)| (*d / *g).ceil().to_integer())
        .max()
        .unwrap_or(0);
    Ok(steps.max(0) as usize)
}

/// The `eps` with `M0 / Mt >~ h^-eps` for the Planck function of `(Phi, Psi)`,
/// provided `Phi Psi` grows like a positive power of `1 + |x| + |xi|`.
pub fn check_perturbation_admissible(
    m0: &WeightExpr,
    mt: &WeightExpr,
    phi: &WeightExpr,
    psi: &WeightExpr,
) -> Result<Rational, BootstrapError> {
    if sup_exponent(phi, psi)?.is_none() {
        return Err(BootstrapError::NoUncertainty);
    }
    let h = planck(phi, psi)?;
    epsilon_gain(m0, mt, &h)?.ok_or(BootstrapError::Inadmissible)
}
