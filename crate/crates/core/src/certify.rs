//! Sampled certificates for global ellipticity and hypoellipticity of
//! polynomial symbols.
//!
//! A certificate is operational evidence, not a proof: lower bounds and
//! derivative self-bounds are checked on deterministic shell samples (see
//! [`crate::sampling`]) beyond the radius `R = shell_base^j_min`. A
//! refutation always carries a witness point whose ratio is below
//! `ratio_floor`. Where the symbol has a (quasi-)homogeneous top part, a
//! Lipschitz-margin check on the unit cube surface is recorded as well.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::fit::log_log_fit;
use crate::sampling::{product_shells, radial_shells, PhasePoint, SamplingConfig, Shell};
use crate::symbols::{multi_indices, Monomial, PolySymbol};
use crate::weights::WeightExpr;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error("rho = {0} lies outside (0, 1]")]
    RhoOutOfRange(Rational),
    #[error("the zero symbol cannot be certified")]
    ZeroSymbol,
    #[error("order m' = {m_prime:?} is not admissible for class order m = {m:?}")]
    OrderMismatch {
        m: (Rational, Rational),
        m_prime: (Rational, Rational),
    },
    #[error("lambda-ellipticity is defined for n = 1 only (got n = {0})")]
    LambdaDimension(usize),
    #[error("lambda-ellipticity parameters invalid: {0}")]
    LambdaParameters(String),
    #[error("weights and symbol live on different phase spaces")]
    PhaseSpaceMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    GammaElliptic,
    GammaRhoHypo,
    SgElliptic,
    SgHypo,
    LambdaElliptic,
    GeneralHypo,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateKind::GammaElliptic => "gamma-elliptic",
            CertificateKind::GammaRhoHypo => "gamma-rho-hypoelliptic",
            CertificateKind::SgElliptic => "sg-elliptic",
            CertificateKind::SgHypo => "sg-hypoelliptic",
            CertificateKind::LambdaElliptic => "lambda-elliptic",
            CertificateKind::GeneralHypo => "general-hypoelliptic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateParams {
    Shubin {
        m: Rational,
        m_prime: Rational,
        rho: Rational,
    },
    Sg {
        m: (Rational, Rational),
        m_prime: (Rational, Rational),
    },
    Lambda {
        mu: u32,
        gamma: Rational,
        /// SG lower-bound exponents `(mu, gamma mu)` attached to a
        /// lambda-elliptic symbol.
        implied_sg: (Rational, Rational),
    },
    General {
        m: WeightExpr,
        m0: WeightExpr,
        phi: WeightExpr,
        psi: WeightExpr,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: PhasePoint,
    /// Ratio `|p| / lower-bound weight` at the point.
    pub ratio: f64,
    /// Exact vanishing locus of the symbol, when one exists.
    pub locus: Option<String>,
    /// `(alpha, beta)` when the witness breaks a derivative self-bound; the
    /// ratio is then `|p| Psi^-|alpha| Phi^-|beta| / |d_xi^alpha d_x^beta p|`.
    pub derivative: Option<(Vec<u32>, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivConstant {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    /// Largest sampled `|d p| * Psi^|alpha| Phi^|beta| / |p|`.
    pub constant: f64,
    pub argmax: Option<PhasePoint>,
    /// Log-log slope of the per-shell maxima.
    pub slope: f64,
}

/// Nonvanishing of a (quasi-)homogeneous top part on the surface of the unit
/// cube `max_k |w_k| = 1`, which meets every anisotropic dilation orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCheck {
    pub x_weight: u32,
    pub xi_weight: u32,
    pub degree: u32,
    pub grid_min: f64,
    pub lipschitz: f64,
    pub spacing: f64,
    /// `grid_min - lipschitz * spacing / 2`; positive means the top part has
    /// no zero on the cube surface.
    pub lower_bound: f64,
}

impl SphereCheck {
    pub fn nonvanishing(&self) -> bool {
        self.lower_bound > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub params: CertificateParams,
    pub radius: f64,
    /// Smallest sampled lower-bound ratio beyond `radius`.
    pub c_lower: f64,
    /// Log-log slope of the per-shell minima of the lower-bound ratio.
    pub lower_slope: f64,
    pub shell_minima: Vec<(f64, f64)>,
    pub deriv_constants: Vec<DerivConstant>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub sphere: Option<SphereCheck>,
    pub sampling: SamplingConfig,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// Inferred lower-bound order for Shubin certificates.
    pub fn m_prime(&self) -> Option<Rational> {
        match &self.params {
            CertificateParams::Shubin { m_prime, .. } => Some(*m_prime),
            _ => None,
        }
    }
}

/// How lower-bound ratios are computed at a point.
trait LowerWeight {
    fn eval(&self, pt: &PhasePoint) -> f64;
}

impl LowerWeight for WeightExpr {
    fn eval(&self, pt: &PhasePoint) -> f64 {
        let (sx, sxi) = pt.sq_norms();
        self.eval_sq_norms(sx, sxi)
    }
}

/// `1 + |xi^mu| + |x^(gamma mu) xi^mu|` for `n = 1`.
struct LambdaWeight {
    mu: i32,
    gmu: i32,
}

impl LowerWeight for LambdaWeight {
    fn eval(&self, pt: &PhasePoint) -> f64 {
        let x = pt.x[0].abs();
        let xi = libm::pow(pt.xi[0].abs(), self.mu as f64);
        1.0 + xi + libm::pow(x, self.gmu as f64) * xi
    }
}

struct ScanOutcome {
    c_lower: f64,
    lower_slope: f64,
    shell_minima: Vec<(f64, f64)>,
    argmin: Option<(PhasePoint, f64)>,
    deriv: Vec<DerivConstant>,
    deriv_bounded: bool,
}

/// `p / max|c|` and `max|c|`, so that scalar multiples of a symbol are
/// scanned identically.
fn normalized(p: &PolySymbol) -> (PolySymbol, f64) {
    let s = p.max_abs_coeff();
    if s == 0.0 {
        (p.clone(), 1.0)
    } else {
        (p.div_scalar(s), s)
    }
}

fn region_radius(pt: &PhasePoint) -> f64 {
    pt.x_norm() + pt.xi_norm()
}

/// Lower-bound ratio scan plus, optionally, derivative self-bound scan
/// `|d_xi^alpha d_x^beta p| <~ |p| Psi^-|alpha| Phi^-|beta|`.
fn scan(
    p: &PolySymbol,
    lower: &dyn LowerWeight,
    deriv_weights: Option<(&WeightExpr, &WeightExpr)>,
    shells: &[Shell],
    cfg: &SamplingConfig,
) -> ScanOutcome {
    let n = p.dim_n();
    let deg = p.total_degree().unwrap_or(0);
    let (p, scale) = &normalized(p);
    let derivs: Vec<(Vec<u32>, Vec<u32>, PolySymbol, WeightExpr)> = match deriv_weights {
        Some((phi, psi)) => multi_indices(2 * n, deg)
            .into_iter()
            .filter(|g| g.iter().sum::<u32>() > 0)
            .map(|g| {
                let (beta, alpha) = g.split_at(n);
                let la: i64 = alpha.iter().map(|v| *v as i64).sum();
                let lb: i64 = beta.iter().map(|v| *v as i64).sum();
                let w = psi.pow(Rational::from_integer(la)) * phi.pow(Rational::from_integer(lb));
                (alpha.to_vec(), beta.to_vec(), p.differentiate(alpha, beta), w)
            })
            .collect(),
        None => Vec::new(),
    };

    let r_min = cfg.radius();
    let mut c_lower = f64::INFINITY;
    let mut argmin: Option<(PhasePoint, f64)> = None;
    let mut shell_minima = Vec::new();
    let mut deriv_max = alloc::vec![0.0f64; derivs.len()];
    let mut deriv_arg: Vec<Option<PhasePoint>> = alloc::vec![None; derivs.len()];
    let mut deriv_shell_max: Vec<Vec<f64>> = alloc::vec![Vec::new(); derivs.len()];
    let mut radii = Vec::new();

    for shell in shells {
        let mut smin = f64::INFINITY;
        let mut dmax = alloc::vec![0.0f64; derivs.len()];
        let mut any = false;
        for pt in &shell.points {
            if region_radius(pt) < r_min && pt.norm() < r_min {
                continue;
            }
            any = true;
            let pv = p.eval_unchecked(&pt.x, &pt.xi).norm();
            let ratio = pv * scale / lower.eval(pt);
            if ratio < smin {
                smin = ratio;
            }
            if ratio < c_lower {
                c_lower = ratio;
                argmin = Some((pt.clone(), ratio));
            }
            if pv > 0.0 {
                let (sx, sxi) = pt.sq_norms();
                for (k, (_, _, d, w)) in derivs.iter().enumerate() {
                    let v = d.eval_unchecked(&pt.x, &pt.xi).norm() * w.eval_sq_norms(sx, sxi) / pv;
                    if v > dmax[k] {
                        dmax[k] = v;
                    }
                    if v > deriv_max[k] {
                        deriv_max[k] = v;
                        deriv_arg[k] = Some(pt.clone());
                    }
                }
            }
        }
        if !any {
            continue;
        }
        radii.push(shell.radius);
        shell_minima.push((shell.radius, smin));
        for k in 0..derivs.len() {
            deriv_shell_max[k].push(dmax[k]);
        }
    }

    let mins: Vec<f64> = shell_minima.iter().map(|s| s.1).collect();
    let lower_slope = tail_slope(&radii, &mins);
    let growth_cap = cfg.growth_slope;
    let mut deriv_bounded = true;
    let deriv = derivs
        .iter()
        .enumerate()
        .map(|(k, (alpha, beta, _, _))| {
            let slope = tail_slope(&radii, &deriv_shell_max[k]);
            if slope > growth_cap || !deriv_max[k].is_finite() {
                deriv_bounded = false;
            }
            DerivConstant {
                alpha: alpha.clone(),
                beta: beta.clone(),
                constant: deriv_max[k],
                argmax: deriv_arg[k].clone(),
                slope,
            }
        })
        .collect();

    ScanOutcome {
        c_lower,
        lower_slope,
        shell_minima,
        argmin,
        deriv,
        deriv_bounded,
    }
}

/// Log-log slope over the outer half of the shells, so that ratios settling
/// onto a positive limit do not read as a trend.
fn tail_slope(radii: &[f64], values: &[f64]) -> f64 {
    let start = radii.len() / 2;
    let start = if radii.len() - start < 3 { 0 } else { start };
    log_log_fit(&radii[start..], &values[start..]).map_or(0.0, |f| f.slope)
}

/// Golden-section minimisation of `f` on `[lo, hi]`.
fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coordinate-wise golden-section descent on the lower-bound ratio, staying
/// in the region `|x| + |xi| >= R`.
fn refine_witness(
    p: &PolySymbol,
    lower: &dyn LowerWeight,
    start: PhasePoint,
    start_ratio: f64,
    r_min: f64,
) -> (PhasePoint, f64) {
    let n = p.dim_n();
    let (p, scale) = &normalized(p);
    let ratio = |pt: &PhasePoint| -> f64 {
        if region_radius(pt) < r_min {
            return f64::INFINITY;
        }
        p.eval_unchecked(&pt.x, &pt.xi).norm() * scale / lower.eval(pt)
    };
    let mut best = start;
    let mut best_ratio = start_ratio;
    for sweep in 0..6 {
        for k in 0..2 * n {
            if best_ratio == 0.0 {
                return (best, best_ratio);
            }
            let get = |pt: &PhasePoint| if k < n { pt.x[k] } else { pt.xi[k - n] };
            let c = get(&best);
            let delta = 0.5 * c.abs().max(1.0) * libm::pow(0.5, sweep as f64);
            let base = best.clone();
            let f = |t: f64| {
                let mut q = base.clone();
                if k < n {
                    q.x[k] = t;
                } else {
                    q.xi[k - n] = t;
                }
                ratio(&q)
            };
            let (t, v) = golden_min(&f, c - delta, c + delta, 80);
            if v < best_ratio {
                best_ratio = v;
                if k < n {
                    best.x[k] = t;
                } else {
                    best.xi[k - n] = t;
                }
            }
        }
    }
    (best, best_ratio)
}

/// Exact vanishing loci of `p` on the coordinate subspaces.
pub fn vanishing_locus(p: &PolySymbol) -> Option<String> {
    let restrict = |keep_x: bool| -> bool {
        // sum of the terms that survive restriction to {xi = 0} (or {x = 0})
        let mut rest = PolySymbol::zero(p.dim_n());
        for (m, c) in p.terms() {
            let dead = if keep_x { m.deg_xi() > 0 } else { m.deg_x() > 0 };
            if !dead {
                rest.add_term(m.clone(), *c);
            }
        }
        rest.is_zero()
    };
    if restrict(true) {
        Some(String::from("xi = 0"))
    } else if restrict(false) {
        Some(String::from("x = 0"))
    } else {
        None
    }
}

/// Checks that the quasi-homogeneous top part of `p` (weights `wx` on `x`,
/// `wxi` on `xi`) has no zero on the cube surface, with a Lipschitz margin.
pub fn sphere_check(p: &PolySymbol, wx: u32, wxi: u32, points_per_edge: usize) -> Option<SphereCheck> {
    let (top, degree) = p.quasi_top_part(wx, wxi)?;
    if degree == 0 {
        return None;
    }
    let n = p.dim_n();
    let d = 2 * n;
    let g = points_per_edge.max(2);
    let spacing = 2.0 / g as f64;
    let centers: Vec<f64> = (0..g).map(|i| -1.0 + (i as f64 + 0.5) * spacing).collect();
    let mut grid_min = f64::INFINITY;
    let mut w = alloc::vec![0.0; d];
    let free = d - 1;
    let total = g.pow(free as u32);
    for face in 0..d {
        for sign in [1.0, -1.0] {
            for idx in 0..total {
                let mut rem = idx;
                for (k, wk) in w.iter_mut().enumerate() {
                    if k == face {
                        *wk = sign;
                    } else {
                        *wk = centers[rem % g];
                        rem /= g;
                    }
                }
                let v = top.eval_unchecked(&w[..n], &w[n..]).norm();
                if v < grid_min {
                    grid_min = v;
                }
            }
        }
    }
    let lipschitz = top.cube_lipschitz();
    Some(SphereCheck {
        x_weight: wx,
        xi_weight: wxi,
        degree,
        grid_min,
        lipschitz,
        spacing,
        lower_bound: grid_min - lipschitz * spacing / 2.0,
    })
}

/// Weights `(w_x, w_xi)` making `p` quasi-homogeneous at top order, e.g.
/// `(1, k)` for `|xi|^2 + |x|^(2k)`: the ratio of the top `x`- and
/// `xi`-degrees, when it is an integer in either direction.
pub fn natural_quasi_weights(p: &PolySymbol) -> Option<(u32, u32)> {
    let (dx, dxi) = (p.deg_x()?, p.deg_xi()?);
    if dx == 0 || dxi == 0 {
        None
    } else if dx % dxi == 0 {
        Some((1, dx / dxi))
    } else if dxi % dx == 0 {
        Some((dxi / dx, 1))
    } else {
        None
    }
}

fn default_cube_resolution(dim_n: usize) -> usize {
    match dim_n {
        1 => 4096,
        2 => 24,
        _ => 6,
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    p: &PolySymbol,
    kind: CertificateKind,
    params: CertificateParams,
    lower: &dyn LowerWeight,
    outcome: ScanOutcome,
    sphere: Option<SphereCheck>,
    cfg: &SamplingConfig,
    mut notes: Vec<String>,
) -> Certificate {
    let r_min = cfg.radius();
    let mut witness = None;
    let mut c_lower = outcome.c_lower;
    let verdict = match outcome.argmin.clone() {
        None => {
            notes.push(String::from("no sample points beyond R"));
            Verdict::Inconclusive
        }
        Some((pt, ratio)) => {
            let (pt, ratio) = if ratio < cfg.ratio_floor {
                (pt, ratio)
            } else {
                refine_witness(p, lower, pt, ratio, r_min)
            };
            if ratio < cfg.ratio_floor {
                c_lower = c_lower.min(ratio);
                witness = Some(Witness {
                    point: pt,
                    ratio,
                    locus: vanishing_locus(p),
                    derivative: None,
                });
                Verdict::Refuted
            } else if outcome.lower_slope < cfg.trend_slope {
                notes.push(alloc::format!(
                    "lower-bound ratio decreases (slope {:.4} < {})",
                    outcome.lower_slope,
                    cfg.trend_slope
                ));
                Verdict::Inconclusive
            } else if !outcome.deriv_bounded {
                let growth_cap = cfg.growth_slope;
                let worst = outcome
                    .deriv
                    .iter()
                    .filter(|d| d.slope > growth_cap && d.argmax.is_some())
                    .max_by(|a, b| a.constant.total_cmp(&b.constant));
                match worst {
                    Some(d) if 1.0 / d.constant < cfg.ratio_floor => {
                        notes.push(alloc::format!(
                            "derivative self-bound (alpha {:?}, beta {:?}) grows with slope {:.3}",
                            d.alpha,
                            d.beta,
                            d.slope
                        ));
                        witness = Some(Witness {
                            point: d.argmax.clone().unwrap_or(pt),
                            ratio: 1.0 / d.constant,
                            locus: None,
                            derivative: Some((d.alpha.clone(), d.beta.clone())),
                        });
                        Verdict::Refuted
                    }
                    _ => {
                        notes.push(String::from("a derivative self-bound grows across shells"));
                        Verdict::Inconclusive
                    }
                }
            } else {
                Verdict::Certified
            }
        }
    };
    if let Some(s) = &sphere {
        if !s.nonvanishing() {
            notes.push(String::from(
                "quasi-homogeneous top part is not shown to be nonzero on the cube surface",
            ));
        }
    }
    Certificate {
        kind,
        params,
        radius: r_min,
        c_lower,
        lower_slope: outcome.lower_slope,
        shell_minima: outcome.shell_minima,
        deriv_constants: outcome.deriv,
        verdict,
        witness,
        sphere,
        sampling: cfg.clone(),
        notes,
    }
}

fn one() -> Rational {
    Rational::from_integer(1)
}

/// Global ellipticity `|p| >~ M` for `|x| + |xi| >= R`. Radial shells are
/// used when `Phi = Psi`, the SG product grid otherwise.
pub fn certify_elliptic(
    p: &PolySymbol,
    m: &WeightExpr,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<Certificate, CertifyError> {
    if p.is_zero() {
        return Err(CertifyError::ZeroSymbol);
    }
    let n = p.dim_n();
    if [m, phi, psi].iter().any(|w| w.dim_n() != n) {
        return Err(CertifyError::PhaseSpaceMismatch);
    }
    let z = WeightExpr::z(n, one());
    let (xw, xiw) = (WeightExpr::x(n, one()), WeightExpr::xi(n, one()));
    let (ma, mb, mc) = m.exponents();
    let shubin = *phi == z && *psi == z && ma.is_zero() && mb.is_zero();
    let sg = *phi == xw && *psi == xiw && mc.is_zero();
    let (kind, params) = if shubin {
        (
            CertificateKind::GammaElliptic,
            CertificateParams::Shubin {
                m: mc,
                m_prime: mc,
                rho: Rational::from_integer(1),
            },
        )
    } else if sg {
        (
            CertificateKind::SgElliptic,
            CertificateParams::Sg {
                m: (mb, ma),
                m_prime: (mb, ma),
            },
        )
    } else {
        (
            CertificateKind::GeneralHypo,
            CertificateParams::General {
                m: m.clone(),
                m0: m.clone(),
                phi: phi.clone(),
                psi: psi.clone(),
            },
        )
    };
    let shells = if phi == psi {
        radial_shells(cfg, n)
    } else {
        product_shells(cfg, n)
    };
    let outcome = scan(p, m, None, &shells, cfg);

    // membership p in S(M; Phi, Psi)
    let table = crate::symbols::seminorm_estimate(p, m, phi, psi, cfg)
        .map_err(|_| CertifyError::PhaseSpaceMismatch)?;
    let not_in_class = table.any_diverging();
    let deriv: Vec<DerivConstant> = table
        .entries
        .iter()
        .map(|e| DerivConstant {
            alpha: e.alpha.clone(),
            beta: e.beta.clone(),
            constant: e.constant,
            argmax: e.argmax.clone(),
            slope: e.slope,
        })
        .collect();
    let outcome = ScanOutcome { deriv, deriv_bounded: true, ..outcome };

    let sphere = if shubin && mc.is_integer() && Some(mc.to_integer() as u32) == p.total_degree() && mc > Rational::zero() {
        sphere_check(p, 1, 1, default_cube_resolution(n))
    } else {
        None
    };
    let mut cert = assemble(p, kind, params, m, outcome, sphere, cfg, Vec::new());
    if not_in_class {
        cert.notes.push(alloc::format!("symbol is not in S({}; {}, {})", m, phi, psi));
        if cert.verdict == Verdict::Certified {
            cert.verdict = Verdict::Inconclusive;
        }
    }
    Ok(cert)
}

/// Gamma_rho-hypoellipticity of a polynomial symbol of Shubin order `m`:
/// `|d^gamma p| <~ |p| <z>^(-rho |gamma|)` for all `gamma`, and the lower
/// bound `|p| >~ <z>^(rho m)`, which gives `m' = rho m`.
pub fn certify_gamma_rho_hypo(
    p: &PolySymbol,
    m: Rational,
    rho: Rational,
    cfg: &SamplingConfig,
) -> Result<Certificate, CertifyError> {
    if rho <= Rational::zero() || rho > Rational::from_integer(1) {
        return Err(CertifyError::RhoOutOfRange(rho));
    }
    if p.is_zero() {
        return Err(CertifyError::ZeroSymbol);
    }
    let n = p.dim_n();
    let m_prime = rho * m;
    let lower = WeightExpr::z(n, m_prime);
    let gain = WeightExpr::z(n, rho);
    let shells = radial_shells(cfg, n);
    let outcome = scan(p, &lower, Some((&gain, &gain)), &shells, cfg);
    let sphere = natural_quasi_weights(p).and_then(|(wx, wxi)| sphere_check(p, wx, wxi, default_cube_resolution(n)));
    Ok(assemble(
        p,
        CertificateKind::GammaRhoHypo,
        CertificateParams::Shubin { m, m_prime, rho },
        &lower,
        outcome,
        sphere,
        cfg,
        Vec::new(),
    ))
}

/// Default class order used when a Gamma_rho check is run without an
/// explicit `m`: the smallest degree among the maximal monomials of `p`,
/// each of which has a nonzero constant derivative of that order.
pub fn default_gamma_order(p: &PolySymbol) -> Option<u32> {
    p.maximal_monomials().iter().map(Monomial::degree).min()
}

fn sg_order_ok(m: Rational, mp: Rational) -> bool {
    if m >= Rational::zero() {
        mp <= m
    } else {
        mp >= m
    }
}

/// SG-hypoellipticity: `|p| >~ <xi>^m1' <x>^m2'` and
/// `|d_xi^alpha d_x^beta p| <~ |p| <xi>^-|alpha| <x>^-|beta|` off a compact set.
pub fn certify_sg_hypo(
    p: &PolySymbol,
    m: (Rational, Rational),
    m_prime: (Rational, Rational),
    cfg: &SamplingConfig,
) -> Result<Certificate, CertifyError> {
    if !(sg_order_ok(m.0, m_prime.0) && sg_order_ok(m.1, m_prime.1)) {
        return Err(CertifyError::OrderMismatch { m, m_prime });
    }
    if p.is_zero() {
        return Err(CertifyError::ZeroSymbol);
    }
    let n = p.dim_n();
    let lower = WeightExpr::sg(n, m_prime.0, m_prime.1);
    let (phi, psi) = (WeightExpr::x(n, one()), WeightExpr::xi(n, one()));
    let shells = product_shells(cfg, n);
    let outcome = scan(p, &lower, Some((&phi, &psi)), &shells, cfg);
    Ok(assemble(
        p,
        CertificateKind::SgHypo,
        CertificateParams::Sg { m, m_prime },
        &lower,
        outcome,
        None,
        cfg,
        Vec::new(),
    ))
}

/// General hypoellipticity `p in Hypo(M, M0; Phi, Psi)`.
pub fn certify_general_hypo(
    p: &PolySymbol,
    m: &WeightExpr,
    m0: &WeightExpr,
    phi: &WeightExpr,
    psi: &WeightExpr,
    cfg: &SamplingConfig,
) -> Result<Certificate, CertifyError> {
    if p.is_zero() {
        return Err(CertifyError::ZeroSymbol);
    }
    let n = p.dim_n();
    if [m, m0, phi, psi].iter().any(|w| w.dim_n() != n) {
        return Err(CertifyError::PhaseSpaceMismatch);
    }
    let shells = if phi == psi {
        radial_shells(cfg, n)
    } else {
        product_shells(cfg, n)
    };
    let outcome = scan(p, m0, Some((phi, psi)), &shells, cfg);
    let mut notes = Vec::new();
    if !m0.compare(m).map(|c| c.is_le()).unwrap_or(false) {
        notes.push(alloc::format!("M0 = {} is not dominated by M = {}", m0, m));
    }
    Ok(assemble(
        p,
        CertificateKind::GeneralHypo,
        CertificateParams::General {
            m: m.clone(),
            m0: m0.clone(),
            phi: phi.clone(),
            psi: psi.clone(),
        },
        m0,
        outcome,
        None,
        cfg,
        notes,
    ))
}

/// Lambda-ellipticity in one variable:
/// `|p| >= c (1 + |xi^mu| + |x^(gamma mu) xi^mu|)` off a compact set.
pub fn certify_lambda_elliptic(
    p: &PolySymbol,
    mu: u32,
    gamma: Rational,
    cfg: &SamplingConfig,
) -> Result<Certificate, CertifyError> {
    if p.dim_n() != 1 {
        return Err(CertifyError::LambdaDimension(p.dim_n()));
    }
    if p.is_zero() {
        return Err(CertifyError::ZeroSymbol);
    }
    if mu == 0 {
        return Err(CertifyError::LambdaParameters(String::from("mu must be positive")));
    }
    if gamma <= Rational::zero() || gamma >= Rational::from_integer(1) {
        return Err(CertifyError::LambdaParameters(alloc::format!("gamma = {} not in (0, 1)", gamma)));
    }
    let gmu = gamma * Rational::from_integer(mu as i64);
    if !gmu.is_integer() {
        return Err(CertifyError::LambdaParameters(alloc::format!(
            "gamma * mu = {} is not an integer",
            gmu
        )));
    }
    let gmu_i = gmu.to_integer();
    if p.deg_xi().unwrap_or(0) > mu || p.deg_x().unwrap_or(0) as i64 > gmu_i {
        return Err(CertifyError::LambdaParameters(alloc::format!(
            "symbol degrees (xi: {}, x: {}) exceed (mu, gamma mu) = ({}, {})",
            p.deg_xi().unwrap_or(0),
            p.deg_x().unwrap_or(0),
            mu,
            gmu_i
        )));
    }
    let lower = LambdaWeight {
        mu: mu as i32,
        gmu: gmu_i.to_i32().unwrap_or(0),
    };
    let shells = product_shells(cfg, 1);
    let outcome = scan(p, &lower, None, &shells, cfg);
    Ok(assemble(
        p,
        CertificateKind::LambdaElliptic,
        CertificateParams::Lambda {
            mu,
            gamma,
            implied_sg: (Rational::from_integer(mu as i64), gmu),
        },
        &lower,
        outcome,
        None,
        cfg,
        Vec::new(),
    ))
}
