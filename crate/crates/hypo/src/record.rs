//! JSON records for certificates and one-line summaries for the terminal.

use hypo_core::certify::{Certificate, CertificateParams, Verdict, Witness};
use hypo_core::sampling::PhasePoint;
use hypo_core::symbols::PolySymbol;
use hypo_core::Rational;
use serde_json::{json, Value};

fn rat(r: &Rational) -> String {
    format!("{}", r)
}

fn point(p: &PhasePoint) -> Value {
    json!({ "x": p.x, "xi": p.xi })
}

fn params(p: &CertificateParams) -> Value {
    match p {
        CertificateParams::Shubin { m, m_prime, rho } => json!({
            "setting": "shubin", "m": rat(m), "m_prime": rat(m_prime), "rho": rat(rho),
        }),
        CertificateParams::Sg { m, m_prime } => json!({
            "setting": "sg",
            "m": [rat(&m.0), rat(&m.1)],
            "m_prime": [rat(&m_prime.0), rat(&m_prime.1)],
        }),
        CertificateParams::Lambda { mu, gamma, implied_sg } => json!({
            "setting": "lambda",
            "mu": mu,
            "gamma": rat(gamma),
            "implied_sg": [rat(&implied_sg.0), rat(&implied_sg.1)],
        }),
        CertificateParams::General { m, m0, phi, psi } => json!({
            "setting": "general",
            "m": m.to_string(), "m0": m0.to_string(), "phi": phi.to_string(), "psi": psi.to_string(),
        }),
    }
}

fn witness(w: &Witness) -> Value {
    json!({
        "point": point(&w.point),
        "ratio": w.ratio,
        "locus": w.locus,
        "derivative": w.derivative.as_ref().map(|(a, b)| json!({ "alpha": a, "beta": b })),
    })
}

pub fn certificate(symbol: &PolySymbol, c: &Certificate) -> Value {
    json!({
        "symbol": symbol.to_string(),
        "kind": c.kind.to_string(),
        "verdict": c.verdict.to_string(),
        "params": params(&c.params),
        "radius": c.radius,
        "c_lower": c.c_lower,
        "lower_slope": c.lower_slope,
        "shell_minima": c.shell_minima.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
        "derivative_constants": c.deriv_constants.iter().map(|d| json!({
            "alpha": d.alpha, "beta": d.beta, "constant": d.constant, "slope": d.slope,
        })).collect::<Vec<_>>(),
        "witness": c.witness.as_ref().map(witness),
        "sphere_check": c.sphere.as_ref().map(|s| json!({
            "x_weight": s.x_weight, "xi_weight": s.xi_weight, "degree": s.degree,
            "grid_min": s.grid_min, "lipschitz": s.lipschitz, "spacing": s.spacing,
            "lower_bound": s.lower_bound, "nonvanishing": s.nonvanishing(),
        })),
        "sampling": {
            "seed": c.sampling.seed, "shell_base": c.sampling.shell_base,
            "j_min": c.sampling.j_min, "j_max": c.sampling.j_max,
            "dirs_per_shell": c.sampling.dirs_per_shell, "ratio_floor": c.sampling.ratio_floor,
            "trend_slope": c.sampling.trend_slope, "growth_slope": c.sampling.growth_slope,
        },
        "notes": c.notes,
    })
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Certified => 0,
        Verdict::Refuted => 2,
        Verdict::Inconclusive => 3,
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|t| format!("{:.6}", t)).collect();
    format!("[{}]", parts.join(", "))
}

/// `VERDICT: <verdict> kind=<kind> c_lower=<c> [m'=<m'>]`.
pub fn verdict_line(c: &Certificate) -> String {
    let mut line = format!("VERDICT: {} kind={} c_lower={:.6}", c.verdict, c.kind, c.c_lower);
    match &c.params {
        CertificateParams::Shubin { m_prime, rho, .. } => {
            line.push_str(&format!(" rho={} m'={}", rho, m_prime));
        }
        CertificateParams::Sg { m_prime, .. } => {
            line.push_str(&format!(" m'=({},{})", m_prime.0, m_prime.1));
        }
        CertificateParams::Lambda { implied_sg, .. } => {
            line.push_str(&format!(" implied_sg=({},{})", implied_sg.0, implied_sg.1));
        }
        CertificateParams::General { .. } => {}
    }
    line
}

pub fn witness_line(w: &Witness) -> String {
    let mut line = format!(
        "WITNESS: x={} xi={} ratio={:.3e}",
        fmt_vec(&w.point.x),
        fmt_vec(&w.point.xi),
        w.ratio
    );
    if let Some(l) = &w.locus {
        line.push_str(&format!(" locus={{{}}}", l));
    }
    if let Some((a, b)) = &w.derivative {
        line.push_str(&format!(" derivative=alpha{:?},beta{:?}", a, b));
    }
    line
}
