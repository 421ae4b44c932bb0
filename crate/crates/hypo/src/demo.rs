//! The three worked examples: stability of Schroedinger-type operators under
//! lower-order perturbations, the failure of the uncertainty principle for
//! Hoermander-type weights, and the lambda-elliptic symbol
//! `1 + xi^4 (1 + x^2)`.

use hypo_core::bootstrap::{bootstrap_trace, check_perturbation_admissible, min_steps, OrderTuple};
use hypo_core::certify::{certify_gamma_rho_hypo, certify_lambda_elliptic, certify_sg_hypo, Certificate};
use hypo_core::spectral::{galerkin_solve, hermite_matrix, regularity_index, CoeffVector, HermiteBasis};
use hypo_core::symbols::{parse_symbol, PolySymbol};
use hypo_core::weights::{sup_exponent, WeightExpr};
use hypo_core::{Complex64, Rational};
use serde_json::json;

use crate::commands::{
    bootstrap_lines, bootstrap_rows, certificate_lines, certify_with, regularity_config, regularity_line, sampling,
    shell_energies, RANK_TOL,
};
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::record;
use crate::rhs::parse_rhs;
use crate::{HypoError, Report};

pub const DEMOS: &[&str] = &["schroedinger-stability", "hoermander-failure", "camperi"];

fn int(k: i64) -> Rational {
    Rational::from_integer(k)
}

/// Demo-specific defaults, applied before the config digest is taken.
pub fn defaults(name: &str, cfg: &mut ExperimentConfig) -> Result<(), HypoError> {
    match name {
        "schroedinger-stability" => cfg.set_default("rhs", "h0 + 0.5*h2"),
        "hoermander-failure" | "camperi" => Ok(()),
        other => Err(HypoError::Config(format!(
            "unknown demo `{}` (expected one of {})",
            other,
            DEMOS.join(", ")
        ))),
    }
}

pub fn run(name: &str, cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Report, HypoError> {
    let lines = match name {
        "schroedinger-stability" => schroedinger(cfg, out)?,
        "hoermander-failure" => hoermander(cfg, out)?,
        "camperi" => camperi(cfg, out)?,
        other => return Err(HypoError::Config(format!("unknown demo `{}`", other))),
    };
    out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok(Report::new(lines, 0))
}

fn sym(text: &str) -> Result<PolySymbol, HypoError> {
    Ok(parse_symbol(text, Some(1))?)
}

fn save_cert(out: &mut OutputDir, name: &str, p: &PolySymbol, c: &Certificate) -> Result<(), HypoError> {
    out.write_json(name, record::certificate(p, c))?;
    Ok(())
}

fn schroedinger(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<String>, HypoError> {
    let s = sampling(cfg, 1)?;
    let k_cut: u32 = cfg.number_or("k", 200)?;
    let f = parse_rhs(cfg.require("rhs")?, 1, k_cut)?;
    let reg_cfg = regularity_config(cfg)?;
    let mut lines = Vec::new();
    let mut decay_rows = Vec::new();
    let mut chain_rows = Vec::new();
    for (k, a_text, mt) in [(1i64, "0.1*x1", 1i64), (2, "0.3", 0)] {
        let p_text = format!("xi1^2 + x1^{}", 2 * k);
        let p = sym(&p_text)?;
        let rho = Rational::new(1, k);
        lines.push(format!("CASE k={}: P = {}, A = {}, rho = {}", k, p_text, a_text, rho));
        let c = certify_gamma_rho_hypo(&p, int(2), rho, &s)?;
        save_cert(out, &format!("certificate_k{}.json", k), &p, &c)?;
        lines.extend(certificate_lines(&c));
        let Some(mp) = c.m_prime().filter(|_| c.is_certified()) else {
            lines.push(format!("k={}: not certified, skipping the perturbation", k));
            continue;
        };
        let zr = WeightExpr::z(1, rho);
        match check_perturbation_admissible(&WeightExpr::z(1, mp), &WeightExpr::z(1, int(mt)), &zr, &zr) {
            Ok(eps) => lines.push(format!("ADMISSIBLE: m~={} < m'={} eps={}", mt, mp, eps)),
            Err(e) => lines.push(format!("INADMISSIBLE: m~={} m'={}: {}", mt, mp, e)),
        }

        let full = &p + &sym(a_text)?;
        let a = hermite_matrix(&full, k_cut)?;
        let sol = galerkin_solve(&a, &f, RANK_TOL)?;
        let reg = regularity_index(&sol.u, &reg_cfg);
        lines.push(format!("SOLVE: k={} K={} residual={:.3e}", k, k_cut, sol.residual));
        lines.push(regularity_line(&format!("k={} solution ", k), &reg));
        let control = CoeffVector::from_fn(&HermiteBasis::new(1, k_cut), |_| Complex64::new(1.0, 0.0));
        let creg = regularity_index(&control, &reg_cfg);
        lines.push(regularity_line(&format!("k={} control ", k), &creg));
        for (label, u) in [("solution", &sol.u), ("control", &control)] {
            for (j, e) in shell_energies(u).iter().enumerate() {
                decay_rows.push(vec![k.to_string(), label.to_string(), j.to_string(), e.to_string()]);
            }
        }

        let (mu, m, m0, mtt) = (
            OrderTuple::shubin(int(-4)),
            OrderTuple::shubin(int(0)),
            OrderTuple::shubin(mp),
            OrderTuple::shubin(int(mt)),
        );
        let trace = bootstrap_trace(&mu, &m, &m0, &mtt)?;
        lines.extend(bootstrap_lines(&trace, min_steps(&mu, &m, &m0, &mtt)?));
        for r in bootstrap_rows(&trace) {
            chain_rows.push([vec![k.to_string()], r].concat());
        }
    }
    out.write_csv("decay.csv", &["k", "vector", "shell", "energy"], &decay_rows)?;
    out.write_csv("bootstrap.csv", &["k", "step", "order", "space"], &chain_rows)?;
    Ok(lines)
}

fn hoermander(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<String>, HypoError> {
    let half = Rational::new(1, 2);
    let phi = WeightExpr::xi(1, half);
    let psi = WeightExpr::xi(1, int(1));
    let product = phi.clone() * psi.clone();
    let rays = product.ray_orders();
    let sup = sup_exponent(&phi, &psi)?;
    let mut lines = vec![match sup {
        None => format!(
            "SUP: absent for Phi = {}, Psi = {}: Phi Psi = {} has ray orders (x {}, xi {}, diagonal {})",
            phi, psi, product, rays.x_ray, rays.xi_ray, rays.diag_ray
        ),
        Some(d) => format!("SUP: delta = {} for Phi = {}, Psi = {}", d, phi, psi),
    }];
    out.write_json(
        "sup.json",
        json!({
            "phi": phi.to_string(),
            "psi": psi.to_string(),
            "product": product.to_string(),
            "ray_orders": [rays.x_ray.to_string(), rays.xi_ray.to_string(), rays.diag_ray.to_string()],
            "sup_exponent": sup.map(|d| d.to_string()),
        }),
    )?;

    let mut sg_cfg = cfg.clone();
    sg_cfg.set("kind", "sg")?;
    sg_cfg.set("m", "")?;
    let p = sym("-xi1^2")?;
    let c = certify_with(&sg_cfg, &p)?;
    save_cert(out, "sg_certificate.json", &p, &c)?;
    lines.extend(certificate_lines(&c));
    if let Some(w) = c.witness.as_ref().and_then(|w| w.locus.as_ref()) {
        lines.push(format!(
            "KERNEL: p = {} vanishes on {{{}}}; Op(p) annihilates the constant functions, so no H(M) gain holds for P",
            p, w
        ));
    }

    let m0 = WeightExpr::xi(1, int(2));
    let mt = WeightExpr::one(1);
    let adm = check_perturbation_admissible(&m0, &mt, &phi, &psi);
    lines.push(match &adm {
        Ok(eps) => format!("PERTURBATION: admissible with eps = {}", eps),
        Err(e) => format!("PERTURBATION: inadmissible (M0 = {}, M~ = {}): {}", m0, mt, e),
    });
    out.write_json(
        "perturbation.json",
        json!({
            "m0": m0.to_string(),
            "mt": mt.to_string(),
            "phi": phi.to_string(),
            "psi": psi.to_string(),
            "epsilon": adm.as_ref().ok().map(|e| e.to_string()),
            "error": adm.as_ref().err().map(|e| e.to_string()),
        }),
    )?;
    Ok(lines)
}

fn camperi(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<String>, HypoError> {
    let s = sampling(cfg, 1)?;
    let p = sym("1 + xi1^4*(1 + x1^2)")?;
    let mut lines = vec![format!("SYMBOL: {}", p)];

    let lam = certify_lambda_elliptic(&p, 4, Rational::new(1, 2), &s)?;
    save_cert(out, "lambda_certificate.json", &p, &lam)?;
    lines.extend(certificate_lines(&lam));
    let implied = (int(4), int(2));

    let mut sg_cfg = cfg.clone();
    sg_cfg.set("kind", "sg")?;
    sg_cfg.set("m", "4,2")?;
    let sg_ell = certify_with(&sg_cfg, &p)?;
    save_cert(out, "sg_elliptic_certificate.json", &p, &sg_ell)?;
    lines.push(format!("SG-ELLIPTIC with lower bound <xi>^{} <x>^{}:", implied.0, implied.1));
    lines.extend(certificate_lines(&sg_ell));

    let hypo = certify_sg_hypo(&p, implied, (int(4), int(0)), &s)?;
    save_cert(out, "sg_hypo_certificate.json", &p, &hypo)?;
    lines.push("SG-HYPO with m = (4,2), m' = (4,0):".into());
    lines.extend(certificate_lines(&hypo));

    let (mu, m, m0, mt) = (
        OrderTuple::sg(int(-2), int(-2)),
        OrderTuple::sg(int(0), int(0)),
        OrderTuple::sg(implied.0, implied.1),
        OrderTuple::sg(int(3), int(1)),
    );
    let trace = bootstrap_trace(&mu, &m, &m0, &mt)?;
    lines.push(format!("BOOTSTRAP: m_u = {}, m = {}, m0 = {}, m~ = {}", mu, m, m0, mt));
    lines.extend(bootstrap_lines(&trace, min_steps(&mu, &m, &m0, &mt)?));
    out.write_csv("bootstrap.csv", &["step", "order", "space"], &bootstrap_rows(&trace))?;
    Ok(lines)
}
