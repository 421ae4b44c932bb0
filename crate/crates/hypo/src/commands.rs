//! `certify`, `parametrix`, `solve` and `bootstrap`.

use hypo_core::bootstrap::{bootstrap_trace, min_steps, BootstrapTrace, OrderTuple};
use hypo_core::calculus::{estimate_order, parametrix, parametrix_remainder, AsymptoticSymbol};
use hypo_core::certify::{
    certify_elliptic, certify_gamma_rho_hypo, certify_general_hypo, certify_lambda_elliptic, certify_sg_hypo,
    default_gamma_order, Certificate, CertificateParams,
};
use hypo_core::sampling::SamplingConfig;
use hypo_core::spectral::{apply_grid, galerkin_solve, GridFunction, hermite_matrix, regularity_index, CoeffVector, RegularityConfig, RegularityReport};
use hypo_core::symbols::{parse_symbol, PolySymbol, RationalSymbol};
use hypo_core::weights::{parse_weight, WeightExpr};
use hypo_core::Rational;

use crate::config::{split_tuple, ExperimentConfig};
use crate::output::OutputDir;
use crate::record;
use crate::rhs::parse_rhs;
use crate::{HypoError, Report};

/// Ratio threshold on `|R_ii|` below which a Galerkin system counts as
/// rank deficient.
pub const RANK_TOL: f64 = 1e-13;

/// Printed symbols longer than this are summarised by their term count.
const PRINT_LIMIT: usize = 240;

pub fn symbol(cfg: &ExperimentConfig) -> Result<PolySymbol, HypoError> {
    Ok(parse_symbol(cfg.require("symbol")?, cfg.number("dim")?)?)
}

pub fn sampling(cfg: &ExperimentConfig, n: usize) -> Result<SamplingConfig, HypoError> {
    let base = SamplingConfig::for_dimension(n);
    Ok(SamplingConfig {
        seed: cfg.number_or("seed", 0)?,
        j_min: cfg.number_or("j_min", base.j_min)?,
        j_max: cfg.number_or("j_max", base.j_max)?,
        dirs_per_shell: cfg.number_or("dirs", base.dirs_per_shell)?,
        ..base
    })
}

fn weight(cfg: &ExperimentConfig, key: &str, n: usize) -> Result<Option<WeightExpr>, HypoError> {
    cfg.get(key).map(|t| Ok(parse_weight(t, n)?)).transpose()
}

fn required_weight(cfg: &ExperimentConfig, key: &str, n: usize) -> Result<WeightExpr, HypoError> {
    weight(cfg, key, n)?.ok_or_else(|| HypoError::Config(format!("kind needs `{}`", key)))
}

fn int(k: i64) -> Rational {
    Rational::from_integer(k)
}

fn sg_default(p: &PolySymbol) -> Result<(Rational, Rational), HypoError> {
    let (a, b) = p.sg_order()?;
    Ok((int(a as i64), int(b as i64)))
}

pub fn certify_with(cfg: &ExperimentConfig, p: &PolySymbol) -> Result<Certificate, HypoError> {
    let n = p.dim_n();
    let s = sampling(cfg, n)?;
    let kind = cfg.require("kind")?;
    let cert = match kind {
        "gamma-rho" => {
            let rho = cfg.rational("rho")?.unwrap_or(int(1));
            let m = match cfg.rational("m")? {
                Some(m) => m,
                None => int(default_gamma_order(p).ok_or(hypo_core::certify::CertifyError::ZeroSymbol)? as i64),
            };
            certify_gamma_rho_hypo(p, m, rho, &s)?
        }
        "elliptic" => {
            let deg = p.shubin_order()?;
            let m = weight(cfg, "m", n)?.unwrap_or_else(|| WeightExpr::z(n, int(deg as i64)));
            certify_elliptic(p, &m, &required_weight(cfg, "phi", n)?, &required_weight(cfg, "psi", n)?, &s)?
        }
        "sg" => {
            let (m1, m2) = match cfg.pair("m")? {
                Some(m) => m,
                None => sg_default(p)?,
            };
            let m = WeightExpr::sg(n, m1, m2);
            certify_elliptic(p, &m, &WeightExpr::x(n, int(1)), &WeightExpr::xi(n, int(1)), &s)?
        }
        "sg-hypo" => {
            let m = match cfg.pair("m")? {
                Some(m) => m,
                None => sg_default(p)?,
            };
            let mp = cfg
                .pair("m_prime")?
                .ok_or_else(|| HypoError::Config("kind sg-hypo needs `m_prime`".into()))?;
            certify_sg_hypo(p, m, mp, &s)?
        }
        "lambda" => {
            let mu: u32 = cfg
                .number("mu")?
                .ok_or_else(|| HypoError::Config("kind lambda needs `mu`".into()))?;
            let gamma = cfg
                .rational("gamma")?
                .ok_or_else(|| HypoError::Config("kind lambda needs `gamma`".into()))?;
            certify_lambda_elliptic(p, mu, gamma, &s)?
        }
        "general" => certify_general_hypo(
            p,
            &required_weight(cfg, "m", n)?,
            &required_weight(cfg, "m0", n)?,
            &required_weight(cfg, "phi", n)?,
            &required_weight(cfg, "psi", n)?,
            &s,
        )?,
        other => return Err(HypoError::Config(format!("unknown certificate kind `{}`", other))),
    };
    Ok(cert)
}

/// Verdict, witness and note lines of a certificate.
pub fn certificate_lines(c: &Certificate) -> Vec<String> {
    let mut lines = vec![record::verdict_line(c)];
    if let Some(w) = &c.witness {
        lines.push(record::witness_line(w));
    }
    lines.extend(c.notes.iter().map(|n| format!("NOTE: {}", n)));
    lines
}

pub fn shell_rows(c: &Certificate) -> Vec<Vec<String>> {
    c.shell_minima
        .iter()
        .enumerate()
        .map(|(j, (r, v))| vec![j.to_string(), r.to_string(), v.to_string()])
        .collect()
}

pub fn run_certify(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Report, HypoError> {
    let p = symbol(cfg)?;
    let c = certify_with(cfg, &p)?;
    out.write_json("certificate.json", record::certificate(&p, &c))?;
    out.write_csv("shells.csv", &["shell", "radius", "min_ratio"], &shell_rows(&c))?;
    let lines = certificate_lines(&c);
    out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok(Report::new(lines, record::exit_code(c.verdict)))
}

fn describe(r: &RationalSymbol) -> String {
    let text = r.to_string();
    if text.len() <= PRINT_LIMIT {
        text
    } else {
        format!(
            "{} numerator terms over ({})^{}",
            r.num().len(),
            r.base(),
            r.power()
        )
    }
}

/// `(Phi, Psi)` matching the certificate's geometry.
fn geometry_weights(c: &Certificate, n: usize) -> (WeightExpr, WeightExpr) {
    match &c.params {
        CertificateParams::Shubin { rho, .. } => (WeightExpr::z(n, *rho), WeightExpr::z(n, *rho)),
        CertificateParams::Sg { .. } | CertificateParams::Lambda { .. } => {
            (WeightExpr::x(n, int(1)), WeightExpr::xi(n, int(1)))
        }
        CertificateParams::General { phi, psi, .. } => (phi.clone(), psi.clone()),
    }
}

pub fn run_parametrix(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Report, HypoError> {
    let p = symbol(cfg)?;
    let c = certify_with(cfg, &p)?;
    let mut lines = certificate_lines(&c);
    out.write_json("certificate.json", record::certificate(&p, &c))?;
    if !c.is_certified() {
        lines.push("no parametrix without a certificate".into());
        out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
        return Ok(Report::new(lines, record::exit_code(c.verdict)));
    }
    let n_terms: u32 = cfg.number_or("terms", 2)?;
    let s = sampling(cfg, p.dim_n())?;
    let (phi, psi) = geometry_weights(&c, p.dim_n());
    let q: AsymptoticSymbol = parametrix(&p, &c, n_terms)?;
    let g = *q.base_gain.numer() as f64 / *q.base_gain.denom() as f64;
    for t in &q.terms {
        lines.push(format!("q_{} = {}", t.level, describe(&t.symbol)));
    }
    let mut rows = Vec::new();
    for upto in 0..=n_terms {
        let qn = parametrix(&p, &c, upto)?;
        let r = parametrix_remainder(&qn, &p)?;
        let est = estimate_order(&r, &phi, &psi, &s)?;
        lines.push(format!(
            "REMAINDER: N={} slope={:.4} +/- {:.4} expected<={:.4}",
            upto,
            est.slope,
            est.half_width,
            -g * (upto as f64 + 1.0)
        ));
        for (radius, value) in &est.shells {
            rows.push(vec![upto.to_string(), radius.to_string(), value.to_string()]);
        }
    }
    out.write_csv("remainder.csv", &["n_terms", "radius", "max_abs_remainder"], &rows)?;
    out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok(Report::new(lines, 0))
}

/// Shell energies `sum_{|alpha| = k} |c_alpha|^2`.
pub fn shell_energies(u: &CoeffVector) -> Vec<f64> {
    let mut e = vec![0.0; u.cutoff() as usize + 1];
    for (a, c) in u.basis().indices().iter().zip(u.coeffs()) {
        e[a.iter().sum::<u32>() as usize] += c.norm_sqr();
    }
    e
}

pub fn regularity_config(cfg: &ExperimentConfig) -> Result<RegularityConfig, HypoError> {
    Ok(RegularityConfig {
        s_max: cfg.number_or("s_max", 10.0)?,
        ..RegularityConfig::default()
    })
}

pub fn regularity_line(label: &str, r: &RegularityReport) -> String {
    format!(
        "REGULARITY: {}index={} class={} slope={} window=[{},{})",
        label,
        r.index,
        r.class,
        r.slope.map_or("none".to_string(), |s| format!("{:.4}", s)),
        r.window.0,
        r.window.1
    )
}

fn alpha_text(a: &[u32]) -> String {
    a.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

pub fn coeff_rows(u: &CoeffVector) -> Vec<Vec<String>> {
    u.basis()
        .indices()
        .iter()
        .zip(u.coeffs())
        .enumerate()
        .map(|(i, (a, c))| vec![i.to_string(), alpha_text(a), c.re.to_string(), c.im.to_string()])
        .collect()
}

/// `Op(p) u - f` on the `(L, G)` grid, with the aliasing flag of the
/// pseudospectral application.
fn grid_check(cfg: &ExperimentConfig, p: &PolySymbol, u: &CoeffVector, f: &CoeffVector) -> Result<String, HypoError> {
    let half_width: f64 = cfg.number_or("half_width", 12.0)?;
    let points: usize = cfg.number_or("grid_points", 512)?;
    let ug = GridFunction::from_hermite(u, half_width, points)?;
    let fg = GridFunction::from_hermite(f, half_width, points)?;
    let app = apply_grid(p, &ug)?;
    let res = app.result.sub(&fg)?.l2_norm() / fg.l2_norm().max(f64::MIN_POSITIVE);
    Ok(format!(
        "GRID: L={} G={} relative_residual={:.3e} top_fraction={:.3e} aliasing={}",
        half_width, points, res, app.top_fraction, app.aliasing
    ))
}

pub fn run_solve(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Report, HypoError> {
    let p = symbol(cfg)?;
    let k: u32 = cfg.number_or("k", 200)?;
    let f = parse_rhs(cfg.require("rhs")?, p.dim_n(), k)?;
    let a = hermite_matrix(&p, k)?;
    let sol = galerkin_solve(&a, &f, RANK_TOL)?;
    let reg = regularity_index(&sol.u, &regularity_config(cfg)?);
    let mut lines = vec![
        format!(
            "SOLVE: K={} unknowns={} residual={:.3e} diag_ratio={:.3e}",
            k,
            a.size(),
            sol.residual,
            sol.diag_ratio
        ),
        regularity_line("", &reg),
    ];
    if p.dim_n() == 1 {
        lines.push(grid_check(cfg, &p, &sol.u, &f)?);
    }
    out.write_csv("solution.csv", &["index", "alpha", "re", "im"], &coeff_rows(&sol.u))?;
    let decay: Vec<Vec<String>> = shell_energies(&sol.u)
        .iter()
        .enumerate()
        .map(|(j, e)| vec![j.to_string(), e.to_string()])
        .collect();
    out.write_csv("decay.csv", &["shell", "energy"], &decay)?;
    out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok(Report::new(lines, 0))
}

fn tuple(cfg: &ExperimentConfig, key: &str, mode: &str, n: usize) -> Result<OrderTuple, HypoError> {
    let text = cfg.require(key)?;
    let parts = split_tuple(text);
    let bad = || HypoError::Config(format!("`{}` = `{}` does not fit mode {}", key, text, mode));
    Ok(match mode {
        "shubin" if parts.len() == 1 => OrderTuple::shubin(hypo_core::weights::parse_rational(parts[0])?),
        "sg" if parts.len() == 2 => OrderTuple::sg(
            hypo_core::weights::parse_rational(parts[0])?,
            hypo_core::weights::parse_rational(parts[1])?,
        ),
        "general" => OrderTuple::general(&parse_weight(text, n)?),
        _ => return Err(bad()),
    })
}

pub fn bootstrap_from(cfg: &ExperimentConfig) -> Result<(BootstrapTrace, usize), HypoError> {
    let mode = cfg.require("mode")?;
    let n: usize = cfg.number_or("dim", 1)?;
    let [mu, m, m0, mt] = ["m_u", "m", "m0", "mt"].map(|k| tuple(cfg, k, mode, n));
    let (mu, m, m0, mt) = (mu?, m?, m0?, mt?);
    let trace = bootstrap_trace(&mu, &m, &m0, &mt)?;
    let closed = min_steps(&mu, &m, &m0, &mt)?;
    Ok((trace, closed))
}

pub fn bootstrap_lines(trace: &BootstrapTrace, closed: usize) -> Vec<String> {
    let mut lines = vec![format!("{:>4}  {:<16}  {}", "step", "order", "space")];
    for (k, r) in trace.chain.iter().enumerate() {
        lines.push(format!("{:>4}  {:<16}  {}", k, r.to_string(), r.space_label()));
    }
    lines.push(format!(
        "STEPS: N={} closed_form={} target={} epsilon={}",
        trace.steps,
        closed,
        trace.target,
        trace.epsilon.map_or("n/a".to_string(), |e| e.to_string())
    ));
    lines
}

pub fn bootstrap_rows(trace: &BootstrapTrace) -> Vec<Vec<String>> {
    trace
        .chain
        .iter()
        .enumerate()
        .map(|(k, r)| vec![k.to_string(), r.to_string(), r.space_label()])
        .collect()
}

pub fn run_bootstrap(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Report, HypoError> {
    let (trace, closed) = bootstrap_from(cfg)?;
    let lines = bootstrap_lines(&trace, closed);
    out.write_csv("bootstrap.csv", &["step", "order", "space"], &bootstrap_rows(&trace))?;
    out.write_text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok(Report::new(lines, 0))
}
