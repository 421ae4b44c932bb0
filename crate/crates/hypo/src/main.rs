use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypo::{ExperimentConfig, HypoError, EXIT_ERROR};

/// Certificates, parametrices, Hermite-Galerkin solves and Sobolev
/// bootstrap chains for global pseudo-differential operators.
#[derive(Parser, Debug)]
#[command(name = "hypo", version, about)]
struct Cli {
    /// Sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify or refute ellipticity / hypoellipticity of a symbol.
    Certify(CertifyArgs),
    /// Certify, build q_0..q_N and fit the remainder orders.
    Parametrix {
        #[command(flatten)]
        cert: CertifyArgs,
        /// Number N of correction terms.
        #[arg(long)]
        terms: Option<u32>,
    },
    /// Galerkin solve of Op(p) u = f in the Hermite basis.
    Solve(SolveArgs),
    /// Sobolev-order bootstrap chain.
    Bootstrap(BootstrapArgs),
    /// Run a worked example: schroedinger-stability, hoermander-failure, camperi.
    Demo {
        name: String,
        /// Hermite cutoff K.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        s_max: Option<f64>,
    },
}

#[derive(Args, Debug, Default)]
struct CertifyArgs {
    /// gamma-rho | elliptic | sg | sg-hypo | lambda | general
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    symbol: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Class order (rational, pair or weight, depending on the kind).
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m_prime: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    m0: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    mu: Option<u32>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    j_min: Option<i32>,
    #[arg(long)]
    j_max: Option<i32>,
    /// Random directions per shell.
    #[arg(long)]
    dirs: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    symbol: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Hermite cutoff K.
    #[arg(long)]
    k: Option<u32>,
    /// Right-hand side, e.g. `h0 + 0.5*h2` or `flat`.
    #[arg(long, allow_hyphen_values = true)]
    rhs: Option<String>,
    #[arg(long)]
    s_max: Option<f64>,
}

#[derive(Args, Debug)]
struct BootstrapArgs {
    /// shubin | sg | general
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m_u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mt: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn certify_pairs(a: &CertifyArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("kind", a.kind.clone()),
        ("symbol", a.symbol.clone()),
        ("dim", s(&a.dim)),
        ("m", a.m.clone()),
        ("m_prime", a.m_prime.clone()),
        ("rho", a.rho.clone()),
        ("m0", a.m0.clone()),
        ("phi", a.phi.clone()),
        ("psi", a.psi.clone()),
        ("mu", s(&a.mu)),
        ("gamma", a.gamma.clone()),
        ("j_min", s(&a.j_min)),
        ("j_max", s(&a.j_max)),
        ("dirs", s(&a.dirs)),
    ]
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HypoError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::new(),
    };
    let mut pairs: Vec<(&str, Option<String>)> = vec![("seed", s(&cli.seed))];
    match &cli.command {
        Some(Command::Certify(a)) => {
            pairs.push(("command", Some("certify".into())));
            pairs.extend(certify_pairs(a));
        }
        Some(Command::Parametrix { cert, terms }) => {
            pairs.push(("command", Some("parametrix".into())));
            pairs.extend(certify_pairs(cert));
            pairs.push(("terms", s(terms)));
        }
        Some(Command::Solve(a)) => pairs.extend([
            ("command", Some("solve".into())),
            ("symbol", a.symbol.clone()),
            ("dim", s(&a.dim)),
            ("k", s(&a.k)),
            ("rhs", a.rhs.clone()),
            ("s_max", s(&a.s_max)),
        ]),
        Some(Command::Bootstrap(a)) => pairs.extend([
            ("command", Some("bootstrap".into())),
            ("mode", a.mode.clone()),
            ("m_u", a.m_u.clone()),
            ("m", a.m.clone()),
            ("m0", a.m0.clone()),
            ("mt", a.mt.clone()),
            ("dim", s(&a.dim)),
        ]),
        Some(Command::Demo { name, k, s_max }) => pairs.extend([
            ("command", Some("demo".into())),
            ("demo", Some(name.clone())),
            ("k", s(k)),
            ("s_max", s(s_max)),
        ]),
        None => {}
    }
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = build_config(&cli).and_then(|cfg| hypo::run(cfg, &cli.out_dir));
    match result {
        Ok(report) => {
            for line in &report.lines {
                println!("{}", line);
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
