//! Flat `key = value` experiment configuration.
//!
//! Every run resolves its parameters into an [`ExperimentConfig`]. The
//! canonical text form lists each key of the schema in a fixed order with
//! defaults filled in, and its SHA-256 digest is stamped on every output file.
//! Feeding the canonical text back through `--config` reproduces the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hypo_core::weights::parse_rational;
use hypo_core::Rational;
use sha2::{Digest, Sha256};

use crate::HypoError;

/// `(key, default, description)`; an empty default means "unset".
pub const SCHEMA: &[(&str, &str, &str)] = &[
    ("command", "", "certify | parametrix | solve | bootstrap | demo"),
    ("demo", "", "schroedinger-stability | hoermander-failure | camperi"),
    ("kind", "gamma-rho", "gamma-rho | elliptic | sg | sg-hypo | lambda | general"),
    ("symbol", "", "polynomial symbol, e.g. xi1^2 + x1^4"),
    ("dim", "", "phase-space dimension n (inferred from the symbol when unset)"),
    ("m", "", "class order: rational (gamma-rho), pair (sg, sg-hypo), weight (elliptic, general), tuple (bootstrap)"),
    ("m_prime", "", "lower-bound order pair for sg-hypo"),
    ("rho", "1", "gamma-rho parameter in (0, 1]"),
    ("m0", "", "weight M0 (general) or gain tuple (bootstrap)"),
    ("phi", "<z>", "weight Phi (elliptic, general)"),
    ("psi", "<z>", "weight Psi (elliptic, general)"),
    ("mu", "", "lambda exponent mu"),
    ("gamma", "", "lambda exponent gamma"),
    ("seed", "0", "sampling seed"),
    ("j_min", "2", "innermost shell exponent, radius 2^j_min"),
    ("j_max", "12", "outermost shell exponent"),
    ("dirs", "", "random directions per shell (512 for n = 1, 2048 otherwise)"),
    ("terms", "2", "parametrix terms q_0..q_N"),
    ("k", "200", "Hermite cutoff K"),
    ("half_width", "12", "grid half-width L"),
    ("grid_points", "512", "grid points G per axis"),
    ("s_max", "10", "regularity index cap"),
    ("rhs", "h0", "right-hand side, e.g. h0 + 0.5*h2, h(1,0), or flat"),
    ("mode", "shubin", "bootstrap order mode: shubin | sg | general"),
    ("m_u", "", "bootstrap initial regularity tuple"),
    ("mt", "", "bootstrap perturbation order tuple"),
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    SCHEMA.iter().any(|(k, _, _)| *k == key)
}

impl ExperimentConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HypoError> {
        let mut cfg = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HypoError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HypoError> {
        if !known(key) {
            return Err(HypoError::Config(format!("unknown key `{}`", key)));
        }
        if value.is_empty() {
            self.values.remove(key);
        } else {
            self.values.insert(key.to_string(), value.to_string());
        }
        Ok(())
    }

    /// Sets `key` only when it has no explicit value yet.
    pub fn set_default(&mut self, key: &str, value: &str) -> Result<(), HypoError> {
        if !self.values.contains_key(key) {
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Explicit value, else the schema default.
    pub fn get(&self, key: &str) -> Option<&str> {
        if let Some(v) = self.values.get(key) {
            return Some(v);
        }
        SCHEMA
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, d, _)| *d)
            .filter(|d| !d.is_empty())
    }

    pub fn require(&self, key: &str) -> Result<&str, HypoError> {
        self.get(key)
            .ok_or_else(|| HypoError::Config(format!("missing required key `{}`", key)))
    }

    pub fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HypoError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| HypoError::Config(format!("`{}` is not a valid value for `{}`", v, key)))
            })
            .transpose()
    }

    pub fn number_or<T: std::str::FromStr>(&self, key: &str, fallback: T) -> Result<T, HypoError> {
        Ok(self.number(key)?.unwrap_or(fallback))
    }

    pub fn rational(&self, key: &str) -> Result<Option<Rational>, HypoError> {
        self.get(key).map(|v| Ok(parse_rational(v)?)).transpose()
    }

    /// Rational pair written `a, b` or `(a, b)`.
    pub fn pair(&self, key: &str) -> Result<Option<(Rational, Rational)>, HypoError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let parts = split_tuple(v);
        if parts.len() != 2 {
            return Err(HypoError::Config(format!("`{}` expects a pair, got `{}`", key, v)));
        }
        Ok(Some((parse_rational(parts[0])?, parse_rational(parts[1])?)))
    }

    /// Canonical text: every schema key with a value, defaults included.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, _, _) in SCHEMA {
            if let Some(v) = self.get(k) {
                let _ = writeln!(out, "{} = {}", k, v);
            }
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        hash.iter().take(8).map(|b| format!("{:02x}", b)).collect()
    }
}

/// Splits `(a, b, c)` or `a,b,c` into trimmed parts.
pub fn split_tuple(text: &str) -> Vec<&str> {
    let t = text.trim();
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    t.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let mut c = ExperimentConfig::new();
        c.set("command", "certify").unwrap();
        c.set("symbol", "xi1^2 + x1^4").unwrap();
        c.set("rho", "1/2").unwrap();
        let text = c.canonical();
        assert!(text.contains("seed = 0\n"));
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back.canonical(), text);
        assert_eq!(back.digest(), c.digest());
        assert_eq!(c.digest().len(), 16);
    }

    #[test]
    fn defaults_do_not_change_the_digest() {
        let mut a = ExperimentConfig::new();
        a.set("command", "solve").unwrap();
        let mut b = a.clone();
        b.set("k", "200").unwrap();
        assert_eq!(a.digest(), b.digest());
        b.set("k", "300").unwrap();
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("seed 3").is_err());
        let c = ExperimentConfig::parse("# comment\nseed = 3 # trailing\n").unwrap();
        assert_eq!(c.number::<u64>("seed").unwrap(), Some(3));
    }

    #[test]
    fn pairs_and_rationals() {
        let c = ExperimentConfig::parse("m = (4, 2)\nrho = 1/3").unwrap();
        let one = Rational::from_integer(1);
        assert_eq!(c.pair("m").unwrap(), Some((one * 4, one * 2)));
        assert_eq!(c.rational("rho").unwrap(), Some(Rational::new(1, 3)));
        assert!(ExperimentConfig::parse("m = 1,2,3").unwrap().pair("m").is_err());
    }
}
