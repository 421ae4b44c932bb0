//! Right-hand sides for `solve`: sums like `h0 + 0.5*h2 - 2*h(1,3)`, or
//! `flat` for the all-ones coefficient vector.

use hypo_core::spectral::{CoeffVector, HermiteBasis};
use hypo_core::Complex64;

use crate::HypoError;

fn bad(text: &str) -> HypoError {
    HypoError::Config(format!("cannot parse right-hand side `{}`", text))
}

fn multi_index(text: &str, n: usize) -> Option<Vec<u32>> {
    let t = text.trim().strip_prefix('h')?;
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    let a: Vec<u32> = t.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    (a.len() == n).then_some(a)
}

pub fn parse_rhs(text: &str, n: usize, cutoff: u32) -> Result<CoeffVector, HypoError> {
    let basis = HermiteBasis::new(n, cutoff);
    if text.trim() == "flat" {
        return Ok(CoeffVector::from_fn(&basis, |_| Complex64::new(1.0, 0.0)));
    }
    let mut u = CoeffVector::zeros(n, cutoff);
    let mut spaced = String::with_capacity(text.len() + 4);
    let mut prev = ' ';
    for ch in text.chars() {
        if ch == '-' && prev != 'e' && prev != 'E' {
            spaced.push('+');
        }
        spaced.push(ch);
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    for term in spaced.split('+').map(str::trim).filter(|t| !t.is_empty()) {
        let (sign, term) = match term.strip_prefix('-') {
            Some(rest) => (-1.0, rest.trim()),
            None => (1.0, term),
        };
        let (coef, h) = match term.split_once('*') {
            Some((c, h)) => (c.trim().parse::<f64>().map_err(|_| bad(text))?, h),
            None => (1.0, term),
        };
        let alpha = multi_index(h, n).ok_or_else(|| bad(text))?;
        let k = basis
            .index(&alpha)
            .ok_or_else(|| HypoError::Config(format!("h{:?} lies above the cutoff K = {}", alpha, cutoff)))?;
        u.coeffs_mut()[k] += Complex64::new(sign * coef, 0.0);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums() {
        let u = parse_rhs("h0 + 0.5*h2", 1, 4).unwrap();
        assert_eq!(u.get(&[0]), Complex64::new(1.0, 0.0));
        assert_eq!(u.get(&[2]), Complex64::new(0.5, 0.0));
        let v = parse_rhs("-2*h(1,0) + h(0,1)", 2, 3).unwrap();
        assert_eq!(v.get(&[1, 0]), Complex64::new(-2.0, 0.0));
        assert_eq!(v.get(&[0, 1]), Complex64::new(1.0, 0.0));
        assert_eq!(parse_rhs("1e-3*h1", 1, 2).unwrap().get(&[1]), Complex64::new(1e-3, 0.0));
        assert!(parse_rhs("flat", 1, 8).unwrap().coeffs().iter().all(|c| c.re == 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_rhs("h9", 1, 4).is_err());
        assert!(parse_rhs("q0", 1, 4).is_err());
        assert!(parse_rhs("h(1)", 2, 4).is_err());
        assert!(parse_rhs("x*h1", 1, 4).is_err());
    }
}
