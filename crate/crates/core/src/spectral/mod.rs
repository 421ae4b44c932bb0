//! Hermite-basis realisation of operators with polynomial symbols.
//!
//! `Op(p)` for `p = sum c x^beta xi^alpha` acts as `sum c x^beta D^alpha`,
//! `D = -i d/dx`, and both `x_j` and `D_j` are two-term ladder operators on
//! the Hermite functions, so truncated matrices are exact up to round-off.
//! The harmonic oscillator `H = -Laplacian + |x|^2` is diagonal with
//! eigenvalues `2|alpha| + n`, which gives the Shubin Sobolev norms.

mod fft;
mod grid;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::fit::least_squares;
use crate::symbols::{multi_indices, PolySymbol};

pub use fft::{fft2_in_place, fft_in_place};
pub use grid::{apply_grid, sg_sobolev_norm_grid, GridApplication, GridFunction, ALIASING_THRESHOLD};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("cutoff K = {k} is below the symbol degree {deg}")]
    CutoffTooSmall { k: u32, deg: u32 },
    #[error("dimension or cutoff mismatch: {0}")]
    Mismatch(&'static str),
    #[error("truncated system is rank deficient (|R_ii| ratio {ratio:.3e} below tol {tol:.1e})")]
    RankDeficient { ratio: f64, tol: f64 },
    #[error("grid size {0} is not a power of two")]
    GridSize(usize),
    #[error("grid quantization supports n = 1, 2 (got n = {0})")]
    GridDimension(usize),
}

/// Multi-indices `|alpha| <= K` in graded order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteBasis {
    dim_n: usize,
    cutoff: u32,
    indices: Vec<Vec<u32>>,
    lookup: BTreeMap<Vec<u32>, usize>,
}

impl HermiteBasis {
    pub fn new(dim_n: usize, cutoff: u32) -> Self {
        let indices = multi_indices(dim_n, cutoff);
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k))
            .collect();
        HermiteBasis {
            dim_n,
            cutoff,
            indices,
            lookup,
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn multi_index(&self, k: usize) -> &[u32] {
        &self.indices[k]
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }
}

/// Hermite coefficients `c_alpha`, `|alpha| <= K`, in the graded order of
/// [`HermiteBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    dim_n: usize,
    cutoff: u32,
    coeffs: Vec<Complex64>,
}

impl CoeffVector {
    pub fn zeros(dim_n: usize, cutoff: u32) -> Self {
        let len = HermiteBasis::new(dim_n, cutoff).len();
        CoeffVector {
            dim_n,
            cutoff,
            coeffs: alloc::vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Coefficients given in graded order; the length must match the basis.
    pub fn from_coeffs(dim_n: usize, cutoff: u32, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if HermiteBasis::new(dim_n, cutoff).len() != coeffs.len() {
            return Err(SpectralError::Mismatch("coefficient count does not match the basis"));
        }
        Ok(CoeffVector { dim_n, cutoff, coeffs })
    }

    pub fn from_fn(basis: &HermiteBasis, f: impl Fn(&[u32]) -> Complex64) -> Self {
        CoeffVector {
            dim_n: basis.dim_n,
            cutoff: basis.cutoff,
            coeffs: basis.indices.iter().map(|a| f(a)).collect(),
        }
    }

    /// The basis vector `h_alpha`.
    pub fn hermite(dim_n: usize, cutoff: u32, alpha: &[u32]) -> Result<Self, SpectralError> {
        let basis = HermiteBasis::new(dim_n, cutoff);
        let k = basis
            .index(alpha)
            .ok_or(SpectralError::Mismatch("multi-index outside the cutoff"))?;
        let mut v = CoeffVector::zeros(dim_n, cutoff);
        v.coeffs[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn basis(&self) -> HermiteBasis {
        HermiteBasis::new(self.dim_n, self.cutoff)
    }

    pub fn get(&self, alpha: &[u32]) -> Complex64 {
        self.basis()
            .index(alpha)
            .map_or(Complex64::new(0.0, 0.0), |k| self.coeffs[k])
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.coeffs.iter().map(|c| c.norm_sqr()).sum())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CoeffVector {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &CoeffVector) -> Result<Self, SpectralError> {
        if self.dim_n != other.dim_n || self.cutoff != other.cutoff {
            return Err(SpectralError::Mismatch("vectors over different bases"));
        }
        Ok(CoeffVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &CoeffVector) -> Result<Self, SpectralError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Same coefficients on a basis with a different cutoff (dropping or
    /// zero-filling).
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        let src = self.basis();
        let dst = HermiteBasis::new(self.dim_n, cutoff);
        CoeffVector::from_fn(&dst, |a| {
            src.index(a).map_or(Complex64::new(0.0, 0.0), |k| self.coeffs[k])
        })
    }
}

/// Sparse matrix of `Op(p)` on `span{h_alpha : |alpha| <= K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim_n: usize,
    cutoff: u32,
    bandwidth: u32,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl OperatorMatrix {
    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn bandwidth(&self) -> u32 {
        self.bandwidth
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    pub fn apply(&self, u: &CoeffVector) -> Result<CoeffVector, SpectralError> {
        if u.dim_n != self.dim_n || u.cutoff != self.cutoff {
            return Err(SpectralError::Mismatch("vector and matrix over different bases"));
        }
        let coeffs = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(j, v)| v * u.coeffs[*j]).sum())
            .collect();
        Ok(CoeffVector { coeffs, ..u.clone() })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix, SpectralError> {
        if self.dim_n != other.dim_n || self.cutoff != other.cutoff {
            return Err(SpectralError::Mismatch("matrices over different bases"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut m: BTreeMap<usize, Complex64> = BTreeMap::new();
                for (j, v) in a.iter().chain(b.iter()) {
                    *m.entry(*j).or_insert(Complex64::new(0.0, 0.0)) += v;
                }
                m.into_iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect()
            })
            .collect();
        Ok(OperatorMatrix {
            rows,
            bandwidth: self.bandwidth.max(other.bandwidth),
            ..self.clone()
        })
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.size();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                m[(i, *j)] = *v;
            }
        }
        m
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                worst = worst.max((v - self.get(*j, i).conj()).norm());
            }
        }
        worst
    }
}

type Sparse = BTreeMap<Vec<u32>, Complex64>;

/// `x_j` (`derivative = false`) or `D_j = -i d/dx_j` on a sparse expansion.
fn ladder(v: &Sparse, j: usize, derivative: bool) -> Sparse {
    let mut out = Sparse::new();
    for (alpha, c) in v {
        let a = alpha[j] as f64;
        let up = libm::sqrt((a + 1.0) / 2.0);
        let down = libm::sqrt(a / 2.0);
        // x h_a = down h_{a-1} + up h_{a+1};  d h_a = down h_{a-1} - up h_{a+1}
        let (cd, cu) = if derivative {
            (Complex64::new(0.0, -down), Complex64::new(0.0, up))
        } else {
            (Complex64::new(down, 0.0), Complex64::new(up, 0.0))
        };
        if alpha[j] > 0 {
            let mut b = alpha.clone();
            b[j] -= 1;
            *out.entry(b).or_insert(Complex64::new(0.0, 0.0)) += c * cd;
        }
        let mut b = alpha.clone();
        b[j] += 1;
        *out.entry(b).or_insert(Complex64::new(0.0, 0.0)) += c * cu;
    }
    out
}

/// `x^beta D^alpha` applied to `h_start`: all `D` factors first.
fn apply_monomial(start: &[u32], beta: &[u32], alpha: &[u32]) -> Sparse {
    let mut v = Sparse::new();
    v.insert(start.to_vec(), Complex64::new(1.0, 0.0));
    for (j, &a) in alpha.iter().enumerate() {
        for _ in 0..a {
            v = ladder(&v, j, true);
        }
    }
    for (j, &b) in beta.iter().enumerate() {
        for _ in 0..b {
            v = ladder(&v, j, false);
        }
    }
    v
}

/// Matrix of `Op(p)` restricted to `|alpha| <= K`. Images are computed
/// exactly on `|alpha| <= K + deg p` before the rows are truncated.
pub fn hermite_matrix(p: &PolySymbol, k: u32) -> Result<OperatorMatrix, SpectralError> {
    let deg = p.total_degree().unwrap_or(0);
    if k < deg {
        return Err(SpectralError::CutoffTooSmall { k, deg });
    }
    let n = p.dim_n();
    let basis = HermiteBasis::new(n, k);
    let mut rows: Vec<BTreeMap<usize, Complex64>> = alloc::vec![BTreeMap::new(); basis.len()];
    for (col, start) in basis.indices.iter().enumerate() {
        for (m, c) in p.terms() {
            for (alpha, v) in apply_monomial(start, m.beta(), m.alpha()) {
                if let Some(row) = basis.index(&alpha) {
                    *rows[row].entry(col).or_insert(Complex64::new(0.0, 0.0)) += c * v;
                }
            }
        }
    }
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect())
        .collect();
    Ok(OperatorMatrix {
        dim_n: n,
        cutoff: k,
        bandwidth: deg,
        rows,
    })
}

/// `(sum (2|alpha| + n + 1)^s |c_alpha|^2)^(1/2)`, i.e. `||(1+H)^(s/2) u||`.
pub fn sobolev_norm_shubin(u: &CoeffVector, s: f64) -> f64 {
    let n = u.dim_n as f64;
    let basis = u.basis();
    let sum: f64 = basis
        .indices
        .iter()
        .zip(&u.coeffs)
        .map(|(a, c)| {
            let lam = 2.0 * a.iter().sum::<u32>() as f64 + n + 1.0;
            libm::pow(lam, s) * c.norm_sqr()
        })
        .sum();
    libm::sqrt(sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSolution {
    pub u: CoeffVector,
    pub residual: f64,
    /// `min |R_ii| / max |R_ii|` of the QR factor.
    pub diag_ratio: f64,
}

/// Dense QR least-squares solve of the truncated system `A u = f`.
pub fn galerkin_solve(a: &OperatorMatrix, f: &CoeffVector, tol: f64) -> Result<GalerkinSolution, SpectralError> {
    if f.dim_n != a.dim_n || f.cutoff != a.cutoff {
        return Err(SpectralError::Mismatch("right-hand side and matrix over different bases"));
    }
    let n = a.size();
    let dense = a.to_dense();
    let qr = dense.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].norm()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if dmax > 0.0 { dmin / dmax } else { 0.0 };
    if ratio <= tol {
        return Err(SpectralError::RankDeficient { ratio, tol });
    }
    let rhs = DVector::from_column_slice(&f.coeffs);
    let qtb = qr.q().ad_mul(&rhs);
    let sol = r
        .solve_upper_triangular(&qtb)
        .ok_or(SpectralError::RankDeficient { ratio, tol })?;
    let res = &dense * &sol - &rhs;
    let residual = libm::sqrt(res.iter().map(|c| c.norm_sqr()).sum());
    Ok(GalerkinSolution {
        u: CoeffVector {
            coeffs: sol.iter().copied().collect(),
            ..f.clone()
        },
        residual,
        diag_ratio: ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityConfig {
    pub s_max: f64,
    /// Coefficients below `noise_floor * max |c|` count as zero.
    pub noise_floor: f64,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        RegularityConfig {
            s_max: 10.0,
            noise_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularityClass {
    SchwartzLike,
    FiniteOrder,
    NonDecaying,
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegularityClass::SchwartzLike => "schwartz-like",
            RegularityClass::FiniteOrder => "finite-order",
            RegularityClass::NonDecaying => "non-decaying",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub index: f64,
    pub class: RegularityClass,
    /// Slope of `ln e_k(0)` against `ln(2k + n + 1)` on the tail window, or
    /// `None` when the window carries no coefficients above the noise floor.
    pub slope: Option<f64>,
    pub window: (u32, u32),
}

/// Operational Sobolev regularity from the tail `K/2 <= |alpha| < K`.
///
/// With shell energies `e_k(s) = sum_{|alpha| = k} (2k+n+1)^s |c_alpha|^2`,
/// the tail sums converge iff `ln e_k(s)` falls faster than `-ln(2k+n+1)`.
/// The fitted slope `sigma` of `ln e_k(0)` gives the index `-1 - sigma`,
/// clamped to `s_max`.
pub fn regularity_index(u: &CoeffVector, cfg: &RegularityConfig) -> RegularityReport {
    let k = u.cutoff;
    let window = (k / 2, k);
    let n = u.dim_n as f64;
    let cmax = u.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = cfg.noise_floor * cmax;
    let mut shells = alloc::vec![0.0f64; (k + 1) as usize];
    for (a, c) in u.basis().indices.iter().zip(&u.coeffs) {
        if c.norm() > floor {
            shells[a.iter().sum::<u32>() as usize] += c.norm_sqr();
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (window.0..window.1)
        .filter(|d| shells[*d as usize] > 0.0)
        .map(|d| (libm::log(2.0 * d as f64 + n + 1.0), libm::log(shells[d as usize])))
        .unzip();
    let slope = if cmax == 0.0 || xs.len() < 2 {
        None
    } else {
        least_squares(&xs, &ys).map(|f| f.slope)
    };
    let index = match slope {
        None => cfg.s_max,
        Some(sigma) => (-1.0 - sigma).min(cfg.s_max),
    };
    let class = if index >= cfg.s_max {
        RegularityClass::SchwartzLike
    } else if index < 0.0 {
        RegularityClass::NonDecaying
    } else {
        RegularityClass::FiniteOrder
    };
    RegularityReport {
        index,
        class,
        slope,
        window,
    }
}

/// Normalised Hermite functions `h_0..=h_k` at `x`.
pub fn hermite_functions(x: f64, k: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(k + 1);
    h.push(libm::pow(core::f64::consts::PI, -0.25) * libm::exp(-0.5 * x * x));
    if k >= 1 {
        h.push(core::f64::consts::SQRT_2 * x * h[0]);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = libm::sqrt(2.0 / (jf + 1.0)) * x * h[j] - libm::sqrt(jf / (jf + 1.0)) * h[j - 1];
        h.push(next);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    fn sym(s: &str) -> PolySymbol {
        parse_symbol(s, Some(1)).unwrap()
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    /// Trapezoid quadrature of `int f(x) h_j(x) h_k(x) dx` on [-30, 30].
    fn quad(j: usize, k: usize, f: impl Fn(f64) -> f64) -> f64 {
        let m = 60_000;
        let dx = 60.0 / m as f64;
        (0..=m)
            .map(|i| {
                let x = -30.0 + i as f64 * dx;
                let h = hermite_functions(x, j.max(k));
                f(x) * h[j] * h[k] * dx
            })
            .sum()
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        for (j, k) in [(0, 0), (3, 3), (2, 5), (7, 7)] {
            let v = quad(j, k, |_| 1.0);
            assert!((v - if j == k { 1.0 } else { 0.0 }).abs() < 1e-12, "{} {} {}", j, k, v);
        }
    }

    #[test]
    fn harmonic_oscillator_is_diagonal() {
        let m = hermite_matrix(&sym("xi^2 + x^2"), 64).unwrap();
        for i in 0..m.size() {
            for j in 0..m.size() {
                let want = if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
                assert!((m.get(i, j) - re(want)).norm() < 1e-10);
            }
        }
        let m = hermite_matrix(&sym("1 + xi^2 + x^2"), 8).unwrap();
        assert_eq!(m.get(0, 0), re(2.0));
    }

    #[test]
    fn position_matrix_matches_quadrature() {
        let m = hermite_matrix(&sym("x"), 12).unwrap();
        for k in 0..10 {
            let want = libm::sqrt((k as f64 + 1.0) / 2.0);
            assert!((m.get(k, k + 1) - re(want)).norm() < 1e-14);
            assert!((m.get(k + 1, k) - re(want)).norm() < 1e-14);
            assert!((quad(k, k + 1, |x| x) - want).abs() < 1e-12);
        }
        let d = hermite_matrix(&sym("xi"), 12).unwrap();
        assert!(d.hermitian_defect() < 1e-14);
        assert!(hermite_matrix(&sym("x^3"), 2).is_err());
    }

    #[test]
    fn sobolev_norm_examples() {
        let h0 = CoeffVector::hermite(1, 8, &[0]).unwrap();
        assert!((sobolev_norm_shubin(&h0, 0.0) - 1.0).abs() < 1e-15);
        assert!((sobolev_norm_shubin(&h0, 2.0) - 2.0).abs() < 1e-15);
        let h1 = CoeffVector::hermite(1, 8, &[1]).unwrap();
        let u = h0.add(&h1).unwrap().scale(re(core::f64::consts::FRAC_1_SQRT_2));
        assert!((sobolev_norm_shubin(&u, 2.0) - libm::sqrt(10.0)).abs() < 1e-14);
    }

    #[test]
    fn galerkin_examples() {
        let a = hermite_matrix(&sym("1 + xi^2 + x^2"), 32).unwrap();
        let f = CoeffVector::hermite(1, 32, &[0]).unwrap();
        let s = galerkin_solve(&a, &f, 1e-12).unwrap();
        assert!((s.u.get(&[0]) - re(0.5)).norm() < 1e-14);
        assert!(s.residual < 1e-12);
        let b = hermite_matrix(&sym("xi^2 + x^2"), 32).unwrap();
        let s = galerkin_solve(&b, &CoeffVector::hermite(1, 32, &[1]).unwrap(), 1e-12).unwrap();
        assert!((s.u.get(&[1]) - re(1.0 / 3.0)).norm() < 1e-14);
        let s = galerkin_solve(&a, &CoeffVector::zeros(1, 32), 1e-12).unwrap();
        assert_eq!(s.u.norm(), 0.0);
        let z = hermite_matrix(&sym("xi^2"), 4).unwrap().add(&hermite_matrix(&sym("-xi^2"), 4).unwrap()).unwrap();
        assert!(matches!(
            galerkin_solve(&z, &CoeffVector::zeros(1, 4), 1e-12),
            Err(SpectralError::RankDeficient { .. })
        ));
    }

    #[test]
    fn regularity_examples() {
        let cfg = RegularityConfig::default();
        let h0 = CoeffVector::hermite(1, 64, &[0]).unwrap();
        assert_eq!(regularity_index(&h0, &cfg).class, RegularityClass::SchwartzLike);

        let basis = HermiteBasis::new(1, 256);
        let u = CoeffVector::from_fn(&basis, |a| re(libm::pow(2.0 * a[0] as f64 + 2.0, -2.0)));
        let r = regularity_index(&u, &cfg);
        assert_eq!(r.class, RegularityClass::FiniteOrder);
        assert!((r.index - 3.0).abs() < 0.5, "{}", r.index);

        let flat = CoeffVector::from_fn(&basis, |_| re(1.0 / libm::sqrt(257.0)));
        let r = regularity_index(&flat, &cfg);
        assert_eq!(r.class, RegularityClass::NonDecaying);
    }

    #[test]
    fn two_dimensional_oscillator() {
        let p = parse_symbol("xi1^2 + xi2^2 + x1^2 + x2^2", None).unwrap();
        let m = hermite_matrix(&p, 10).unwrap();
        let basis = HermiteBasis::new(2, 10);
        for (i, a) in basis.indices().iter().enumerate() {
            let want = 2.0 * (a[0] + a[1]) as f64 + 2.0;
            assert!((m.get(i, i) - re(want)).norm() < 1e-12);
            assert_eq!(m.row(i).len(), 1);
        }
    }
}
