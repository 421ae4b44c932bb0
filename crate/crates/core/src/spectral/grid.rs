//! Pseudospectral quantization on a uniform periodic grid, used as an
//! independent check of the Hermite matrices and for SG-weighted norms.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::{fft2_in_place, fft_in_place};
use super::{hermite_functions, CoeffVector, SpectralError};
use crate::symbols::PolySymbol;

/// Spectral energy fraction in the outer quarter of the frequency band above
/// which a grid operation is flagged as possibly aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

/// Samples on `[-L, L)^n`, `n <= 2`, with `G` points per axis (row-major,
/// first axis slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim_n: usize,
    half_width: f64,
    points: usize,
    samples: Vec<Complex64>,
}

impl GridFunction {
    fn check(dim_n: usize, points: usize) -> Result<(), SpectralError> {
        if dim_n == 0 || dim_n > 2 {
            return Err(SpectralError::GridDimension(dim_n));
        }
        if !points.is_power_of_two() || points < 2 {
            return Err(SpectralError::GridSize(points));
        }
        Ok(())
    }

    pub fn zeros(dim_n: usize, half_width: f64, points: usize) -> Result<Self, SpectralError> {
        Self::check(dim_n, points)?;
        Ok(GridFunction {
            dim_n,
            half_width,
            points,
            samples: alloc::vec![Complex64::new(0.0, 0.0); points.pow(dim_n as u32)],
        })
    }

    pub fn from_fn(
        dim_n: usize,
        half_width: f64,
        points: usize,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self, SpectralError> {
        let mut g = Self::zeros(dim_n, half_width, points)?;
        let mut x = alloc::vec![0.0; dim_n];
        for idx in 0..g.samples.len() {
            g.point_into(idx, &mut x);
            g.samples[idx] = f(&x);
        }
        Ok(g)
    }

    /// `sum c_alpha h_alpha` sampled on the grid.
    pub fn from_hermite(u: &CoeffVector, half_width: f64, points: usize) -> Result<Self, SpectralError> {
        let n = u.dim_n();
        let mut g = Self::zeros(n, half_width, points)?;
        let k = u.cutoff() as usize;
        let table: Vec<Vec<f64>> = (0..points).map(|i| hermite_functions(g.coord(i), k)).collect();
        let basis = u.basis();
        for (a, c) in basis.indices().iter().zip(u.coeffs()) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if n == 1 {
                for (i, s) in g.samples.iter_mut().enumerate() {
                    *s += c * table[i][a[0] as usize];
                }
            } else {
                for (i, ri) in table.iter().enumerate() {
                    let hi = ri[a[0] as usize];
                    for (j, rj) in table.iter().enumerate() {
                        g.samples[i * points + j] += c * (hi * rj[a[1] as usize]);
                    }
                }
            }
        }
        Ok(g)
    }

    /// Hermite coefficients `<u, h_alpha>` for `|alpha| <= cutoff` by the
    /// grid quadrature.
    pub fn to_hermite(&self, cutoff: u32) -> CoeffVector {
        let n = self.dim_n;
        let k = cutoff as usize;
        let table: Vec<Vec<f64>> = (0..self.points).map(|i| hermite_functions(self.coord(i), k)).collect();
        let w = libm::pow(self.spacing(), n as f64);
        let g = self.points;
        let basis = super::HermiteBasis::new(n, cutoff);
        CoeffVector::from_fn(&basis, |a| {
            let mut acc = Complex64::new(0.0, 0.0);
            if n == 1 {
                for (i, s) in self.samples.iter().enumerate() {
                    acc += s * table[i][a[0] as usize];
                }
            } else {
                for (i, ri) in table.iter().enumerate() {
                    let hi = ri[a[0] as usize];
                    for (j, rj) in table.iter().enumerate() {
                        acc += self.samples[i * g + j] * (hi * rj[a[1] as usize]);
                    }
                }
            }
            acc * w
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    fn point_into(&self, idx: usize, x: &mut [f64]) {
        if self.dim_n == 1 {
            x[0] = self.coord(idx);
        } else {
            x[0] = self.coord(idx / self.points);
            x[1] = self.coord(idx % self.points);
        }
    }

    /// Point coordinates of sample `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut x = alloc::vec![0.0; self.dim_n];
        self.point_into(idx, &mut x);
        x
    }

    /// Discrete `L^2` norm `(sum |u|^2 dx^n)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let w = libm::pow(self.spacing(), self.dim_n as f64);
        libm::sqrt(self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * w)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction, SpectralError> {
        if self.dim_n != other.dim_n || self.points != other.points || self.half_width != other.half_width {
            return Err(SpectralError::Mismatch("grid functions on different grids"));
        }
        Ok(GridFunction {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
            ..self.clone()
        })
    }

    fn frequency(&self, k: usize) -> f64 {
        let g = self.points as i64;
        let kk = if (k as i64) < g / 2 { k as i64 } else { k as i64 - g };
        core::f64::consts::PI * kk as f64 / self.half_width
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        if self.dim_n == 1 {
            fft_in_place(data, inverse);
        } else {
            fft2_in_place(data, self.points, inverse);
        }
        if inverse {
            let scale = 1.0 / data.len() as f64;
            for v in data.iter_mut() {
                *v *= scale;
            }
        }
    }

    /// Frequencies of spectral slot `idx`.
    fn frequencies(&self, idx: usize) -> (f64, f64) {
        if self.dim_n == 1 {
            (self.frequency(idx), 0.0)
        } else {
            (self.frequency(idx / self.points), self.frequency(idx % self.points))
        }
    }

    fn top_band(&self, idx: usize) -> bool {
        let g = self.points as i64;
        let fold = |k: usize| {
            let k = k as i64;
            if k < g / 2 {
                k
            } else {
                g - k
            }
        };
        let edge = 3 * g / 8;
        if self.dim_n == 1 {
            fold(idx) > edge
        } else {
            fold(idx / self.points) > edge || fold(idx % self.points) > edge
        }
    }

    /// Share of spectral energy in the outer quarter of the frequency band.
    pub fn top_frequency_fraction(&self) -> f64 {
        let mut spec = self.samples.clone();
        self.transform(&mut spec, false);
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let top: f64 = spec
            .iter()
            .enumerate()
            .filter(|(i, _)| self.top_band(*i))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        top / total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridApplication {
    pub result: GridFunction,
    pub top_fraction: f64,
    pub aliasing: bool,
}

/// Left quantization on the grid: for each monomial `x^beta xi^alpha`,
/// multiply the DFT by `xi^alpha`, transform back, then multiply by `x^beta`.
pub fn apply_grid(p: &PolySymbol, u: &GridFunction) -> Result<GridApplication, SpectralError> {
    if p.dim_n() != u.dim_n {
        return Err(SpectralError::Mismatch("symbol and grid function dimensions differ"));
    }
    let mut spec = u.samples.clone();
    u.transform(&mut spec, false);
    let top_fraction = u.top_frequency_fraction();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); u.samples.len()];
    let mut x = alloc::vec![0.0; u.dim_n];
    let mut last_alpha: Option<Vec<u32>> = None;
    let mut da = Vec::new();
    for (m, c) in p.terms() {
        let alpha = m.alpha();
        if last_alpha.as_deref() != Some(alpha) {
            da = spec
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let (f0, f1) = u.frequencies(i);
                    let mut w = libm::pow(f0, alpha[0] as f64);
                    if u.dim_n == 2 {
                        w *= libm::pow(f1, alpha[1] as f64);
                    }
                    v * w
                })
                .collect();
            u.transform(&mut da, true);
            last_alpha = Some(alpha.to_vec());
        }
        let beta = m.beta();
        for (idx, o) in out.iter_mut().enumerate() {
            u.point_into(idx, &mut x);
            let mut w = 1.0;
            for (xj, bj) in x.iter().zip(beta) {
                w *= libm::pow(*xj, *bj as f64);
            }
            *o += c * da[idx] * w;
        }
    }
    Ok(GridApplication {
        result: GridFunction {
            samples: out,
            ..u.clone()
        },
        top_fraction,
        aliasing: top_fraction > ALIASING_THRESHOLD,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNorm {
    pub value: f64,
    pub top_fraction: f64,
    pub aliasing: bool,
}

/// Discrete `L^2` norm of `<x>^s2 Op(<xi>^s1) u` on the grid.
pub fn sg_sobolev_norm_grid(u: &GridFunction, s: (f64, f64)) -> GridNorm {
    let mut spec = u.samples.clone();
    u.transform(&mut spec, false);
    for (i, v) in spec.iter_mut().enumerate() {
        let (f0, f1) = u.frequencies(i);
        *v *= libm::pow(1.0 + f0 * f0 + f1 * f1, s.0 / 2.0);
    }
    u.transform(&mut spec, true);
    let mut x = alloc::vec![0.0; u.dim_n];
    for (idx, v) in spec.iter_mut().enumerate() {
        u.point_into(idx, &mut x);
        let sq: f64 = x.iter().map(|t| t * t).sum();
        *v *= libm::pow(1.0 + sq, s.1 / 2.0);
    }
    let w = libm::pow(u.spacing(), u.dim_n as f64);
    let top_fraction = u.top_frequency_fraction();
    GridNorm {
        value: libm::sqrt(spec.iter().map(|c| c.norm_sqr()).sum::<f64>() * w),
        top_fraction,
        aliasing: top_fraction > ALIASING_THRESHOLD,
    }
}
