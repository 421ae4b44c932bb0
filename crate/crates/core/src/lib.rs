//! Computational toolkit for global pseudo-differential operators on `R^n`.
//!
//! * [`weights`]: the `<x>^a <xi>^b <z>^c` weight algebra, Planck functions and
//!   the strong uncertainty principle.
//! * [`symbols`]: exact polynomial and rational symbols in `(x, xi)`.
//! * [`certify`]: sampled certificates (or refutations with a witness) for
//!   global ellipticity and hypoellipticity in Shubin, SG and lambda settings.
//! * [`calculus`]: left-quantized composition and truncated parametrices.
//! * [`spectral`]: Hermite-basis operator matrices, Shubin Sobolev norms,
//!   Galerkin solves, and a grid quantization used for cross-checks.
//! * [`bootstrap`]: the Sobolev-order recursion behind perturbation
//!   stability.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bootstrap;
pub mod calculus;
pub mod certify;
pub mod fit;
pub mod sampling;
pub mod spectral;
pub mod symbols;
pub mod weights;

/// Exact rational exponents and orders.
pub type Rational = num_rational::Ratio<i64>;

pub use num_complex::Complex64;
