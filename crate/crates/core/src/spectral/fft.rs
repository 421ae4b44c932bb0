//! Iterative radix-2 FFT on `Complex64` buffers.

use num_complex::Complex64;

/// In-place DFT `X_k = sum_j x_j e^{-2 pi i jk/N}` (or the unnormalised
/// inverse when `inverse` is set). `data.len()` must be a power of two.
pub fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = Complex64::new(libm::cos(ang * k as f64), libm::sin(ang * k as f64));
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Forward transform along both axes of a row-major `g x g` array.
pub fn fft2_in_place(data: &mut [Complex64], g: usize, inverse: bool) {
    for row in data.chunks_mut(g) {
        fft_in_place(row, inverse);
    }
    let mut col = alloc::vec![Complex64::new(0.0, 0.0); g];
    for c in 0..g {
        for r in 0..g {
            col[r] = data[r * g + c];
        }
        fft_in_place(&mut col, inverse);
        for r in 0..g {
            data[r * g + c] = col[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let a = -2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(libm::cos(a), libm::sin(a))
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut y = x.clone();
        fft_in_place(&mut y, false);
        for (a, b) in y.iter().zip(naive(&x)) {
            assert!((a - b).norm() < 1e-11);
        }
        fft_in_place(&mut y, true);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 64.0 - b).norm() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = 16;
        let x: Vec<Complex64> = (0..g * g)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let mut y = x.clone();
        fft2_in_place(&mut y, g, false);
        fft2_in_place(&mut y, g, true);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / (g * g) as f64 - b).norm() < 1e-13);
        }
    }
}
