use hypo_core::spectral::{
    apply_grid, hermite_matrix, regularity_index, sobolev_norm_shubin, CoeffVector, GridFunction, HermiteBasis,
    RegularityClass, RegularityConfig,
};
use hypo_core::symbols::{parse_symbol, Monomial, PolySymbol};
use hypo_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_low(rng: &mut ChaCha8Rng, cutoff: u32) -> CoeffVector {
    let mut u = CoeffVector::zeros(1, cutoff);
    for c in u.coeffs_mut().iter_mut().take(9) {
        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    u
}

fn random_full(rng: &mut ChaCha8Rng, cutoff: u32) -> CoeffVector {
    let mut u = CoeffVector::zeros(1, cutoff);
    for c in u.coeffs_mut() {
        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    u
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (d / s.max(1e-300)).sqrt()
}

#[test]
fn grid_and_matrix_applications_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (k, half_width, points, interior) = (128u32, 12.0, 512usize, 64u32);
    for text in ["x^2", "xi^2", "x*xi", "x^2*xi^2"] {
        let p = parse_symbol(text, Some(1)).unwrap();
        for _ in 0..3 {
            let u = random_low(&mut rng, k);
            let by_matrix = hermite_matrix(&p, k).unwrap().apply(&u).unwrap().with_cutoff(interior);
            let g = GridFunction::from_hermite(&u, half_width, points).unwrap();
            let app = apply_grid(&p, &g).unwrap();
            assert!(!app.aliasing, "{}: aliasing flagged", text);
            let by_grid = app.result.to_hermite(interior);
            let err = rel_l2(by_grid.coeffs(), by_matrix.coeffs());
            assert!(err <= 1e-6, "{}: relative error {:e}", text, err);
        }
    }
}

#[test]
fn grid_projection_recovers_coefficients_in_two_dimensions() {
    let basis = HermiteBasis::new(2, 6);
    let u = CoeffVector::from_fn(&basis, |a| Complex64::new(1.0 / (1 + a[0] + 2 * a[1]) as f64, a[1] as f64 * 0.1));
    let g = GridFunction::from_hermite(&u, 10.0, 64).unwrap();
    let back = g.to_hermite(6);
    assert!(rel_l2(back.coeffs(), u.coeffs()) <= 1e-10);
}

#[test]
fn mixed_even_symbols_need_not_be_hermitian() {
    let p = parse_symbol("x^2*xi^2", Some(1)).unwrap();
    assert!(hermite_matrix(&p, 20).unwrap().hermitian_defect() > 1.0);
}

fn max_ratio(p: &PolySymbol, m: f64, s: f64, k: u32, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = hermite_matrix(p, k).unwrap();
    (0..100)
        .map(|_| {
            let u = random_full(&mut rng, k);
            sobolev_norm_shubin(&a.apply(&u).unwrap(), s - m) / sobolev_norm_shubin(&u, s)
        })
        .fold(0.0, f64::max)
}

#[test]
fn shubin_sobolev_boundedness_probe() {
    for (text, m) in [("xi^2 + x^2", 2.0), ("x^4 + xi^2 + x", 4.0), ("x*xi + 3", 2.0), ("x^2*xi^2", 4.0)] {
        let p = parse_symbol(text, Some(1)).unwrap();
        for s in [-1.0, 0.0, 1.5] {
            let small = max_ratio(&p, m, s, 128, 5);
            let big = max_ratio(&p, m, s, 256, 5);
            assert!(small.is_finite() && small > 0.0);
            assert!(big <= small * 1.05, "{} s = {}: {} -> {}", text, s, small, big);
        }
    }
}

#[test]
fn regularity_index_of_power_law_tail() {
    // |c_k| = (2k+2)^(-a) gives e_k(0) = (2k+2)^(-2a), so the index is 2a - 1.
    for a in [1.0, 2.0, 3.0] {
        let basis = HermiteBasis::new(1, 200);
        let u = CoeffVector::from_fn(&basis, |al| Complex64::new((2.0 * al[0] as f64 + 2.0).powf(-a), 0.0));
        let r = regularity_index(&u, &RegularityConfig::default());
        assert!((r.index - (2.0 * a - 1.0)).abs() < 1e-9, "a = {}: {}", a, r.index);
        assert_eq!(r.class, RegularityClass::FiniteOrder);
    }
}

fn real_poly() -> impl Strategy<Value = PolySymbol> {
    (prop::collection::vec(-3i64..=3, 5), prop::collection::vec(-3i64..=3, 3)).prop_map(|(fx, gxi)| {
        let mut p = PolySymbol::zero(1);
        for (j, c) in fx.into_iter().enumerate() {
            p.add_term(Monomial::new(&[j as u32], &[0]), Complex64::new(c as f64, 0.0));
        }
        for (j, c) in gxi.into_iter().enumerate() {
            p.add_term(Monomial::new(&[0], &[2 * j as u32 + 2]), Complex64::new(c as f64, 0.0));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separable_even_real_symbols_are_hermitian(p in real_poly()) {
        let a = hermite_matrix(&p, 48).unwrap();
        let scale = a.to_dense().iter().map(|c| c.norm()).fold(1.0, f64::max);
        prop_assert!(a.hermitian_defect() <= 1e-12 * scale);
    }

    #[test]
    fn oscillator_powers_compose(
        seed in 0u64..1000, s in -4.0f64..4.0, t in -4.0f64..4.0, dim in 1usize..=2
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = HermiteBasis::new(dim, 20);
        let coeffs = (0..basis.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        let u = CoeffVector::from_coeffs(dim, 20, coeffs).unwrap();
        let n = dim as f64;
        let scaled = CoeffVector::from_fn(&basis, |a| {
            let k: u32 = a.iter().sum();
            u.get(a) * (2.0 * k as f64 + n + 1.0).powf(t / 2.0)
        });
        let direct = sobolev_norm_shubin(&u, s + t);
        let composed = sobolev_norm_shubin(&scaled, s);
        prop_assert!((direct - composed).abs() <= 1e-12 * direct);
    }
}
