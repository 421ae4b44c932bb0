use hypo_core::weights::{epsilon_gain, planck, Comparison, WeightExpr};
use hypo_core::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quarter() -> impl Strategy<Value = Rational> {
    (-12i64..=12).prop_map(|k| Rational::new(k, 4))
}

fn weight(n: usize) -> impl Strategy<Value = WeightExpr> {
    (quarter(), quarter(), quarter()).prop_map(move |(a, b, c)| WeightExpr::new(n, a, b, c))
}

fn point(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-50.0f64..50.0, n),
        prop::collection::vec(-50.0f64..50.0, n),
    )
}

/// Slopes of `ln(w1/w2)` between `|z| = 2^10` and `2^20` along the two axes,
/// the diagonal, and a few mixed directions.
fn oracle(w1: &WeightExpr, w2: &WeightExpr, rng: &mut ChaCha8Rng) -> Comparison {
    let mut dirs = vec![(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    for _ in 0..4 {
        let t: f64 = rng.random_range(0.2..1.4);
        dirs.push((t.cos(), t.sin()));
    }
    let (r0, r1) = (2f64.powi(10), 2f64.powi(20));
    let mut slopes = Vec::new();
    for (cx, cy) in dirs {
        let at = |r: f64| {
            let (x, xi) = ([cx * r], [cy * r]);
            (w1.eval(&x, &xi).unwrap() / w2.eval(&x, &xi).unwrap()).ln()
        };
        slopes.push((at(r1) - at(r0)) / (r1.ln() - r0.ln()));
    }
    let tol = 0.05;
    let le = slopes.iter().all(|s| *s <= tol);
    let ge = slopes.iter().all(|s| *s >= -tol);
    match (le, ge) {
        (true, true) => Comparison::Eq,
        (true, false) => Comparison::Le,
        (false, true) => Comparison::Ge,
        _ => Comparison::Incomparable,
    }
}

#[test]
fn compare_matches_ray_oracle_on_seeded_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q = |rng: &mut ChaCha8Rng| Rational::new(rng.random_range(-12..=12), 4);
    for _ in 0..500 {
        let w1 = WeightExpr::new(1, q(&mut rng), q(&mut rng), q(&mut rng));
        let w2 = WeightExpr::new(1, q(&mut rng), q(&mut rng), q(&mut rng));
        assert_eq!(w1.compare(&w2).unwrap(), oracle(&w1, &w2, &mut rng), "{} vs {}", w1, w2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn planck_is_pointwise_reciprocal(
        a in 0i64..=4, b in 0i64..=4, (x, xi) in point(2)
    ) {
        let phi = WeightExpr::x(2, Rational::new(a, 4));
        let psi = WeightExpr::xi(2, Rational::new(b, 4)) * WeightExpr::z(2, Rational::new(4 - b.max(a), 4));
        let h = planck(&phi, &psi).unwrap();
        let want = 1.0 / (phi.eval(&x, &xi).unwrap() * psi.eval(&x, &xi).unwrap());
        prop_assert!((h.eval(&x, &xi).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn temperance_bounds_hold(w in weight(1), (x, xi) in point(1), (tx, txi) in point(1)) {
        let s = w.temperance_exponent();
        let s = s.numer().abs() as f64 / *s.denom() as f64;
        let shifted = w.eval(&[x[0] + tx[0]], &[xi[0] + txi[0]]).unwrap();
        let base = w.eval(&x, &xi).unwrap();
        let bracket = (1.0 + tx[0] * tx[0] + txi[0] * txi[0]).sqrt();
        let bound = 2f64.powf(s / 2.0) * bracket.powf(s);
        prop_assert!(shifted <= base * bound * (1.0 + 1e-9));
        prop_assert!(shifted >= base / bound * (1.0 - 1e-9));
    }

    #[test]
    fn compare_is_antisymmetric(w1 in weight(2), w2 in weight(2)) {
        let ab = w1.compare(&w2).unwrap();
        let ba = w2.compare(&w1).unwrap();
        let flipped = match ab {
            Comparison::Le => Comparison::Ge,
            Comparison::Ge => Comparison::Le,
            other => other,
        };
        prop_assert_eq!(ba, flipped);
        prop_assert_eq!(w1.compare(&w1).unwrap(), Comparison::Eq);
    }

    #[test]
    fn epsilon_gain_is_maximal(m0 in weight(1), mt in weight(1), c in 1i64..=8) {
        let h = WeightExpr::z(1, Rational::new(-c, 4));
        if let Some(eps) = epsilon_gain(&m0, &mt, &h).unwrap() {
            prop_assert!(eps > Rational::from_integer(0));
            let ratio = m0.clone() / mt.clone();
            prop_assert!(h.pow(-eps).compare(&ratio).unwrap().is_le());
            let more = eps + Rational::new(1, 64);
            prop_assert!(!h.pow(-more).compare(&ratio).unwrap().is_le());
        } else {
            let ratio = (m0 / mt).ray_orders();
            prop_assert!(ratio.min() <= Rational::from_integer(0));
        }
    }

    #[test]
    fn display_round_trips(w in weight(2)) {
        let text = format!("{}", w);
        prop_assert_eq!(hypo_core::weights::parse_weight(&text, 2).unwrap(), w);
    }
}
