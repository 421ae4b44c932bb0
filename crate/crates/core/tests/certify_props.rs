use hypo_core::certify::{certify_elliptic, certify_gamma_rho_hypo, certify_sg_hypo, Verdict};
use hypo_core::sampling::SamplingConfig;
use hypo_core::symbols::{parse_symbol, PolySymbol};
use hypo_core::weights::WeightExpr;
use hypo_core::{Complex64, Rational};
use proptest::prelude::*;

fn int(k: i64) -> Rational {
    Rational::from_integer(k)
}

fn small_cfg(seed: u64) -> SamplingConfig {
    SamplingConfig {
        dirs_per_shell: 64,
        j_max: 9,
        ..SamplingConfig::for_dimension(1).with_seed(seed)
    }
}

/// `a x^2 + b xi^2 + c x xi + d x + e xi + f` with small integer coefficients.
fn quadratic() -> impl Strategy<Value = PolySymbol> {
    prop::collection::vec(-3i64..=3, 6).prop_map(|c| {
        let text = format!(
            "{}*x^2 + {}*xi^2 + {}*x*xi + {}*x + {}*xi + {}",
            c[0], c[1], c[2], c[3], c[4], c[5]
        );
        parse_symbol(&text, Some(1)).unwrap()
    })
}

fn z(k: i64) -> WeightExpr {
    WeightExpr::z(1, int(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refutations_are_sound(p in quadratic(), seed in 0u64..4) {
        prop_assume!(!p.is_zero());
        let cfg = small_cfg(seed);
        let c = certify_elliptic(&p, &z(2), &z(1), &z(1), &cfg).unwrap();
        if c.verdict == Verdict::Refuted {
            let w = c.witness.unwrap();
            let pv = p.eval(&w.point.x, &w.point.xi).unwrap().norm();
            let m = z(2).eval(&w.point.x, &w.point.xi).unwrap();
            prop_assert!(pv / m < cfg.ratio_floor);
            prop_assert!(w.point.x_norm() + w.point.xi_norm() >= cfg.radius());
        }
    }

    #[test]
    fn elliptic_implies_rho_one_hypo(p in quadratic()) {
        prop_assume!(!p.is_zero());
        let cfg = small_cfg(1);
        let e = certify_elliptic(&p, &z(2), &z(1), &z(1), &cfg).unwrap();
        if e.verdict == Verdict::Certified {
            let h = certify_gamma_rho_hypo(&p, int(2), int(1), &cfg).unwrap();
            prop_assert_eq!(h.verdict, Verdict::Certified, "{} {:?}", p, h.notes);
            prop_assert_eq!(h.m_prime(), Some(int(2)));
        }
    }

    #[test]
    fn verdicts_are_scale_invariant(p in quadratic()) {
        prop_assume!(!p.is_zero());
        let cfg = small_cfg(2);
        let q = p.scale(Complex64::new(5.0, 0.0));
        let a = certify_elliptic(&p, &z(2), &z(1), &z(1), &cfg).unwrap();
        let b = certify_elliptic(&q, &z(2), &z(1), &z(1), &cfg).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.witness.is_some(), b.witness.is_some());
        for (w, s) in [(&a.witness, &p), (&b.witness, &q)] {
            if let Some(w) = w.as_ref().filter(|w| w.derivative.is_none()) {
                let pv = s.eval(&w.point.x, &w.point.xi).unwrap().norm();
                let m = z(2).eval(&w.point.x, &w.point.xi).unwrap();
                prop_assert!(pv / m < cfg.ratio_floor);
            }
        }
        if a.verdict == Verdict::Certified {
            prop_assert!((b.c_lower - 5.0 * a.c_lower).abs() <= 1e-9 * b.c_lower.max(1.0));
        }
    }
}

#[test]
fn certificates_are_deterministic() {
    let p = parse_symbol("xi^2 + x^4 - 3*x", Some(1)).unwrap();
    let cfg = SamplingConfig::for_dimension(1).with_seed(11);
    let a = certify_gamma_rho_hypo(&p, int(2), Rational::new(1, 2), &cfg).unwrap();
    let b = certify_gamma_rho_hypo(&p, int(2), Rational::new(1, 2), &cfg).unwrap();
    assert_eq!(a, b);
    let p2 = parse_symbol("xi1^2 + xi2^2 + x1^2 + x2^2 + 1", None).unwrap();
    let cfg2 = SamplingConfig::for_dimension(2).with_seed(3);
    let z2 = WeightExpr::z(2, int(1));
    let a = certify_elliptic(&p2, &WeightExpr::z(2, int(2)), &z2, &z2, &cfg2).unwrap();
    let b = certify_elliptic(&p2, &WeightExpr::z(2, int(2)), &z2, &z2, &cfg2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.verdict, Verdict::Certified);
}

#[test]
fn rho_monotonicity_on_schroedinger_family() {
    let cfg = SamplingConfig::for_dimension(1);
    for k in 1..=3i64 {
        let p = parse_symbol(&format!("xi^2 + x^{}", 2 * k), Some(1)).unwrap();
        let rho = Rational::new(1, k);
        assert_eq!(certify_gamma_rho_hypo(&p, int(2), rho, &cfg).unwrap().verdict, Verdict::Certified);
        for smaller in [Rational::new(1, k + 1), Rational::new(1, 2 * k), Rational::new(1, 8)] {
            let c = certify_gamma_rho_hypo(&p, int(2), smaller, &cfg).unwrap();
            assert_eq!(c.verdict, Verdict::Certified, "k = {}, rho' = {}", k, smaller);
        }
    }
}

#[test]
fn negative_sg_orders_flip_the_inequality() {
    let cfg = SamplingConfig::for_dimension(1);
    let p = parse_symbol("1", Some(1)).unwrap();
    let c = certify_sg_hypo(&p, (int(-1), int(-1)), (int(0), int(0)), &cfg).unwrap();
    assert_eq!(c.verdict, Verdict::Certified);
    assert!(certify_sg_hypo(&p, (int(-1), int(-1)), (int(-2), int(0)), &cfg).is_err());
}
