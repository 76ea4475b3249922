use oddzeta_core::identities::*;
use oddzeta_core::realseries::{log2_abs, zeta_integer};
use oddzeta_core::{Error, Rational, Real, GUARD_BITS};
use proptest::prelude::*;
use rug::Float;

const GRID_T: [(i64, i64); 4] = [(1, 1), (2, 1), (3, 2), (5, 1)];

fn params(m: u32, t: (i64, i64), prec: u32) -> IdentityParams {
    IdentityParams::new(m, Rational::from(t), prec).unwrap()
}

fn gap(a: &Real, b: &Real) -> f64 {
    let d = Float::with_val(a.prec().max(b.prec()) + 64, a.value() - b.value());
    log2_abs(&d, f64::NEG_INFINITY)
}

#[test]
fn grid_passes_in_both_forms() {
    for m in 1..=8 {
        for t in GRID_T {
            let p = params(m, t, 256);
            let r = verify_ramanujan(&p).unwrap();
            let c = verify_coth_variant(&p).unwrap();
            assert!(
                r.pass && r.abs_diff_log2 <= -192.0,
                "{m} {t:?}: {}",
                r.abs_diff_log2
            );
            assert!(
                c.pass && c.abs_diff_log2 <= -192.0,
                "{m} {t:?}: {}",
                c.abs_diff_log2
            );
            assert!(r.internal_checks_hold(), "{:?}", r.internal_checks);
            assert!(c.internal_checks_hold(), "{:?}", c.internal_checks);
        }
    }
}

#[test]
fn higher_precision_cell() {
    assert!(verify_ramanujan(&params(3, (1, 1), 512)).unwrap().pass);
}

#[test]
fn error_tracks_precision() {
    let at = |prec| {
        verify_ramanujan(&params(1, (2, 1), prec))
            .unwrap()
            .abs_diff_log2
    };
    assert!(at(256) - at(384) >= 100.0);
    assert!(at(256) - at(512) >= 200.0);
}

#[test]
fn sides_agree_with_each_other_and_with_laurent_form() {
    for m in 1..=6 {
        for t in GRID_T {
            let p = params(m, t, 256);
            let (lhs, truncations) = ramanujan_lhs(&p).unwrap();
            assert!(truncations.iter().all(|t| t.is_certified_for(256)));
            let rhs = ramanujan_rhs(&p).unwrap();
            assert!(gap(&lhs, &rhs) <= -192.0);
            let laurent = ramanujan_rhs_laurent(&p).unwrap();
            let assembled = ramanujan_rhs_assembled(&p).unwrap();
            let ulp = rhs.value().get_exp().map_or(-10_000, |e| e - 256) as f64;
            assert!(
                gap(&rhs, &laurent) <= ulp + 1.0 || gap(&rhs, &laurent) <= -250.0,
                "{m} {t:?}"
            );
            assert!(gap(&rhs, &assembled) <= -240.0, "{m} {t:?}");
        }
    }
}

#[test]
fn even_m_degenerates_at_t_one() {
    for m in [2u32, 4, 6, 8] {
        let p = params(m, (1, 1), 256);
        let tol = -((256 - 2 * GUARD_BITS) as f64);
        let (lhs, _) = ramanujan_lhs(&p).unwrap();
        let rhs = ramanujan_rhs(&p).unwrap();
        assert!(log2_abs(lhs.value(), f64::NEG_INFINITY) <= tol);
        assert!(log2_abs(rhs.value(), f64::NEG_INFINITY) <= tol);
        let c = verify_coth_variant(&p).unwrap();
        assert!(log2_abs(c.lhs.value(), f64::NEG_INFINITY) <= tol);
    }
}

#[test]
fn swapping_t_and_its_inverse() {
    // alpha <-> beta turns the left side into (-1)^(m+1) times itself
    for m in 1..=6u32 {
        for (p, q) in [(2i64, 1i64), (3, 2), (5, 1)] {
            let (la, _) = ramanujan_lhs(&params(m, (p, q), 256)).unwrap();
            let (lb, _) = ramanujan_lhs(&params(m, (q, p), 256)).unwrap();
            let ra = ramanujan_rhs(&params(m, (p, q), 256)).unwrap();
            let rb = ramanujan_rhs(&params(m, (q, p), 256)).unwrap();
            let flipped = if m % 2 == 1 {
                lb.clone()
            } else {
                Real::new(&(-lb.value().clone()), 256).unwrap()
            };
            assert!(gap(&la, &flipped) <= -190.0, "m={m} t={p}/{q}");
            let left = Float::with_val(320, la.value() + lb.value());
            let right = Float::with_val(320, ra.value() + rb.value());
            let d = Float::with_val(320, &left - &right);
            assert!(log2_abs(&d, f64::NEG_INFINITY) <= -190.0);
        }
    }
}

#[test]
fn coth_and_exponential_forms_agree_cell_by_cell() {
    for m in 1..=4 {
        for t in GRID_T {
            let p = params(m, t, 192);
            let r = verify_ramanujan(&p).unwrap();
            let c = verify_coth_variant(&p).unwrap();
            assert_eq!(r.pass, c.pass);
            let doubled = Float::with_val(256, r.lhs.value() * 2u32);
            let d = Float::with_val(256, c.lhs.value() - &doubled);
            assert!(log2_abs(&d, f64::NEG_INFINITY) <= -150.0);
        }
    }
}

#[test]
fn lerch_cases() {
    let r = verify_lerch(0, 512).unwrap();
    assert!(r.pass && r.abs_diff_log2 <= -448.0);
    assert!(verify_lerch(1, 512).unwrap().pass);
    assert!(verify_lerch(2, 256).unwrap().pass);
}

#[test]
fn fast_zeta_against_euler_maclaurin() {
    for (m, prec) in [(0u32, 1024u32), (1, 512), (2, 256), (3, 256)] {
        let (fast, trunc) = fast_odd_zeta(m, prec).unwrap();
        let em = zeta_integer(4 * m as i64 + 3, prec).unwrap();
        assert!(
            gap(&fast, &em) <= 2.0 * GUARD_BITS as f64 - prec as f64,
            "m={m}"
        );
        assert!(trunc.is_certified_for(prec));
    }
    let (_, trunc) = fast_odd_zeta(0, 1024).unwrap();
    assert!(trunc.terms <= 120);
}

#[test]
fn negative_controls_fail() {
    let p = params(3, (3, 2), 256);
    for ctl in [
        NegativeControl::FlipCoefficientSign,
        NegativeControl::BreakConstraint,
    ] {
        assert!(!verify_ramanujan_with(&p, Some(ctl)).unwrap().pass);
        assert!(!verify_coth_variant_with(&p, Some(ctl)).unwrap().pass);
        assert!(!verify_lerch_with(1, 256, Some(ctl)).unwrap().pass);
    }
    let c =
        verify_convolution_recursion_with(1, 200, 128, Some(NegativeControl::FlipCoefficientSign));
    assert!(!c.unwrap().pass);
    let q = QuasiZetaSequences::alpha_pi(Rational::from(2), 2).unwrap();
    let t = telescope_check_with(&q, 300, 128, Some(NegativeControl::FlipCoefficientSign));
    assert!(!t.unwrap().pass);
}

#[test]
fn convolution_recursion() {
    for m in [1u32, 2] {
        let r = verify_convolution_recursion(m, 4000, 128).unwrap();
        assert!(r.pass, "m={m} {} vs {}", r.abs_diff_log2, r.tolerance_log2);
        assert!(r.internal_checks_hold(), "{:?}", r.internal_checks);
        // the residual is O(1/N)
        assert!(r.abs_diff_log2 < -9.0);
    }
}

#[test]
fn convolution_oracle_symmetry() {
    let o = convolution_oracle(1, 500).unwrap();
    assert!((o.lhs - o.trailing).abs() <= 1e-13 * o.lhs);
    let conv: Float = Float::with_val(
        128,
        Float::sum(convolution_products(1, 128).unwrap().iter()),
    );
    let half = conv.to_f64() / 2.0;
    assert!((o.lhs - half).abs() < 0.01);
}

#[test]
fn telescoping_specialisation() {
    let q = QuasiZetaSequences::alpha_pi(Rational::from(2), 2).unwrap();
    let r = telescope_check(&q, 3000, 128).unwrap();
    assert!(r.pass, "{} vs {}", r.abs_diff_log2, r.tolerance_log2);
    assert_eq!(r.t, Rational::from(2));
}

#[test]
fn telescoping_depth_one() {
    let q = QuasiZetaSequences::alpha_pi(Rational::from((3, 2)), 1).unwrap();
    assert!(telescope_check(&q, 1000, 128).unwrap().pass);
    let q = QuasiZetaSequences::new(Rational::from(1), Rational::from((1, 3)), 3).unwrap();
    assert!(telescope_check(&q, 500, 128).unwrap().pass);
}

#[test]
fn rejected_inputs() {
    assert_eq!(
        IdentityParams::new(1, Rational::from(0), 256).unwrap_err(),
        Error::NotPositive("t")
    );
    assert!(matches!(
        QuasiZetaSequences::new(Rational::from(-1), Rational::from(1), 2),
        Err(Error::UnsupportedSequence(_))
    ));
    assert!(fast_odd_zeta(0, 63).is_err());
    assert!(verify_lerch(0, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_rational_cells_pass(m in 1u32..7, p in 1i64..40, q in 1i64..40) {
        let r = verify_ramanujan(&params(m, (p, q), 192)).unwrap();
        prop_assert!(r.pass, "m={} t={}/{} diff={}", m, p, q, r.abs_diff_log2);
        prop_assert!(r.internal_checks_hold());
    }
}
