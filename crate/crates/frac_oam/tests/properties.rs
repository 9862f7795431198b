//! Randomised invariants, shrunk by proptest on failure.

use proptest::prelude::*;
use std::f64::consts::TAU;

use frac_oam::analytic::{oam_amplitude, overlap, overlap_probability};
use frac_oam::bp_space::{fractional_state, FiniteAngleSpace, FractionalLabel};
use frac_oam::specfun::{bessel_j, d_coefficient, CoefficientQuery};
use frac_oam::wrap_angle;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fractional_states_are_flat_and_normalised(
        l in 0usize..60,
        m_total in -6.0..6.0f64,
        alpha in 0.0..TAU,
        theta0 in -3.0..3.0f64,
    ) {
        let space = FiniteAngleSpace::new(l, theta0);
        let state = fractional_state(&space, &FractionalLabel::new(m_total, alpha, theta0));
        let p = state.angle_distribution();
        let flat = 1.0 / space.dimension() as f64;
        for &x in &p {
            prop_assert!((x - flat).abs() < 1e-14);
        }
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_is_bounded_and_hermitian(
        m in -5.0..5.0f64,
        mp in -5.0..5.0f64,
        a in 0.0..TAU,
        ap in 0.0..TAU,
        theta0 in -3.0..3.0f64,
    ) {
        let o = overlap(m, a, mp, ap, theta0);
        prop_assert!(o.norm() <= 1.0 + 1e-12);
        let back = overlap(mp, ap, m, a, theta0).conj();
        prop_assert!((o - back).norm() < 1e-12);
        prop_assert!((o.norm_sqr() - overlap_probability(m, mp, wrap_angle(a - ap))).abs() < 1e-12);
    }

    #[test]
    fn mode_probabilities_ignore_orientation(
        m_total in -5.0..5.0f64,
        b1 in 0.0..TAU,
        b2 in 0.0..TAU,
        mp in -8i64..8,
    ) {
        let c1 = oam_amplitude(m_total, b1, 0.0, mp).norm_sqr();
        let c2 = oam_amplitude(m_total, b2, 0.0, mp).norm_sqr();
        prop_assert!((c1 - c2).abs() < 1e-12);
    }

    #[test]
    fn coefficient_negative_order_compensation(
        mp in 1i64..10,
        kw in 0.05..20.0f64,
        rho in 0.05..4.0f64,
    ) {
        let pos = d_coefficient(CoefficientQuery { mp, kappa: kw, w0: 1.0 })
            * bessel_j(mp as i32, kw * rho);
        let neg = d_coefficient(CoefficientQuery { mp: -mp, kappa: kw, w0: 1.0 })
            * bessel_j(-(mp as i32), kw * rho);
        prop_assert!((pos - neg).abs() <= 1e-12 * pos.abs().max(1e-12));
    }

    #[test]
    fn wrap_angle_is_idempotent_and_in_range(x in -1e6..1e6f64) {
        let w = wrap_angle(x);
        prop_assert!((0.0..TAU).contains(&w));
        prop_assert!((wrap_angle(w) - w).abs() < 1e-15);
    }
}
