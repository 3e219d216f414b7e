use jfactor::channels::Channel;
use jfactor::constellation::{jeffreys_constellation, midpoint_grid, Constellation};
use jfactor::jeffreys::{log2_jeffreys_factor, solve_lambda_star, TiltedPrior};
use jfactor::mutual_info::mi_finite_output;
use jfactor::quad::{integrate_interval, QuadRule};
use jfactor::receiver_quant::{capacity_loss_el, quantized_fisher, Quantizer1D};
use jfactor::specfun::{bessel_i01_scaled, exp_integral_e1, gauss_phi_q, phi, q_func};
use proptest::prelude::*;

proptest! {
    #[test]
    fn q_is_antisymmetric_about_half(x in -40.0f64..40.0) {
        let (_, a) = gauss_phi_q(x).unwrap();
        let (_, b) = gauss_phi_q(-x).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    // below -3, Q ≈ 1 and the difference quotient cancels; symmetry covers it
    #[test]
    fn q_derivative_is_minus_phi(x in -3.0f64..8.0) {
        let h = 1e-5;
        let d = (q_func(x + h) - q_func(x - h)) / (2.0 * h);
        prop_assert!(((d + phi(x)) / phi(x)).abs() < 1e-6);
    }

    #[test]
    fn scaled_bessel_ordering(x in 0.0f64..1e4) {
        let (i0, i1) = bessel_i01_scaled(x).unwrap();
        prop_assert!(i1 <= i0);
    }

    #[test]
    fn e1_bracketed(x in 0.1f64..30.0) {
        let e = exp_integral_e1(x).unwrap();
        prop_assert!((-x).exp() / (x + 1.0) < e && e < (-x).exp() / x);
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.1f64..5.0, s in -2.0f64..2.0) {
        let rule = QuadRule::default();
        let f = |x: f64| (w * x).sin() + x * x;
        let g = |x: f64| (-(x - s).powi(2)).exp();
        let (lo, hi) = (-1.0, 2.0);
        let i_f = integrate_interval(f, lo, hi, &rule).unwrap();
        let i_g = integrate_interval(g, lo, hi, &rule).unwrap();
        let i_fg = integrate_interval(|x| a * f(x) + b * g(x), lo, hi, &rule).unwrap();
        let want = a * i_f.value + b * i_g.value;
        let tol = 2.0 * (rule.abs_tol + rule.rel_tol * want.abs().max(i_fg.value.abs()))
            + a.abs() * i_f.err_est + b.abs() * i_g.err_est + i_fg.err_est;
        prop_assert!((i_fg.value - want).abs() <= tol);
    }

    #[test]
    fn quadrature_is_additive(c in -0.9f64..1.9, w in 0.1f64..20.0) {
        let rule = QuadRule::default();
        let f = |x: f64| (w * x).cos() * (-x * x).exp();
        let whole = integrate_interval(f, -1.0, 2.0, &rule).unwrap().value;
        let left = integrate_interval(f, -1.0, c, &rule).unwrap().value;
        let right = integrate_interval(f, c, 2.0, &rule).unwrap().value;
        let tol = 2.0 * (rule.abs_tol + rule.rel_tol * whole.abs());
        prop_assert!((left + right - whole).abs() <= tol);
    }

    #[test]
    fn clipping_never_adds_information(t in -2.0f64..2.0, b in 0.05f64..6.0) {
        let ch = Channel::clipped_awgn(2.0, b).unwrap();
        prop_assert!(ch.fisher(t).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn power_budget_separates_from_jf(lambda in 0.0f64..20.0, p1 in 0.01f64..1.0, p2 in 0.01f64..1.0) {
        let ch = Channel::one_bit(1.0).unwrap();
        let a = log2_jeffreys_factor(&ch, lambda, p1).unwrap();
        let b = log2_jeffreys_factor(&ch, lambda, p2).unwrap();
        prop_assert!((b - a - lambda * (p2 - p1)).abs() < 1e-12 * (1.0 + lambda));
    }

    #[test]
    fn unbudgeted_jf_decreases(l1 in 0.0f64..50.0, dl in 1e-3f64..10.0) {
        for ch in [Channel::awgn(1.0).unwrap(), Channel::uniform_adc(1.0, 4).unwrap()] {
            let a = log2_jeffreys_factor(&ch, l1, 0.0).unwrap();
            let b = log2_jeffreys_factor(&ch, l1 + dl, 0.0).unwrap();
            prop_assert!(b < a);
        }
    }

    #[test]
    fn binned_fisher_bounded_and_nested(t in -1.0f64..1.0, r in 1.0f64..6.0, k in 0u32..6) {
        let ch = Channel::awgn(1.0).unwrap();
        let l = 1usize << k;
        let coarse = quantized_fisher(&ch, &Quantizer1D::new(r, l).unwrap(), t).unwrap();
        let fine = quantized_fisher(&ch, &Quantizer1D::new(r, 2 * l).unwrap(), t).unwrap();
        prop_assert!(coarse <= fine * (1.0 + 1e-12));
        prop_assert!(fine <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mi_is_bounded_and_grows_with_looks(
        pts in prop::collection::vec(-2.0f64..2.0, 1..6),
        n in 1u64..40,
    ) {
        let ch = Channel::uniform_adc(2.0, 4).unwrap();
        let input = Constellation::uniform(pts.clone()).unwrap();
        let one = mi_finite_output(&ch, &input, n).unwrap();
        let two = mi_finite_output(&ch, &input, 2 * n).unwrap();
        prop_assert!(one >= -1e-12);
        prop_assert!(one <= (pts.len() as f64).log2() + 1e-12);
        prop_assert!(two >= one - 1e-12);
    }

    #[test]
    fn tilted_priors_are_normalized(lambda in 0.0f64..30.0, pick in 0usize..5) {
        let ch = [
            Channel::awgn(1.0).unwrap(),
            Channel::clipped_awgn(1.0, 0.5).unwrap(),
            Channel::noncoherent(1.0, 0.5).unwrap(),
            Channel::energy_detection(1.0).unwrap(),
            Channel::mimo_imperfect_csi(1.0, 2, 0.2).unwrap(),
        ][pick].clone();
        let prior = TiltedPrior::new(&ch, lambda, 0.3).unwrap();
        let (lo, hi) = prior.support();
        let rule = QuadRule::default().with_rel_tol(1e-12);
        let mass = integrate_interval(|t| prior.marginal_density(t), lo, hi, &rule).unwrap().value;
        prop_assert!((mass - 1.0).abs() < 1e-9, "mass {}", mass);
    }

    #[test]
    fn looks_scale_capacity_by_dimension(p in 0.05f64..2.0, nr in 1.0f64..1e6) {
        for ch in [Channel::awgn(1.0).unwrap(), Channel::mimo_imperfect_csi(1.0, 3, 0.1).unwrap()] {
            let sol = solve_lambda_star(&ch, p).unwrap();
            let step = sol.capacity_bits(4.0 * nr) - sol.capacity_bits(nr);
            prop_assert!((step - ch.dim() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn jeffreys_points_increase(m in 2usize..40, p in 0.05f64..0.3) {
        let ch = Channel::one_bit(1.0).unwrap();
        let c = jeffreys_constellation(&ch, p, m).unwrap();
        prop_assert!(c.points.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn doubling_points_shrinks_largest_gap(m in 2usize..64) {
        let ch = Channel::awgn(1.0).unwrap();
        let prior = TiltedPrior::new(&ch, 2.0, 0.2).unwrap();
        let gap = |m: usize| {
            let xs: Vec<f64> = midpoint_grid(m).iter().map(|u| prior.cdf_inverse(*u).unwrap()).collect();
            xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        };
        prop_assert!(gap(2 * m) <= gap(m));
    }
}

#[test]
fn loss_never_grows_under_refinement() {
    let ch = Channel::awgn(1.0).unwrap();
    for r in [2.0, 4.5] {
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let e = capacity_loss_el(&ch, &Quantizer1D::new(r, 1 << k).unwrap(), 257).unwrap();
            assert!(
                e >= 0.0 && e <= prev,
                "r = {r}, L = {}: {e} after {prev}",
                1 << k
            );
            prev = e;
        }
    }
}
