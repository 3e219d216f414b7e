use jfactor::channels::{Channel, DiscreteDist, DitherSet};
use jfactor::constellation::Constellation;
use jfactor::jeffreys::{
    asymptotic_capacity, average_cost, mismatch_rate, solve_lambda_star, TiltedPrior,
};
use jfactor::mutual_info::{discretize_prior, mi_gaussian_sufficient};
use jfactor::noniid::{correlated_channel, fisher_rate_finite, fisher_rate_limit, Autocovariance};
use jfactor::specfun::{phi, q_func};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

fn every_channel() -> Vec<Channel> {
    let h = DiscreteDist::new(vec![0.5, 1.5], vec![0.5, 0.5]).unwrap();
    vec![
        Channel::awgn(1.0).unwrap(),
        Channel::clipped_awgn(1.0, 0.5).unwrap(),
        Channel::one_bit(1.0).unwrap(),
        Channel::uniform_adc(1.0, 8).unwrap(),
        Channel::energy_detection(1.0).unwrap(),
        Channel::mimo_imperfect_csi(1.0, 2, 0.3).unwrap(),
        Channel::noncoherent(1.0, 0.5).unwrap(),
        Channel::poisson(1.0, h, DiscreteDist::point(0.3).unwrap()).unwrap(),
        Channel::dithered_one_bit(1.0, DitherSet::equally_spaced(3, 1.0).unwrap()).unwrap(),
        Channel::truncated_awgn(1.0, 1.5).unwrap(),
        Channel::correlated_awgn(1.0, 0.4).unwrap(),
    ]
}

#[test]
fn tilted_cost_strictly_decreases_for_every_channel() {
    let lambdas: Vec<f64> = (0..32)
        .map(|i| 1e-3 * 10f64.powf(6.0 * i as f64 / 31.0))
        .collect();
    for ch in every_channel() {
        let m: Vec<f64> = lambdas
            .iter()
            .map(|l| average_cost(&ch, *l).unwrap())
            .collect();
        for (k, w) in m.windows(2).enumerate() {
            assert!(
                w[1] < w[0],
                "{}: M({}) = {} !< {}",
                ch.kind_name(),
                lambdas[k + 1],
                w[1],
                w[0]
            );
        }
    }
}

#[test]
fn optimal_prior_attains_capacity_in_mismatch_formula() {
    for (ch, p) in [
        (Channel::awgn(1.0).unwrap(), 1.0 / 9.0),
        (Channel::one_bit(2.0).unwrap(), 4.0 / 9.0),
        (Channel::noncoherent(1.0, 0.5).unwrap(), 0.2),
    ] {
        let sol = solve_lambda_star(&ch, p).unwrap();
        let prior = TiltedPrior::new(&ch, sol.lambda_star, p).unwrap();
        let c = asymptotic_capacity(&ch, p, 100.0).unwrap();
        let r = mismatch_rate(&ch, |t| prior.density(t), p, 100.0).unwrap();
        assert!((r - c).abs() < 1e-9, "{}: {r} vs {c}", ch.kind_name());
    }
}

#[test]
fn feasible_mismatched_prior_loses_rate() {
    let ch = Channel::awgn(1.0).unwrap();
    let p = 1.0 / 9.0;
    let s = 0.3;
    // N(0, s²) truncated to [-1, 1]; its second moment is below P
    let z = 1.0 - 2.0 * q_func(1.0 / s);
    let w = |t: f64| phi(t / s) / (s * z);
    let second = s * s * (1.0 - 2.0 * phi(1.0 / s) / (s * z));
    assert!(second <= p);
    let c = asymptotic_capacity(&ch, p, 100.0).unwrap();
    let r = mismatch_rate(&ch, w, p, 100.0).unwrap();
    assert!(r < c, "{r} !< {c}");
}

#[test]
fn gaussian_mi_matches_monte_carlo_single_look() {
    let input = Constellation::uniform(vec![-1.0, 1.0]).unwrap();
    let want = mi_gaussian_sufficient(&input, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(2024);
    let draws = 4_000_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let x = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let y: f64 = x + rng.sample::<f64, _>(StandardNormal);
        let lik = |m: f64| (-0.5 * (y - m) * (y - m)).exp();
        let v = (lik(x) / (0.5 * lik(1.0) + 0.5 * lik(-1.0))).log2();
        s1 += v;
        s2 += v * v;
    }
    let n = draws as f64;
    let mean = s1 / n;
    let se = ((s2 / n - mean * mean) / n).sqrt();
    assert!((want - mean).abs() < 5.0 * se, "{want} vs MC {mean} ± {se}");
}

#[test]
fn gaussian_mi_approaches_asymptotic_capacity() {
    let ch = Channel::awgn(1.0).unwrap();
    let p = 1.0 / 9.0;
    let sol = solve_lambda_star(&ch, p).unwrap();
    let prior = TiltedPrior::new(&ch, sol.lambda_star, p).unwrap();
    let input = discretize_prior(&prior, 513).unwrap();
    let gaps: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|n| (mi_gaussian_sufficient(&input, *n).unwrap() - sol.capacity_bits(*n)).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "gaps {gaps:?}");
}

#[test]
fn correlated_rate_converges_monotonically() {
    let a = Autocovariance::ar1(1.0, 0.5).unwrap();
    let limit = fisher_rate_limit(&a).unwrap();
    let errs: Vec<f64> = (6..=12)
        .map(|k| {
            let r = fisher_rate_finite(&a, 1 << k).unwrap();
            assert!(r > 0.0);
            (r - limit).abs()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[errs.len() - 1] < 1e-2);
}

#[test]
fn correlation_leaves_prior_shape_unchanged() {
    let white = correlated_channel(1.0, &Autocovariance::white(1.0).unwrap(), Some(256)).unwrap();
    let ar = correlated_channel(1.0, &Autocovariance::ar1(1.0, 0.5).unwrap(), Some(256)).unwrap();
    for lambda in [0.0, 3.0] {
        let a = TiltedPrior::new(&white, lambda, 0.1).unwrap();
        let b = TiltedPrior::new(&ar, lambda, 0.1).unwrap();
        let worst = (0..257)
            .map(|i| -1.0 + 2.0 * i as f64 / 256.0)
            .map(|t| (a.density(t) - b.density(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "λ = {lambda}: {worst}");
    }
}
