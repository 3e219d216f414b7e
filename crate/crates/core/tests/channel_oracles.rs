//! Fisher information of each channel against brute-force computations that
//! share no code path with the library formulas.

use jfactor::channels::{Channel, DiscreteDist, DitherSet};
use jfactor::specfun::{bessel_i01_scaled, phi, q_func};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1, StandardNormal};

fn interior_grid(lo: f64, hi: f64, n: usize, inset: f64) -> Vec<f64> {
    let (a, b) = (lo + inset, hi - inset);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn fd_fisher_from_pmf(ch: &Channel, t: f64, h: f64) -> f64 {
    let p = ch.output_pmf(t).unwrap();
    let up = ch.output_pmf(t + h).unwrap();
    let dn = ch.output_pmf(t - h).unwrap();
    p.iter()
        .zip(up.iter().zip(&dn))
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, (u, d))| {
            let dp = (u - d) / (2.0 * h);
            dp * dp / p
        })
        .sum()
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[test]
fn finite_output_channels_match_finite_differences() {
    let channels = [
        Channel::one_bit(2.0).unwrap(),
        Channel::uniform_adc(1.0, 4).unwrap(),
        Channel::uniform_adc(3.0, 8).unwrap(),
        Channel::quantized_awgn(2.0, vec![-1.3, 0.2, 0.25, 1.7]).unwrap(),
        Channel::dithered_one_bit(1.0, DitherSet::equally_spaced(3, 1.0).unwrap()).unwrap(),
        Channel::dithered_one_bit(
            2.0,
            DitherSet::new(vec![-0.5, 0.0, 1.5], vec![0.2, 0.5, 0.3]).unwrap(),
        )
        .unwrap(),
    ];
    for ch in &channels {
        let (lo, hi) = ch.param_space().scalar_range();
        for t in interior_grid(lo, hi, 33, 1e-5) {
            let want = fd_fisher_from_pmf(ch, t, 1e-5);
            let got = ch.fisher(t).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-4,
                "{} at θ = {t}: {got} vs {want}",
                ch.kind_name()
            );
        }
    }
}

#[test]
fn pmfs_are_normalized() {
    let ch = Channel::uniform_adc(2.0, 16).unwrap();
    let d = Channel::dithered_one_bit(1.0, DitherSet::equally_spaced(5, 0.8).unwrap()).unwrap();
    for t in interior_grid(-2.0, 2.0, 17, 0.0) {
        let p = ch.output_pmf(t).unwrap();
        assert!(p.iter().all(|v| *v >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p = d.output_pmf(t / 2.0).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn nested_thresholds_do_not_lose_information() {
    let coarse = Channel::quantized_awgn(2.0, vec![-1.0, 0.0, 1.0]).unwrap();
    let fine = Channel::quantized_awgn(2.0, vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]).unwrap();
    let finest = Channel::uniform_adc(2.0, 64).unwrap();
    for t in interior_grid(-2.0, 2.0, 41, 0.0) {
        let a = coarse.fisher(t).unwrap();
        let b = fine.fisher(t).unwrap();
        let c = finest.fisher(t).unwrap();
        assert!(
            a <= b * (1.0 + 1e-12) && b <= 1.0 + 1e-12,
            "θ = {t}: {a} {b}"
        );
        assert!(c <= 1.0 + 1e-12);
    }
}

#[test]
fn clipped_matches_mixed_output_integral() {
    for b in [0.3, 1.0, 2.5] {
        let ch = Channel::clipped_awgn(2.0, b).unwrap();
        for t in interior_grid(-2.0, 2.0, 9, 0.0) {
            // atoms at ±B plus the Gaussian part on (-B, B)
            let upper = phi(b - t).powi(2) / q_func(b - t);
            let lower = phi(b + t).powi(2) / q_func(b + t);
            let body = simpson(|u| u * u * phi(u), -b - t, b - t, 20_000);
            let want = upper + lower + body;
            let got = ch.fisher(t).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "B = {b}, θ = {t}: {got} vs {want}"
            );
            assert!(got <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn truncated_matches_conditional_variance() {
    let b = 1.5;
    let ch = Channel::truncated_awgn(1.0, b).unwrap();
    for t in interior_grid(-1.0, 1.0, 9, 0.0) {
        let dens = |y: f64| phi(y - t);
        let z = simpson(dens, -b, b, 20_000);
        let m1 = simpson(|y| y * dens(y), -b, b, 20_000) / z;
        let m2 = simpson(|y| y * y * dens(y), -b, b, 20_000) / z;
        let want = m2 - m1 * m1;
        let got = ch.fisher(t).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-9,
            "θ = {t}: {got} vs {want}"
        );
    }
}

#[test]
fn poisson_matches_count_series() {
    let h = DiscreteDist::new(vec![0.5, 1.0, 2.0], vec![0.3, 0.5, 0.2]).unwrap();
    let mu = DiscreteDist::new(vec![0.1, 0.6], vec![0.5, 0.5]).unwrap();
    let ch = Channel::poisson(3.0, h.clone(), mu.clone()).unwrap();
    for t in interior_grid(0.0, 3.0, 13, 1e-4) {
        let mut want = 0.0;
        for (hv, hp) in h.iter() {
            for (mv, mp) in mu.iter() {
                let step = 1e-5;
                let pmf = |m: f64, kmax: usize| {
                    let mut p = vec![(-m).exp()];
                    for k in 1..kmax {
                        let last = p[k - 1];
                        p.push(last * m / k as f64);
                    }
                    p
                };
                let m = hv * t + mv;
                let kmax = (m + 40.0 * m.sqrt() + 60.0) as usize;
                let (p, up, dn) = (
                    pmf(m, kmax),
                    pmf(m + hv * step, kmax),
                    pmf(m - hv * step, kmax),
                );
                let j: f64 = (0..kmax)
                    .filter(|k| p[*k] > 0.0)
                    .map(|k| {
                        let d = (up[k] - dn[k]) / (2.0 * step);
                        d * d / p[k]
                    })
                    .sum();
                want += hp * mp * j;
            }
        }
        let got = ch.fisher(t).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-5,
            "θ = {t}: {got} vs {want}"
        );
    }
}

fn mc_mean_sq<F: FnMut(&mut StdRng) -> f64>(draws: usize, seed: u64, mut score: F) -> (f64, f64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let v = score(&mut rng).powi(2);
        s1 += v;
        s2 += v * v;
    }
    let n = draws as f64;
    let mean = s1 / n;
    (mean, ((s2 / n - mean * mean) / n).sqrt())
}

#[test]
fn energy_detection_matches_monte_carlo() {
    let ch = Channel::energy_detection(3.0).unwrap();
    for (i, t) in [0.4f64, 1.0, 2.2].into_iter().enumerate() {
        let (mean, se) = mc_mean_sq(10_000_000, 11 + i as u64, |rng| {
            let zr: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
            let zi: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
            let y = 2.0 * ((t + zr).powi(2) + zi * zi);
            // noncentral chi-square, 2 dof, noncentrality 2θ²
            let arg = (2.0 * y).sqrt() * t;
            let (i0, i1) = bessel_i01_scaled(arg).unwrap();
            -2.0 * t + (2.0 * y).sqrt() * i1 / i0
        });
        let got = ch.fisher(t).unwrap();
        assert!(
            (got - mean).abs() < 5.0 * se,
            "θ = {t}: {got} vs MC {mean} ± {se}"
        );
    }
    assert!(ch.fisher(0.0).unwrap().abs() < 1e-10);
}

#[test]
fn noncoherent_matches_monte_carlo() {
    let sigma2 = 0.7;
    let ch = Channel::noncoherent(2.0, sigma2).unwrap();
    for t in [0.3f64, 1.0, 1.8] {
        let s = 1.0 + sigma2 * t * t;
        let (mean, se) = mc_mean_sq(2_000_000, 5, |rng| {
            let e: f64 = Exp1.sample(rng);
            let y2 = s * e;
            let ln_p = |th: f64| {
                let s = 1.0 + sigma2 * th * th;
                -(std::f64::consts::PI * s).ln() - y2 / s
            };
            (ln_p(t + 1e-6) - ln_p(t - 1e-6)) / 2e-6
        });
        let got = ch.fisher(t).unwrap();
        assert!(
            (got - mean).abs() < 5.0 * se,
            "θ = {t}: {got} vs MC {mean} ± {se}"
        );
    }
}

#[test]
fn mimo_dense_determinant_matches_closed_form() {
    let mut rng = StdRng::seed_from_u64(3);
    for (nt, sigma2) in [(1usize, 0.1), (2, 0.3), (4, 0.5)] {
        let ch = Channel::mimo_imperfect_csi(1.5, nt, sigma2).unwrap();
        for r in [0.0, 0.4, 1.1, 1.5] {
            let mut th: Vec<f64> = (0..2 * nt).map(|_| rng.sample(StandardNormal)).collect();
            let norm = th.iter().map(|v| v * v).sum::<f64>().sqrt();
            th.iter_mut().for_each(|v| *v *= r / norm);
            let j = ch.fisher_matrix(&th).unwrap();
            let det = j.clone().determinant();
            let got = ch.sqrt_det_fisher(r).unwrap();
            assert!((det.sqrt() - got).abs() < 1e-12 * got, "nt = {nt}, r = {r}");
            assert!(j
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .all(|e| *e > 0.0));
        }
    }
}

#[test]
fn mimo_matrix_matches_averaged_conditional_fisher() {
    let (nt, sigma2) = (2usize, 0.25);
    let ch = Channel::mimo_imperfect_csi(1.0, nt, sigma2).unwrap();
    let th = [0.3, -0.2, 0.5, 0.1];
    let s = 1.0 + sigma2 * th.iter().map(|v| v * v).sum::<f64>();
    let sd = ((1.0 - sigma2) / 2.0).sqrt();
    let mut rng = StdRng::seed_from_u64(17);
    let d = 2 * nt;
    let draws = 200_000;
    let mut acc = DMatrix::<f64>::zeros(d, d);
    for _ in 0..draws {
        let g: Vec<f64> = (0..nt)
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let k: Vec<f64> = (0..nt)
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        // gradients of Re(ĥᵀx) and Im(ĥᵀx) in θ = [Re x; Im x]
        let mut re = vec![0.0; d];
        let mut im = vec![0.0; d];
        for i in 0..nt {
            re[i] = g[i];
            re[nt + i] = -k[i];
            im[i] = k[i];
            im[nt + i] = g[i];
        }
        for a in 0..d {
            for b in 0..d {
                acc[(a, b)] += 2.0 / s * (re[a] * re[b] + im[a] * im[b]);
            }
        }
    }
    acc /= draws as f64;
    for a in 0..d {
        for b in 0..d {
            acc[(a, b)] += (2.0 * sigma2 * th[a]) * (2.0 * sigma2 * th[b]) / (s * s);
        }
    }
    let j = ch.fisher_matrix(&th).unwrap();
    assert!(
        (&j - &acc).abs().max() < 1.5e-2,
        "library {j} vs averaged {acc}"
    );
}
