//! Exact mutual information with `n_r` i.i.d. antennas.
//!
//! For a finite output alphabet the per-bin counts (the type) are a
//! sufficient statistic, so `I(X; Y^{n_r}) = I(X; T)` with `T` multinomial.
//! All compositions of `n_r` into `L` parts are streamed in colexicographic
//! order and mixtures are accumulated in log-space.

use crate::channels::{Channel, OutputKind};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::jeffreys::TiltedPrior;
use crate::quad::{integrate_interval, QuadRule};
use crate::specfun::log_gamma_unchecked;
use std::f64::consts::{E, LN_2, PI};

/// Input alphabet with probabilities.
pub type DiscreteInput = Constellation;

/// Default cap on type × input log-pmf evaluations.
pub const DEFAULT_BUDGET: f64 = 1e8;
/// Cap on stored type-likelihood entries for Blahut–Arimoto.
pub const MATRIX_BUDGET: f64 = 5e7;

/// Per-bin counts summing to `n_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeIndex {
    counts: Vec<u64>,
}

impl TypeIndex {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Validation("type needs at least one bin".into()));
        }
        Ok(TypeIndex { counts })
    }

    /// Type of a sequence of bin indices.
    pub fn from_samples(bins: usize, samples: &[usize]) -> Result<Self> {
        let mut counts = vec![0u64; bins];
        for &s in samples {
            if s >= bins {
                return Err(Error::Validation(format!("bin {s} out of range 0..{bins}")));
            }
            counts[s] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `ln (n! / Π c_ℓ!)`.
    pub fn ln_multinomial(&self) -> f64 {
        ln_multinomial(&self.counts)
    }
}

fn ln_multinomial(c: &[u64]) -> f64 {
    let n: u64 = c.iter().sum();
    log_gamma_unchecked(n as f64 + 1.0)
        - c.iter()
            .map(|k| log_gamma_unchecked(*k as f64 + 1.0))
            .sum::<f64>()
}

/// Streams the compositions of `n` into `parts` nonnegative parts.
pub struct Compositions {
    cur: Vec<u64>,
    done: bool,
}

impl Compositions {
    pub fn new(n: u64, parts: usize) -> Self {
        assert!(parts >= 1);
        let mut cur = vec![0; parts];
        cur[0] = n;
        Compositions { cur, done: false }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let l = self.cur.len();
        match self.cur.iter().position(|c| *c > 0) {
            Some(i) if i + 1 < l => {
                let v = self.cur[i];
                self.cur[i] = 0;
                self.cur[0] = v - 1;
                self.cur[i + 1] += 1;
            }
            _ => self.done = true,
        }
        Some(out)
    }
}

/// `ln C(n + L - 1, L - 1)`.
pub fn ln_composition_count(n: u64, parts: usize) -> f64 {
    let (n, k) = (n as f64, parts as f64 - 1.0);
    log_gamma_unchecked(n + k + 1.0) - log_gamma_unchecked(n + 1.0) - log_gamma_unchecked(k + 1.0)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn validate_pmfs(pmfs: &[Vec<f64>], probs: &[f64]) -> Result<usize> {
    if pmfs.is_empty() || pmfs.len() != probs.len() {
        return Err(Error::Validation(format!(
            "{} pmfs for {} input probabilities",
            pmfs.len(),
            probs.len()
        )));
    }
    let l = pmfs[0].len();
    if l == 0 || pmfs.iter().any(|p| p.len() != l) {
        return Err(Error::Validation(
            "pmfs must share a nonempty alphabet".into(),
        ));
    }
    Ok(l)
}

fn ln_table(pmfs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    pmfs.iter()
        .map(|p| p.iter().map(|v| v.ln()).collect())
        .collect()
}

/// `Σ_ℓ c_ℓ ln p_ℓ` with `0 · ln 0 = 0`.
#[inline]
fn type_loglik(counts: &[u64], ln_p: &[f64]) -> f64 {
    let mut s = 0.0;
    for (c, lp) in counts.iter().zip(ln_p) {
        if *c > 0 {
            s += *c as f64 * lp;
        }
    }
    s
}

fn check_budget(n: u64, l: usize, m: usize, budget: f64) -> Result<()> {
    let needed = ln_composition_count(n, l).exp() * m as f64;
    if needed > budget {
        return Err(Error::Resource { needed, budget });
    }
    Ok(())
}

/// `I(X; T)` in bits for the inputs' output pmfs (`pmfs[x][ℓ]`).
pub fn mi_types(pmfs: &[Vec<f64>], probs: &[f64], n_r: u64, budget: f64) -> Result<f64> {
    let l = validate_pmfs(pmfs, probs)?;
    check_budget(n_r, l, pmfs.len(), budget)?;
    let ln_p = ln_table(pmfs);
    let ln_w: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let mut a = vec![0.0; pmfs.len()];
    let mut joint = vec![0.0; pmfs.len()];
    let mut total = 0.0;
    for t in Compositions::new(n_r, l) {
        let lm = ln_multinomial(&t);
        for x in 0..pmfs.len() {
            a[x] = type_loglik(&t, &ln_p[x]);
            joint[x] = ln_w[x] + a[x];
        }
        let ln_mix = log_sum_exp(&joint);
        for x in 0..pmfs.len() {
            if probs[x] > 0.0 && a[x] > f64::NEG_INFINITY {
                total += probs[x] * (lm + a[x]).exp() * (a[x] - ln_mix);
            }
        }
    }
    Ok((total / LN_2).max(0.0))
}

/// Two-output special case by an independent route: binomial weights from
/// the log-recurrence `ln C(n, k+1) = ln C(n, k) + ln(n-k) - ln(k+1)`.
/// `pmfs[x]` holds the two output probabilities of input x.
pub fn mi_binary_output(pmfs: &[[f64; 2]], probs: &[f64], n_r: u64) -> Result<f64> {
    if pmfs.len() != probs.len() || pmfs.is_empty() {
        return Err(Error::Validation("mismatched binary-output inputs".into()));
    }
    let n = n_r as f64;
    let mut ln_binom = 0.0;
    let mut total = 0.0;
    let mut terms = vec![0.0; pmfs.len()];
    for k in 0..=n_r {
        let kf = k as f64;
        for (x, p) in pmfs.iter().enumerate() {
            let mut v = 0.0;
            if k > 0 {
                v += kf * p[0].ln();
            }
            if k < n_r {
                v += (n - kf) * p[1].ln();
            }
            terms[x] = v;
        }
        let mix: Vec<f64> = terms.iter().zip(probs).map(|(t, w)| t + w.ln()).collect();
        let ln_mix = log_sum_exp(&mix);
        for (x, &t) in terms.iter().enumerate() {
            if probs[x] > 0.0 && t > f64::NEG_INFINITY {
                total += probs[x] * (ln_binom + t).exp() * (t - ln_mix);
            }
        }
        if k < n_r {
            ln_binom += (n - kf).ln() - (kf + 1.0).ln();
        }
    }
    Ok((total / LN_2).max(0.0))
}

fn input_pmfs(ch: &Channel, input: &DiscreteInput) -> Result<Vec<Vec<f64>>> {
    match ch.output_kind() {
        OutputKind::Finite(_) => input.points.iter().map(|x| ch.output_pmf(*x)).collect(),
        _ => Err(Error::contract(
            "mi_finite_output",
            format!("{} channel does not have a finite output", ch.kind_name()),
        )),
    }
}

/// Exact `I(X; Y^{n_r})` in bits for a finite-output channel.
pub fn mi_finite_output(ch: &Channel, input: &DiscreteInput, n_r: u64) -> Result<f64> {
    mi_finite_output_with_budget(ch, input, n_r, DEFAULT_BUDGET)
}

pub fn mi_finite_output_with_budget(
    ch: &Channel,
    input: &DiscreteInput,
    n_r: u64,
    budget: f64,
) -> Result<f64> {
    let pmfs = input_pmfs(ch, input)?;
    if pmfs[0].len() == 2 {
        let pairs: Vec<[f64; 2]> = pmfs.iter().map(|p| [p[0], p[1]]).collect();
        return mi_binary_output(&pairs, &input.probs, n_r);
    }
    mi_types(&pmfs, &input.probs, n_r, budget)
}

/// The prior discretized at `grid_size` midpoints of its support, weighted
/// by the density there.
pub fn discretize_prior(prior: &TiltedPrior, grid_size: usize) -> Result<DiscreteInput> {
    if grid_size < 1 {
        return Err(Error::domain("mi_prior_grid", "grid_size must be >= 1"));
    }
    let (lo, hi) = prior.support();
    let points: Vec<f64> = (0..grid_size)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / grid_size as f64)
        .collect();
    let w: Vec<f64> = points.iter().map(|t| prior.marginal_density(*t)).collect();
    let s: f64 = w.iter().sum();
    if !(s > 0.0) {
        return Err(Error::Degenerate(s));
    }
    Constellation::new(points, w.into_iter().map(|v| v / s).collect())
}

/// MI of the discretized prior.
pub fn mi_prior_grid(ch: &Channel, prior: &TiltedPrior, grid_size: usize, n_r: u64) -> Result<f64> {
    let input = discretize_prior(prior, grid_size)?;
    mi_finite_output(ch, &input, n_r)
}

/// Blahut–Arimoto result.
#[derive(Debug, Clone)]
pub struct BaResult {
    pub input: DiscreteInput,
    pub bits: f64,
    pub iterations: usize,
    /// Upper minus lower capacity bound after each iteration, in bits.
    pub gaps: Vec<f64>,
}

/// Capacity-achieving weights over fixed `points` for `n_r` antennas.
pub fn blahut_arimoto(
    ch: &Channel,
    points: &[f64],
    n_r: u64,
    tol: f64,
    max_iter: usize,
) -> Result<BaResult> {
    if points.is_empty() {
        return Err(Error::contract("blahut_arimoto", "no input points"));
    }
    let uniform = Constellation::uniform(points.to_vec())?;
    let pmfs = input_pmfs(ch, &uniform)?;
    let l = pmfs[0].len();
    let m = points.len();
    let ln_types = ln_composition_count(n_r, l);
    let needed = ln_types.exp() * m as f64;
    if needed > MATRIX_BUDGET {
        return Err(Error::Resource {
            needed,
            budget: MATRIX_BUDGET,
        });
    }
    if m == 1 {
        return Ok(BaResult {
            input: uniform,
            bits: 0.0,
            iterations: 0,
            gaps: vec![],
        });
    }
    // ln P(t | x), row per type
    let ln_p = ln_table(&pmfs);
    let rows: Vec<Vec<f64>> = Compositions::new(n_r, l)
        .map(|t| {
            let lm = ln_multinomial(&t);
            ln_p.iter().map(|lp| lm + type_loglik(&t, lp)).collect()
        })
        .collect();
    let mut w = vec![1.0 / m as f64; m];
    let mut gaps = Vec::new();
    let mut div = vec![0.0; m];
    let mut mix = vec![0.0; m];
    for it in 1..=max_iter {
        // D(P(·|x) ‖ P_w) in nats
        div.iter_mut().for_each(|d| *d = 0.0);
        let ln_w: Vec<f64> = w.iter().map(|v| v.ln()).collect();
        for row in &rows {
            for x in 0..m {
                mix[x] = ln_w[x] + row[x];
            }
            let ln_out = log_sum_exp(&mix);
            for x in 0..m {
                if row[x] > f64::NEG_INFINITY {
                    div[x] += row[x].exp() * (row[x] - ln_out);
                }
            }
        }
        let lower: f64 = w.iter().zip(&div).map(|(a, b)| a * b).sum();
        let upper = div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - lower) / LN_2;
        gaps.push(gap);
        if gap < tol {
            let input = Constellation::new(points.to_vec(), w)?;
            return Ok(BaResult {
                input,
                bits: lower / LN_2,
                iterations: it,
                gaps,
            });
        }
        let unnorm: Vec<f64> = w
            .iter()
            .zip(&div)
            .map(|(a, d)| a * (d - upper).exp())
            .collect();
        let s: f64 = unnorm.iter().sum();
        w = unnorm.into_iter().map(|v| v / s).collect();
    }
    Err(Error::Convergence {
        op: "blahut_arimoto",
        iterations: max_iter,
        residual: *gaps.last().unwrap_or(&f64::NAN),
    })
}

/// `I(θ; ȳ)` in bits for the AWGN channel, where the sample mean
/// `ȳ ~ N(θ, 1/n_r)` is sufficient: `h(ȳ) - ½ ln(2πe/n_r)` with the
/// mixture entropy by quadrature.
pub fn mi_gaussian_sufficient(input: &DiscreteInput, n_r: f64) -> Result<f64> {
    if !(n_r >= 1.0) {
        return Err(Error::domain(
            "mi_gaussian_sufficient",
            format!("n_r must be >= 1, got {n_r}"),
        ));
    }
    if input.points.len() == 1 {
        return Ok(0.0);
    }
    let sigma = 1.0 / n_r.sqrt();
    let ln_norm = -0.5 * (2.0 * PI).ln() - sigma.ln();
    let ln_w: Vec<f64> = input.probs.iter().map(|p| p.ln()).collect();
    let ln_mix = |y: f64| {
        let v: Vec<f64> = input
            .points
            .iter()
            .zip(&ln_w)
            .map(|(x, lw)| {
                let z = (y - x) / sigma;
                lw - 0.5 * z * z
            })
            .collect();
        ln_norm + log_sum_exp(&v)
    };
    let lo = input.points.iter().copied().fold(f64::INFINITY, f64::min) - 40.0 * sigma;
    let hi = input
        .points
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        + 40.0 * sigma;
    let panels = (((hi - lo) / (4.0 * sigma)).ceil() as usize).clamp(1, 100_000);
    let rule = QuadRule::default().with_abs_tol(1e-15);
    let h = (hi - lo) / panels as f64;
    let mut ent = 0.0;
    for k in 0..panels {
        let a = lo + h * k as f64;
        let b = if k + 1 == panels { hi } else { a + h };
        ent += integrate_interval(
            |y| {
                let l = ln_mix(y);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    -l.exp() * l
                }
            },
            a,
            b,
            &rule,
        )?
        .value;
    }
    let cond = 0.5 * (2.0 * PI * E / n_r).ln();
    Ok(((ent - cond) / LN_2).max(0.0))
}
