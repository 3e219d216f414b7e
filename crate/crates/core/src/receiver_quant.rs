//! Binned receivers: likelihoods from output types and the resulting loss.
//!
//! Outputs are mapped to `L + 1` bins: bin 0 collects `|y| > r` and bins
//! `1..=L` split `[-r, r]` uniformly. The log-likelihood of a candidate θ
//! then only needs the bin counts, `Σ_ℓ c_ℓ ln p(ℓ|θ)`, at O(L) cost
//! regardless of the number of antennas. The information lost by binning is
//! measured by `e_L = ∫_Θ ln(J(θ) / J_L(θ)) dθ`.

use crate::channels::{Channel, Model, OutputKind};
use crate::error::{Error, Result};
use crate::mutual_info::TypeIndex;
use crate::specfun::{gauss_interval_prob, phi};

/// θ-grid size for [`capacity_loss_el`].
pub const LOSS_GRID: usize = 1025;
/// `e_L` values below this are dropped from slope fits.
pub const LOSS_FLOOR: f64 = 1e-15;

/// Overflow bin plus `L` uniform bins on `[-r, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer1D {
    r: f64,
    edges: Vec<f64>,
}

impl Quantizer1D {
    pub fn new(r: f64, bins: usize) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || bins < 1 {
            return Err(Error::domain(
                "build_quantizer",
                format!("need r > 0 and L >= 1, got r = {r}, L = {bins}"),
            ));
        }
        let edges = (0..=bins)
            .map(|i| {
                if i == bins {
                    r
                } else {
                    -r + 2.0 * r * i as f64 / bins as f64
                }
            })
            .collect();
        Ok(Quantizer1D { r, edges })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Interior bin count L.
    pub fn interior_bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Total bins including overflow, `L + 1`.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn width(&self) -> f64 {
        2.0 * self.r / self.interior_bins() as f64
    }

    /// Bin index of an output sample.
    pub fn bin_of(&self, y: f64) -> usize {
        if !(y.abs() <= self.r) {
            return 0;
        }
        let l = self.interior_bins();
        (((y + self.r) / self.width()).floor() as usize + 1).min(l)
    }

    /// Type of a batch of samples.
    pub fn type_of(&self, samples: &[f64]) -> TypeIndex {
        let mut counts = vec![0u64; self.len()];
        for &y in samples {
            counts[self.bin_of(y)] += 1;
        }
        TypeIndex::new(counts).expect("nonempty")
    }
}

/// Gaussian mass of `[a, b]` around θ and its θ-derivative.
fn mass(a: f64, b: f64, theta: f64) -> (f64, f64) {
    let dens = |x: f64| if x.is_finite() { phi(x) } else { 0.0 };
    (
        gauss_interval_prob(a - theta, b - theta),
        dens(a - theta) - dens(b - theta),
    )
}

/// Bin probabilities `p(ℓ|θ)` and their θ-derivatives, ℓ = 0..=L.
pub fn bin_probs_and_dtheta(
    ch: &Channel,
    q: &Quantizer1D,
    theta: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let support = match ch.model() {
        Model::Awgn => f64::INFINITY,
        Model::TruncatedAwgn { b } => *b,
        _ => {
            return Err(Error::contract(
                "bin_probs_and_dtheta",
                format!(
                    "no closed-form bin probabilities for the {} channel",
                    ch.kind_name()
                ),
            ))
        }
    };
    // validates θ against Θ
    ch.fisher(theta)?;
    let r = q.radius();
    let mut p = Vec::with_capacity(q.len());
    let mut dp = Vec::with_capacity(q.len());
    let clip = |x: f64| x.clamp(-support, support);
    // overflow: (-B, -r) ∪ (r, B)
    let (lo_m, lo_d) = if support > r {
        mass(-support, -r, theta)
    } else {
        (0.0, 0.0)
    };
    let (hi_m, hi_d) = if support > r {
        mass(r, support, theta)
    } else {
        (0.0, 0.0)
    };
    p.push(lo_m + hi_m);
    dp.push(lo_d + hi_d);
    for w in q.edges().windows(2) {
        let (a, b) = (clip(w[0]), clip(w[1]));
        if a < b {
            let (m, d) = mass(a, b, theta);
            p.push(m);
            dp.push(d);
        } else {
            p.push(0.0);
            dp.push(0.0);
        }
    }
    if support.is_finite() {
        let (z, dz) = mass(-support, support, theta);
        for k in 0..p.len() {
            dp[k] = (dp[k] * z - p[k] * dz) / (z * z);
            p[k] /= z;
        }
    }
    Ok((p, dp))
}

/// `J_L(θ) = Σ_ℓ (∂θ p_ℓ)² / p_ℓ` over bins with `p_ℓ > 0`.
pub fn quantized_fisher(ch: &Channel, q: &Quantizer1D, theta: f64) -> Result<f64> {
    let (p, dp) = bin_probs_and_dtheta(ch, q, theta)?;
    Ok(p.iter()
        .zip(&dp)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, d)| d * d / p)
        .sum())
}

/// `e_L` by the midpoint rule on `grid` points of Θ; `+∞` if `J_L`
/// vanishes somewhere on the grid.
pub fn capacity_loss_el(ch: &Channel, q: &Quantizer1D, grid: usize) -> Result<f64> {
    if grid < 1 {
        return Err(Error::domain(
            "capacity_loss_eL",
            "grid must have at least one point",
        ));
    }
    let (lo, hi) = ch.param_space().scalar_range();
    let h = (hi - lo) / grid as f64;
    let mut total = 0.0;
    for i in 0..grid {
        let t = lo + h * (i as f64 + 0.5);
        let jl = quantized_fisher(ch, q, t)?;
        if !(jl > 0.0) {
            return Ok(f64::INFINITY);
        }
        // J_L ≤ J; clamp rounding excursions
        total += (ch.fisher(t)? / jl).ln().max(0.0);
    }
    Ok(total * h)
}

/// `Σ_k ln p(y_k | θ)`. For finite-output channels the samples are output
/// indices.
pub fn exact_loglik(ch: &Channel, samples: &[f64], theta: f64) -> Result<f64> {
    if samples.iter().any(|y| !y.is_finite()) {
        return Err(Error::Validation("samples must be finite".into()));
    }
    match ch.output_kind() {
        OutputKind::Finite(size) => {
            let pmf = ch.output_pmf(theta)?;
            let mut s = 0.0;
            for &y in samples {
                if y < 0.0 || y.fract() != 0.0 || y as usize >= size {
                    return Err(Error::Validation(format!(
                        "sample {y} is not an output index below {size}"
                    )));
                }
                s += pmf[y as usize].ln();
            }
            Ok(s)
        }
        OutputKind::ContinuousScalar => {
            let mut s = 0.0;
            for &y in samples {
                s += ch.output_logdensity_dtheta(y, theta)?.0;
            }
            Ok(s)
        }
        OutputKind::PairWithState => Err(Error::contract(
            "exact_loglik",
            format!("{} outputs are not scalar samples", ch.kind_name()),
        )),
    }
}

/// `Σ_ℓ c_ℓ ln p_ℓ`; `-∞` when a populated bin has probability zero.
pub fn type_loglik(log_probs: &[f64], ty: &TypeIndex) -> Result<f64> {
    if log_probs.len() != ty.counts().len() {
        return Err(Error::Validation(format!(
            "type has {} bins, probabilities {}",
            ty.counts().len(),
            log_probs.len()
        )));
    }
    let mut s = 0.0;
    for (c, lp) in ty.counts().iter().zip(log_probs) {
        if *c > 0 {
            s += *c as f64 * lp;
        }
    }
    Ok(s)
}

/// Binned log-likelihood `n_r Σ_ℓ π(ℓ) ln p(ℓ|θ)`.
pub fn approx_loglik(ch: &Channel, q: &Quantizer1D, ty: &TypeIndex, theta: f64) -> Result<f64> {
    let (p, _) = bin_probs_and_dtheta(ch, q, theta)?;
    let lp: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    type_loglik(&lp, ty)
}

/// Log-likelihood of a type under a finite-output channel's own alphabet.
pub fn finite_type_loglik(ch: &Channel, ty: &TypeIndex, theta: f64) -> Result<f64> {
    let lp: Vec<f64> = ch.output_pmf(theta)?.iter().map(|v| v.ln()).collect();
    type_loglik(&lp, ty)
}

/// Index maximizing the type log-likelihood over candidates given by their
/// bin log-probabilities. Ties go to the smaller index; if every candidate
/// scores `-∞` the result is 0.
pub fn ml_detect_from_log_probs(candidates: &[Vec<f64>], ty: &TypeIndex) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::contract("ml_detect", "empty constellation"));
    }
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, lp) in candidates.iter().enumerate() {
        let v = type_loglik(lp, ty)?;
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    Ok(best)
}

/// Maximum-likelihood constellation index from a binned type.
pub fn ml_detect(ch: &Channel, q: &Quantizer1D, ty: &TypeIndex, points: &[f64]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::contract("ml_detect", "empty constellation"));
    }
    let cands = points
        .iter()
        .map(|x| {
            let (p, _) = bin_probs_and_dtheta(ch, q, *x)?;
            Ok(p.iter().map(|v| v.ln()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    ml_detect_from_log_probs(&cands, ty)
}

/// Overflow radius `3 + √(ln L)` used for Gaussian-tail channels.
pub fn gaussian_tail_radius(bins: usize) -> f64 {
    3.0 + (bins as f64).ln().sqrt()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Validation(
            "slope fit needs at least two points".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation(
            "slope fit needs distinct x values".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// One row of a scaling study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub bins: usize,
    pub radius: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    /// Fitted slope of `ln e_L` against `ln L` over the retained points.
    pub slope: f64,
}

/// `e_L` over a geometric list of bin counts, with radius `r_of(L)`.
pub fn scaling_study<R: Fn(usize) -> f64>(
    ch: &Channel,
    r_of: R,
    bins: &[usize],
) -> Result<ScalingStudy> {
    if bins.len() < 4 {
        return Err(Error::domain(
            "scaling_study",
            "need at least four bin counts",
        ));
    }
    let ratio = bins[1] as f64 / bins[0] as f64;
    if !(ratio > 1.0)
        || bins
            .windows(2)
            .any(|w| ((w[1] as f64 / w[0] as f64) - ratio).abs() > 1e-12 * ratio)
    {
        return Err(Error::domain(
            "scaling_study",
            "bin counts must form an increasing geometric sequence",
        ));
    }
    let mut points = Vec::new();
    for &l in bins {
        let r = r_of(l);
        let q = Quantizer1D::new(r, l)?;
        let loss = capacity_loss_el(ch, &q, LOSS_GRID)?;
        if loss < LOSS_FLOOR {
            log::warn!("e_L = {loss:e} at L = {l} is below the fit floor; dropped");
            continue;
        }
        points.push(ScalingPoint {
            bins: l,
            radius: r,
            loss,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.bins as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.loss).collect();
    let slope = loglog_slope(&x, &y)?;
    Ok(ScalingStudy { points, slope })
}
