//! Per-antenna channel families.
//!
//! Each [`Channel`] knows its parameter space Θ, the cost `c(θ) = θ²` (input
//! power expressed in the parameter), its Fisher information and, where the
//! output is finite, its output pmf. Parameterizations:
//!
//! | kind | θ | Θ | output |
//! |------|---|---|--------|
//! | `awgn` | x | [-A, A] | y = x + z |
//! | `clipped_awgn` | x | [-A, A] | clip(x + z) to [-B, B] |
//! | `quantized_awgn` | x | [-A, A] | index of the threshold cell |
//! | `energy_detection` | \|x\| | [0, A] | 2\|x + z\|², z ~ CN(0,1) |
//! | `mimo_imperfect_csi` | [Re x; Im x] | ball of radius A in R^{2nt} | (y, ĥ) |
//! | `noncoherent` | ‖x‖ | [0, A] | y ~ CN(0, 1 + σ²θ²) |
//! | `poisson` | x | [0, A] | (Poisson(hx + μ), h, μ) |
//! | `dithered_1bit` | x | [-A, A] | (sign(x + z - s), s) |
//! | `truncated_awgn` | x | [-A, A] | x + z conditioned on \|x + z\| ≤ B |
//! | `correlated_awgn` | x | [-A, A] | mean in correlated Gaussian noise |
//!
//! For the MIMO channel the estimated-channel second moment is taken as
//! `E[ĥĥᴴ] = (1-σ²) I` (uncorrelated real and imaginary parts of variance
//! `(1-σ²)/2`), whose real lifting is `Γ = (1-σ²) I_{2nt}`. Both the peak
//! constraint on ‖x‖ and on ‖θ‖ read `≤ A`, since the two norms agree.

use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, QuadRule};
use crate::specfun::{bessel_i01_scaled_unchecked, gauss_interval_prob, inv_mills, phi, q_func};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Geometry of Θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamShape {
    Interval { lo: f64, hi: f64 },
    Ball { radius: f64 },
}

/// Θ ⊂ R^d together with the isotropy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSpace {
    pub dim: usize,
    pub shape: ParamShape,
    /// J and c depend on θ only through ‖θ‖.
    pub isotropic: bool,
}

impl ParameterSpace {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Validation(format!(
                "parameter interval needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(ParameterSpace {
            dim: 1,
            shape: ParamShape::Interval { lo, hi },
            isotropic: false,
        })
    }

    pub fn ball(dim: usize, radius: f64, isotropic: bool) -> Result<Self> {
        if dim < 1 || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Validation(format!(
                "ball needs dim >= 1 and finite radius > 0, got dim {dim}, radius {radius}"
            )));
        }
        Ok(ParameterSpace {
            dim,
            shape: ParamShape::Ball { radius },
            isotropic,
        })
    }

    /// Integration range of the scalar coordinate: θ for intervals, the
    /// radius for balls.
    pub fn scalar_range(&self) -> (f64, f64) {
        match self.shape {
            ParamShape::Interval { lo, hi } => (lo, hi),
            ParamShape::Ball { radius } => (0.0, radius),
        }
    }
}

/// A finite probability distribution on the reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteDistRaw")]
pub struct DiscreteDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct DiscreteDistRaw {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<DiscreteDistRaw> for DiscreteDist {
    type Error = Error;
    fn try_from(raw: DiscreteDistRaw) -> Result<Self> {
        DiscreteDist::new(raw.values, raw.probs)
    }
}

fn check_pmf(what: &str, probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Validation(format!("{what}: empty distribution")));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Validation(format!(
            "{what}: probabilities must be finite and nonnegative"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "{what}: probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl DiscreteDist {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::Validation(format!(
                "distribution has {} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        check_pmf("distribution", &probs)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "distribution values must be finite".into(),
            ));
        }
        Ok(DiscreteDist { values, probs })
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }
}

/// Receiver-known threshold shifts and their probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DitherSetRaw")]
pub struct DitherSet {
    points: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct DitherSetRaw {
    points: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl TryFrom<DitherSetRaw> for DitherSet {
    type Error = Error;
    fn try_from(raw: DitherSetRaw) -> Result<Self> {
        match raw.weights {
            Some(w) => DitherSet::new(raw.points, w),
            None => DitherSet::uniform(raw.points),
        }
    }
}

impl DitherSet {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Validation(format!(
                "dither set has {} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        check_pmf("dither weights", &weights)?;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Validation("dither points must be finite".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("dither points must be distinct".into()));
        }
        Ok(DitherSet { points, weights })
    }

    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n.max(1) as f64; n])
    }

    /// `n` equally spaced points on `[-half_width, half_width]`, equiprobable.
    pub fn equally_spaced(n: usize, half_width: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation(
                "dither set needs at least one point".into(),
            ));
        }
        let pts = if n == 1 {
            vec![0.0]
        } else {
            (0..n)
                .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
                .collect()
        };
        Self::uniform(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The channel families, with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Awgn,
    ClippedAwgn { b: f64 },
    QuantizedAwgn { thresholds: Vec<f64> },
    EnergyDetection { rule: QuadRule },
    MimoImperfectCsi { nt: usize, sigma2: f64 },
    Noncoherent { sigma2: f64 },
    Poisson { h: DiscreteDist, mu: DiscreteDist },
    DitheredOneBit { dither: DitherSet },
    TruncatedAwgn { b: f64 },
    CorrelatedAwgn { fisher_rate: f64 },
}

/// What one antenna observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Finite alphabet of the given size (pairs with a discrete state are
    /// enumerated).
    Finite(usize),
    ContinuousScalar,
    PairWithState,
}

/// A validated per-antenna channel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelConfig", into = "ChannelConfig")]
pub struct Channel {
    peak: f64,
    model: Model,
}

fn positive(what: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Validation(format!(
            "{what} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}

impl Channel {
    fn with(peak: f64, model: Model) -> Result<Self> {
        positive("peak amplitude A", peak)?;
        Ok(Channel { peak, model })
    }

    pub fn awgn(a: f64) -> Result<Self> {
        Self::with(a, Model::Awgn)
    }

    pub fn clipped_awgn(a: f64, b: f64) -> Result<Self> {
        positive("clip level B", b)?;
        Self::with(a, Model::ClippedAwgn { b })
    }

    pub fn quantized_awgn(a: f64, thresholds: Vec<f64>) -> Result<Self> {
        validate_thresholds(&thresholds)?;
        Self::with(a, Model::QuantizedAwgn { thresholds })
    }

    /// 1-bit ADC: a single threshold at zero.
    pub fn one_bit(a: f64) -> Result<Self> {
        Self::quantized_awgn(a, vec![0.0])
    }

    /// `levels`-level uniform quantizer with outer thresholds at ±A
    /// (`levels = 2` gives the sign quantizer).
    pub fn uniform_adc(a: f64, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::Validation(format!(
                "quantizer needs at least 2 levels, got {levels}"
            )));
        }
        let t = if levels == 2 {
            vec![0.0]
        } else {
            let n = levels - 1;
            (0..n)
                .map(|i| -a + 2.0 * a * i as f64 / (n - 1) as f64)
                .collect()
        };
        Self::quantized_awgn(a, t)
    }

    pub fn energy_detection(a: f64) -> Result<Self> {
        Self::with(
            a,
            Model::EnergyDetection {
                rule: QuadRule::default().semi_infinite(),
            },
        )
    }

    pub fn mimo_imperfect_csi(a: f64, nt: usize, sigma2: f64) -> Result<Self> {
        if nt < 1 {
            return Err(Error::Validation("nt must be at least 1".into()));
        }
        if !(sigma2 > 0.0 && sigma2 < 1.0) {
            return Err(Error::domain(
                "mimo_imperfect_csi",
                format!("estimation-error variance must lie in (0, 1), got {sigma2}"),
            ));
        }
        Self::with(a, Model::MimoImperfectCsi { nt, sigma2 })
    }

    pub fn noncoherent(a: f64, sigma2: f64) -> Result<Self> {
        positive("sigma2", sigma2)?;
        Self::with(a, Model::Noncoherent { sigma2 })
    }

    pub fn poisson(a: f64, h: DiscreteDist, mu: DiscreteDist) -> Result<Self> {
        if h.values().iter().chain(mu.values()).any(|v| *v < 0.0) {
            return Err(Error::Validation(
                "fading and background supports must be nonnegative".into(),
            ));
        }
        // hθ + μ > 0 on [0, A] iff μ > 0 wherever it could be paired with θ = 0
        if mu.iter().any(|(m, p)| m == 0.0 && p > 0.0) {
            return Err(Error::domain(
                "poisson",
                "zero background intensity makes hθ + μ vanish at θ = 0",
            ));
        }
        Self::with(a, Model::Poisson { h, mu })
    }

    pub fn dithered_one_bit(a: f64, dither: DitherSet) -> Result<Self> {
        Self::with(a, Model::DitheredOneBit { dither })
    }

    pub fn truncated_awgn(a: f64, b: f64) -> Result<Self> {
        positive("truncation level B", b)?;
        Self::with(a, Model::TruncatedAwgn { b })
    }

    /// Scalar mean in correlated Gaussian noise, described by its
    /// (θ-independent) per-antenna Fisher information rate.
    pub fn correlated_awgn(a: f64, fisher_rate: f64) -> Result<Self> {
        positive("Fisher information rate", fisher_rate)?;
        Self::with(a, Model::CorrelatedAwgn { fisher_rate })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Peak amplitude A.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn kind_name(&self) -> &'static str {
        match self.model {
            Model::Awgn => "awgn",
            Model::ClippedAwgn { .. } => "clipped_awgn",
            Model::QuantizedAwgn { .. } => "quantized_awgn",
            Model::EnergyDetection { .. } => "energy_detection",
            Model::MimoImperfectCsi { .. } => "mimo_imperfect_csi",
            Model::Noncoherent { .. } => "noncoherent",
            Model::Poisson { .. } => "poisson",
            Model::DitheredOneBit { .. } => "dithered_1bit",
            Model::TruncatedAwgn { .. } => "truncated_awgn",
            Model::CorrelatedAwgn { .. } => "correlated_awgn",
        }
    }

    pub fn param_space(&self) -> ParameterSpace {
        let a = self.peak;
        let space = match self.model {
            Model::EnergyDetection { .. } | Model::Noncoherent { .. } | Model::Poisson { .. } => {
                ParameterSpace::interval(0.0, a)
            }
            Model::MimoImperfectCsi { nt, .. } => ParameterSpace::ball(2 * nt, a, true),
            _ => ParameterSpace::interval(-a, a),
        };
        space.expect("peak validated at construction")
    }

    /// Dimension d of Θ.
    pub fn dim(&self) -> usize {
        self.param_space().dim
    }

    /// Cost `c(θ) = θ²`; for ball spaces `theta` is the radius.
    #[inline]
    pub fn cost(&self, theta: f64) -> f64 {
        theta * theta
    }

    fn check_theta(&self, op: &'static str, theta: f64) -> Result<()> {
        let (lo, hi) = self.param_space().scalar_range();
        if !(theta >= lo && theta <= hi) {
            return Err(Error::domain(
                op,
                format!("θ = {theta} outside Θ = [{lo}, {hi}]"),
            ));
        }
        Ok(())
    }

    /// Scalar Fisher information J(θ) of a one-dimensional family.
    pub fn fisher(&self, theta: f64) -> Result<f64> {
        self.check_theta("fisher", theta)?;
        Ok(match &self.model {
            Model::Awgn => fisher_awgn(),
            Model::ClippedAwgn { b } => fisher_clipped_awgn(theta, *b),
            Model::QuantizedAwgn { thresholds } => quantized_fisher_unchecked(theta, thresholds),
            Model::EnergyDetection { rule } => fisher_energy_detection(theta, rule)?,
            Model::Noncoherent { sigma2 } => fisher_noncoherent(theta, *sigma2),
            Model::Poisson { h, mu } => fisher_poisson(theta, h, mu)?,
            Model::DitheredOneBit { dither } => fisher_dithered_1bit(theta, dither),
            Model::TruncatedAwgn { b } => fisher_truncated_awgn(theta, *b),
            Model::CorrelatedAwgn { fisher_rate } => *fisher_rate,
            Model::MimoImperfectCsi { .. } => {
                return Err(Error::Unsupported(
                    "MIMO Fisher information is a matrix; use fisher_matrix".into(),
                ))
            }
        })
    }

    /// Fisher information matrix at a point of Θ given in full coordinates.
    pub fn fisher_matrix(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        if theta.len() != d {
            return Err(Error::Validation(format!(
                "θ has {} coordinates, Θ has dimension {d}",
                theta.len()
            )));
        }
        match self.model {
            Model::MimoImperfectCsi { sigma2, .. } => {
                let r = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
                // the norm of a point on the sphere can round past A
                let r = if r > self.peak && r <= self.peak * (1.0 + 8.0 * f64::EPSILON) {
                    self.peak
                } else {
                    r
                };
                self.check_theta("fisher_matrix", r)?;
                let gamma = DMatrix::identity(d, d) * (1.0 - sigma2);
                Ok(mimo_fisher_matrix(theta, &gamma, sigma2))
            }
            _ => Ok(DMatrix::from_element(1, 1, self.fisher(theta[0])?)),
        }
    }

    /// `√det J(θ)`; for the isotropic MIMO channel `theta` is the radius.
    pub fn sqrt_det_fisher(&self, theta: f64) -> Result<f64> {
        match self.model {
            Model::MimoImperfectCsi { nt, sigma2 } => {
                self.check_theta("sqrt_det_fisher", theta)?;
                Ok(mimo_sqrt_det_fisher_unchecked(theta, nt, sigma2))
            }
            _ => Ok(self.fisher(theta)?.max(0.0).sqrt()),
        }
    }

    pub fn output_kind(&self) -> OutputKind {
        match &self.model {
            Model::QuantizedAwgn { thresholds } => OutputKind::Finite(thresholds.len() + 1),
            Model::DitheredOneBit { dither } => OutputKind::Finite(2 * dither.len()),
            Model::Poisson { .. } | Model::MimoImperfectCsi { .. } => OutputKind::PairWithState,
            _ => OutputKind::ContinuousScalar,
        }
    }

    /// Output pmf of a finite-output channel.
    ///
    /// Quantized ADC: entry ℓ is `P(t_{ℓ-1} < x + z ≤ t_ℓ)`. Dithered 1-bit:
    /// entries `2i` and `2i+1` are `(y = +1, s_i)` and `(y = -1, s_i)`.
    pub fn output_pmf(&self, theta: f64) -> Result<Vec<f64>> {
        self.check_theta("output_pmf", theta)?;
        match &self.model {
            Model::QuantizedAwgn { thresholds } => Ok(quantized_pmf(theta, thresholds)),
            Model::DitheredOneBit { dither } => {
                let mut out = Vec::with_capacity(2 * dither.len());
                for (&s, &w) in dither.points().iter().zip(dither.weights()) {
                    out.push(w * q_func(s - theta));
                    out.push(w * q_func(theta - s));
                }
                Ok(out)
            }
            _ => Err(Error::contract(
                "output_pmf",
                format!("{} channel does not have a finite output", self.kind_name()),
            )),
        }
    }

    /// `(ln p(y|θ), ∂θ ln p(y|θ))` for continuous-output channels.
    ///
    /// `y` is the real output for the Gaussian families, `ỹ = 2|y|²` for
    /// energy detection and `|y|` for the noncoherent channel. For the clipped
    /// channel, `|y| ≥ B` refers to the atoms at ±B.
    pub fn output_logdensity_dtheta(&self, y: f64, theta: f64) -> Result<(f64, f64)> {
        self.check_theta("output_logdensity_dtheta", theta)?;
        const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
        match self.model {
            Model::Awgn => {
                let u = y - theta;
                Ok((-0.5 * u * u - LN_SQRT_2PI, u))
            }
            Model::ClippedAwgn { b } => {
                if y >= b {
                    Ok((q_func(b - theta).ln(), inv_mills(b - theta)))
                } else if y <= -b {
                    Ok((q_func(b + theta).ln(), -inv_mills(b + theta)))
                } else {
                    let u = y - theta;
                    Ok((-0.5 * u * u - LN_SQRT_2PI, u))
                }
            }
            Model::TruncatedAwgn { b } => {
                if y.abs() > b {
                    return Ok((f64::NEG_INFINITY, 0.0));
                }
                let (lo, hi) = (-b - theta, b - theta);
                let z = gauss_interval_prob(lo, hi);
                let u = y - theta;
                // ∂θ ln Z = (φ(lo) - φ(hi)) / Z
                Ok((
                    -0.5 * u * u - LN_SQRT_2PI - z.ln(),
                    u - (phi(lo) - phi(hi)) / z,
                ))
            }
            Model::EnergyDetection { .. } => {
                if y < 0.0 {
                    return Ok((f64::NEG_INFINITY, 0.0));
                }
                let root = (2.0 * y).sqrt();
                let zarg = theta * root;
                let (i0s, i1s) = bessel_i01_scaled_unchecked(zarg);
                let dev = y.sqrt() - std::f64::consts::SQRT_2 * theta;
                Ok((
                    (0.5f64).ln() - 0.5 * dev * dev + i0s.ln(),
                    -2.0 * theta + root * i1s / i0s,
                ))
            }
            Model::Noncoherent { sigma2 } => {
                let s = 1.0 + sigma2 * theta * theta;
                let y2 = y * y;
                let ds = 2.0 * sigma2 * theta;
                Ok((
                    -(std::f64::consts::PI * s).ln() - y2 / s,
                    -ds / s + y2 * ds / (s * s),
                ))
            }
            Model::CorrelatedAwgn { fisher_rate } => {
                // marginal N(θ, 1/J)
                let u = y - theta;
                Ok((
                    -0.5 * fisher_rate * u * u - LN_SQRT_2PI + 0.5 * fisher_rate.ln(),
                    fisher_rate * u,
                ))
            }
            _ => Err(Error::contract(
                "output_logdensity_dtheta",
                format!("{} channel has no scalar output density", self.kind_name()),
            )),
        }
    }
}

fn validate_thresholds(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::Validation(
            "quantizer needs at least one threshold (L >= 2)".into(),
        ));
    }
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("thresholds must be finite".into()));
    }
    if t.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Validation(
            "thresholds must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Real AWGN: J(θ) = 1.
#[inline]
pub fn fisher_awgn() -> f64 {
    1.0
}

fn clip_term(s: f64) -> f64 {
    q_func(s) + s * phi(s) - phi(s) * inv_mills(s)
}

/// AWGN with output clipped to [-B, B].
pub fn fisher_clipped_awgn(theta: f64, b: f64) -> f64 {
    1.0 - clip_term(b + theta) - clip_term(b - theta)
}

fn quantized_pmf(theta: f64, t: &[f64]) -> Vec<f64> {
    let l = t.len() + 1;
    (0..l)
        .map(|k| {
            let lo = if k == 0 { f64::NEG_INFINITY } else { t[k - 1] };
            let hi = if k == l - 1 { f64::INFINITY } else { t[k] };
            gauss_interval_prob(lo - theta, hi - theta)
        })
        .collect()
}

fn quantized_fisher_unchecked(theta: f64, t: &[f64]) -> f64 {
    let l = t.len() + 1;
    let dens = |x: f64| if x.is_finite() { phi(x) } else { 0.0 };
    let mut j = 0.0;
    for k in 0..l {
        let lo = if k == 0 { f64::NEG_INFINITY } else { t[k - 1] };
        let hi = if k == l - 1 { f64::INFINITY } else { t[k] };
        let p = gauss_interval_prob(lo - theta, hi - theta);
        if p > 0.0 {
            let dp = dens(theta - lo) - dens(theta - hi);
            j += dp * dp / p;
        }
    }
    j
}

/// L-level quantized AWGN with thresholds `t_1 < … < t_{L-1}`.
pub fn fisher_quantized_awgn(theta: f64, thresholds: &[f64]) -> Result<f64> {
    validate_thresholds(thresholds)?;
    Ok(quantized_fisher_unchecked(theta, thresholds))
}

/// Energy detection: expectation of the squared score over the noncentral
/// χ² output, computed in `v = √ỹ` with scaled Bessel functions.
pub fn fisher_energy_detection(theta: f64, rule: &QuadRule) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::domain(
            "fisher_energy_detection",
            format!("θ must be nonnegative, got {theta}"),
        ));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let s2 = std::f64::consts::SQRT_2;
    let mean = s2 * theta;
    // p(v) = v exp(-(v - √2θ)²/2) e^{-z}I0(z), z = √2 θ v;  score = -2θ + √2 v I1/I0
    let integrand = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let dev = v - mean;
        let w = v * (-0.5 * dev * dev).exp();
        if w == 0.0 {
            return 0.0;
        }
        let (i0s, i1s) = bessel_i01_scaled_unchecked(mean * v);
        let score = -2.0 * theta + s2 * v * i1s / i0s;
        w * i0s * score * score
    };
    let est = integrate_semiinf(integrand, 0.0, rule)?;
    Ok(est.value)
}

/// Dense Fisher matrix of the imperfect-CSI MIMO channel for a general
/// real-lifted second moment Γ:
/// `J = 2/(1+σ²‖θ‖²) Γ + 4σ⁴/(1+σ²‖θ‖²)² θθᵀ`.
pub fn mimo_fisher_matrix(theta: &[f64], gamma: &DMatrix<f64>, sigma2: f64) -> DMatrix<f64> {
    let t = DVector::from_column_slice(theta);
    let r2 = t.norm_squared();
    let s = 1.0 + sigma2 * r2;
    gamma * (2.0 / s) + (&t * t.transpose()) * (4.0 * sigma2 * sigma2 / (s * s))
}

fn mimo_sqrt_det_fisher_unchecked(r: f64, nt: usize, sigma2: f64) -> f64 {
    let s = 1.0 + sigma2 * r * r;
    let base = (2.0 * (1.0 - sigma2) / s).powi(nt as i32);
    base * (1.0 + 2.0 * sigma2 * sigma2 / (1.0 - sigma2) * r * r / s).sqrt()
}

/// `√det J` of the isotropic imperfect-CSI MIMO channel as a function of
/// the radius `r = ‖θ‖`.
pub fn mimo_sqrt_det_fisher(r: f64, nt: usize, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2 < 1.0) {
        return Err(Error::domain(
            "mimo_sqrt_det_fisher",
            format!("σ² must lie in (0, 1), got {sigma2}"),
        ));
    }
    if !(r >= 0.0) {
        return Err(Error::domain(
            "mimo_sqrt_det_fisher",
            format!("radius must be nonnegative, got {r}"),
        ));
    }
    Ok(mimo_sqrt_det_fisher_unchecked(r, nt, sigma2))
}

/// Noncoherent channel: `J(θ) = 4σ⁴θ² / (1 + σ²θ²)²`.
pub fn fisher_noncoherent(theta: f64, sigma2: f64) -> f64 {
    let s = 1.0 + sigma2 * theta * theta;
    4.0 * sigma2 * sigma2 * theta * theta / (s * s)
}

/// Poisson intensity channel: `J(θ) = E_{h,μ}[h² / (hθ + μ)]`.
pub fn fisher_poisson(theta: f64, h: &DiscreteDist, mu: &DiscreteDist) -> Result<f64> {
    let mut j = 0.0;
    for (hv, hp) in h.iter() {
        for (mv, mp) in mu.iter() {
            if hp == 0.0 || mp == 0.0 {
                continue;
            }
            let den = hv * theta + mv;
            if den <= 0.0 {
                return Err(Error::domain(
                    "fisher_poisson",
                    format!("hθ + μ = {den} on the support (h = {hv}, μ = {mv}, θ = {theta})"),
                ));
            }
            j += hp * mp * hv * hv / den;
        }
    }
    Ok(j)
}

/// `φ²(x) / (Q(x)(1 - Q(x)))`, the 1-bit Fisher information at offset x.
fn one_bit_term(x: f64) -> f64 {
    let u = x.abs();
    phi(u) * inv_mills(u) / (1.0 - q_func(u))
}

/// Dithered 1-bit ADC: `E_s[φ²(θ-s) / (Q(θ-s)(1-Q(θ-s)))]`.
pub fn fisher_dithered_1bit(theta: f64, dither: &DitherSet) -> f64 {
    dither
        .points()
        .iter()
        .zip(dither.weights())
        .map(|(&s, &w)| w * one_bit_term(theta - s))
        .sum()
}

/// Gaussian mean observed only inside [-B, B]: the Fisher information is
/// the variance of the truncated normal.
pub fn fisher_truncated_awgn(theta: f64, b: f64) -> f64 {
    let (lo, hi) = (-b - theta, b - theta);
    let z = gauss_interval_prob(lo, hi);
    let m = (phi(lo) - phi(hi)) / z;
    1.0 + (lo * phi(lo) - hi * phi(hi)) / z - m * m
}

/// JSON form of a channel. Field names follow the usual symbols: `A` (peak
/// amplitude), `B` (clip level), `thresholds`, `nt`, `sigma2`, `h` and `mu`
/// (`{"values": [...], "probs": [...]}`), `dither` (`{"points": [...],
/// "weights": [...]}`, weights optional for uniform) and `fisher_rate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    Awgn {
        #[serde(rename = "A")]
        a: f64,
    },
    ClippedAwgn {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
    },
    QuantizedAwgn {
        #[serde(rename = "A")]
        a: f64,
        thresholds: Vec<f64>,
    },
    EnergyDetection {
        #[serde(rename = "A")]
        a: f64,
    },
    MimoImperfectCsi {
        #[serde(rename = "A")]
        a: f64,
        nt: usize,
        sigma2: f64,
    },
    Noncoherent {
        #[serde(rename = "A")]
        a: f64,
        sigma2: f64,
    },
    Poisson {
        #[serde(rename = "A")]
        a: f64,
        h: DiscreteDist,
        mu: DiscreteDist,
    },
    #[serde(rename = "dithered_1bit")]
    DitheredOneBit {
        #[serde(rename = "A")]
        a: f64,
        dither: DitherSet,
    },
    TruncatedAwgn {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
    },
    CorrelatedAwgn {
        #[serde(rename = "A")]
        a: f64,
        fisher_rate: f64,
    },
}

impl TryFrom<ChannelConfig> for Channel {
    type Error = Error;
    fn try_from(cfg: ChannelConfig) -> Result<Self> {
        match cfg {
            ChannelConfig::Awgn { a } => Channel::awgn(a),
            ChannelConfig::ClippedAwgn { a, b } => Channel::clipped_awgn(a, b),
            ChannelConfig::QuantizedAwgn { a, thresholds } => {
                Channel::quantized_awgn(a, thresholds)
            }
            ChannelConfig::EnergyDetection { a } => Channel::energy_detection(a),
            ChannelConfig::MimoImperfectCsi { a, nt, sigma2 } => {
                Channel::mimo_imperfect_csi(a, nt, sigma2)
            }
            ChannelConfig::Noncoherent { a, sigma2 } => Channel::noncoherent(a, sigma2),
            ChannelConfig::Poisson { a, h, mu } => Channel::poisson(a, h, mu),
            ChannelConfig::DitheredOneBit { a, dither } => Channel::dithered_one_bit(a, dither),
            ChannelConfig::TruncatedAwgn { a, b } => Channel::truncated_awgn(a, b),
            ChannelConfig::CorrelatedAwgn { a, fisher_rate } => {
                Channel::correlated_awgn(a, fisher_rate)
            }
        }
    }
}

impl From<Channel> for ChannelConfig {
    fn from(ch: Channel) -> Self {
        let a = ch.peak;
        match ch.model {
            Model::Awgn => ChannelConfig::Awgn { a },
            Model::ClippedAwgn { b } => ChannelConfig::ClippedAwgn { a, b },
            Model::QuantizedAwgn { thresholds } => ChannelConfig::QuantizedAwgn { a, thresholds },
            Model::EnergyDetection { .. } => ChannelConfig::EnergyDetection { a },
            Model::MimoImperfectCsi { nt, sigma2 } => {
                ChannelConfig::MimoImperfectCsi { a, nt, sigma2 }
            }
            Model::Noncoherent { sigma2 } => ChannelConfig::Noncoherent { a, sigma2 },
            Model::Poisson { h, mu } => ChannelConfig::Poisson { a, h, mu },
            Model::DitheredOneBit { dither } => ChannelConfig::DitheredOneBit { a, dither },
            Model::TruncatedAwgn { b } => ChannelConfig::TruncatedAwgn { a, b },
            Model::CorrelatedAwgn { fisher_rate } => {
                ChannelConfig::CorrelatedAwgn { a, fisher_rate }
            }
        }
    }
}

impl Channel {
    /// Parses the JSON form described on [`ChannelConfig`].
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("channel JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel serializes")
    }
}
