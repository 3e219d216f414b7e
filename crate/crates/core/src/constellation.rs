//! Finite constellations shaped by the tilted Jeffreys prior.
//!
//! A Jeffreys constellation pushes the midpoint grid `u_i = (2i-1)/(2M)`
//! through the prior's inverse CDF and shrinks the result by
//! `c_P = min(1, √(P / mean θ²))` so that the average power is at most P.
//! When the inverse CDF is expensive, [`fit_poly_density`] first fits a
//! polynomial density to the prior by a log-barrier Newton method; its CDF
//! is a polynomial and is inverted by bisection.

use crate::channels::{Channel, ParamShape};
use crate::error::{Error, Result};
use crate::jeffreys::{solve_lambda_star, TiltedPrior};
use crate::quad::simpson_grid;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Nodes of the fixed integration grid used by the polynomial fit.
pub const FIT_GRID: usize = 4097;
/// A stage is stationary once the predicted Newton decrease is below this
/// fraction of the objective, even if the gradient norm has not reached
/// `newton_tol` (its floor grows like 1/min f).
const STATIONARY_DECREMENT: f64 = 1e-15;
/// Decrement accepted when no step decreases the objective in floating point.
const STALL_DECREMENT: f64 = 1e-10;

/// Scalar input alphabet with probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub points: Vec<f64>,
    pub probs: Vec<f64>,
    /// `Σ p_i θ_i²`.
    pub avg_power: f64,
    /// `max θ_i²`.
    pub peak_power: f64,
}

impl Constellation {
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::Validation(format!(
                "constellation needs matching nonempty points ({}) and probabilities ({})",
                points.len(),
                probs.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite())
            || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0))
        {
            return Err(Error::Validation(
                "constellation entries must be finite, probabilities >= 0".into(),
            ));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("probabilities sum to {s}")));
        }
        let avg_power = points.iter().zip(&probs).map(|(x, p)| p * x * x).sum();
        let peak_power = points.iter().map(|x| x * x).fold(0.0, f64::max);
        Ok(Constellation {
            points,
            probs,
            avg_power,
            peak_power,
        })
    }

    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Vector constellation built as radii × directions.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialConstellation {
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    /// Row-major: all directions for the first radius, then the next.
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    pub avg_power: f64,
    pub peak_power: f64,
}

/// `(2i - 1) / (2M)`, i = 1..M.
pub fn midpoint_grid(m: usize) -> Vec<f64> {
    (1..=m)
        .map(|i| (2 * i - 1) as f64 / (2 * m) as f64)
        .collect()
}

/// Shrink factor `min(1, √(P / mean x²))` for equiprobable raw points.
pub fn power_scale(raw: &[f64], power: f64) -> f64 {
    let mean = raw.iter().map(|x| x * x).sum::<f64>() / raw.len() as f64;
    if mean <= power {
        1.0
    } else {
        (power / mean).sqrt()
    }
}

fn scaled_uniform(raw: Vec<f64>, power: f64) -> Result<Constellation> {
    let c = power_scale(&raw, power);
    Constellation::uniform(raw.into_iter().map(|x| c * x).collect())
}

fn check_size(op: &'static str, m: usize, power: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(
            op,
            format!("constellation size must be >= 2, got {m}"),
        ));
    }
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::domain(
            op,
            format!("power budget must be finite and > 0, got {power}"),
        ));
    }
    Ok(())
}

fn scalar_only(ch: &Channel, op: &'static str) -> Result<(f64, f64)> {
    match ch.param_space().shape {
        ParamShape::Interval { lo, hi } => Ok((lo, hi)),
        ParamShape::Ball { .. } => Err(Error::Unsupported(format!(
            "{op} needs a one-dimensional parameter space; use radial_constellation_isotropic"
        ))),
    }
}

/// `M` equiprobable points `c_P F⁻¹(u_i)` of the optimally tilted prior.
pub fn jeffreys_constellation(ch: &Channel, power: f64, m: usize) -> Result<Constellation> {
    check_size("jeffreys_constellation", m, power)?;
    scalar_only(ch, "jeffreys_constellation")?;
    let sol = solve_lambda_star(ch, power)?;
    let prior = TiltedPrior::new(ch, sol.lambda_star, power)?;
    prior_constellation(&prior, power, m)
}

/// Same construction for a given prior.
pub fn prior_constellation(prior: &TiltedPrior, power: f64, m: usize) -> Result<Constellation> {
    check_size("prior_constellation", m, power)?;
    scalar_only(prior.channel(), "prior_constellation")?;
    let raw = midpoint_grid(m)
        .into_iter()
        .map(|u| prior.cdf_inverse(u))
        .collect::<Result<Vec<_>>>()?;
    scaled_uniform(raw, power)
}

/// Baseline: `M` equally spaced points on Θ including the endpoints, scaled
/// by the same `c_P` rule.
pub fn pam_constellation(ch: &Channel, power: f64, m: usize) -> Result<Constellation> {
    check_size("pam_constellation", m, power)?;
    let (lo, hi) = scalar_only(ch, "pam_constellation")?;
    let raw = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        .collect();
    scaled_uniform(raw, power)
}

/// Radii from the radial marginal's inverse CDF on the midpoint grid,
/// combined with every supplied unit direction.
pub fn radial_constellation_isotropic(
    ch: &Channel,
    power: f64,
    radial_levels: usize,
    directions: &[Vec<f64>],
) -> Result<RadialConstellation> {
    let ps = ch.param_space();
    if !ps.isotropic {
        return Err(Error::Unsupported(format!(
            "{} channel is not isotropic",
            ch.kind_name()
        )));
    }
    if radial_levels < 1 || directions.is_empty() {
        return Err(Error::domain(
            "radial_constellation_isotropic",
            "need at least one radial level and one direction",
        ));
    }
    for d in directions {
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if d.len() != ps.dim || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "directions must be unit vectors in R^{}, got length {} and norm {norm}",
                ps.dim,
                d.len()
            )));
        }
    }
    let sol = solve_lambda_star(ch, power)?;
    let prior = TiltedPrior::new(ch, sol.lambda_star, power)?;
    let raw = midpoint_grid(radial_levels)
        .into_iter()
        .map(|u| prior.cdf_inverse(u))
        .collect::<Result<Vec<_>>>()?;
    let c = power_scale(&raw, power);
    let radii: Vec<f64> = raw.into_iter().map(|r| c * r).collect();
    let mut points = Vec::with_capacity(radii.len() * directions.len());
    for r in &radii {
        for d in directions {
            points.push(d.iter().map(|x| r * x).collect());
        }
    }
    let n = points.len();
    let avg_power = radii.iter().map(|r| r * r).sum::<f64>() / radii.len() as f64;
    let peak_power = radii.iter().map(|r| r * r).fold(0.0, f64::max);
    Ok(RadialConstellation {
        radii,
        directions: directions.to_vec(),
        points,
        probs: vec![1.0 / n as f64; n],
        avg_power,
        peak_power,
    })
}

/// Barrier continuation settings for the polynomial fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSchedule {
    pub gamma_0: f64,
    pub decay: f64,
    pub gamma_min: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for BarrierSchedule {
    fn default() -> Self {
        BarrierSchedule {
            gamma_0: 1e-2,
            decay: 0.1,
            gamma_min: 1e-8,
            newton_tol: 1e-9,
            max_newton: 1000,
        }
    }
}

impl BarrierSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_0 > self.gamma_min && self.gamma_min > 0.0)
            || !(self.decay > 0.0 && self.decay < 1.0)
            || !(self.newton_tol > 0.0)
            || self.max_newton < 1
        {
            return Err(Error::Validation(format!(
                "invalid barrier schedule {self:?}"
            )));
        }
        Ok(())
    }

    /// Barrier weights visited, ending exactly at `gamma_min`.
    pub fn stages(&self) -> Vec<f64> {
        let mut out = vec![];
        let mut g = self.gamma_0;
        while g > self.gamma_min * (1.0 + 1e-9) {
            out.push(g);
            g *= self.decay;
        }
        out.push(self.gamma_min);
        out
    }
}

/// Polynomial density on `[lo, hi]`, stored in the scaled variable
/// `t = (θ - mid) / half ∈ [-1, 1]` as `f(θ) = g(t) / half`,
/// `g(t) = Σ η_i t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDensity {
    lo: f64,
    hi: f64,
    eta: Vec<f64>,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

/// `∫_{-1}^1 t^i dt`.
fn moment(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        2.0 / (i + 1) as f64
    } else {
        0.0
    }
}

impl PolyDensity {
    /// Density from scaled-variable coefficients; `eta[0]` is recomputed from
    /// the normalization identity.
    pub fn from_scaled(lo: f64, hi: f64, mut eta: Vec<f64>) -> Result<Self> {
        if !(lo < hi) || eta.is_empty() {
            return Err(Error::Validation(
                "polynomial density needs lo < hi and >= 1 coefficient".into(),
            ));
        }
        eta[0] = free_to_intercept(&eta[1..]);
        let p = PolyDensity { lo, hi, eta };
        let (nodes, _) = simpson_grid(-1.0, 1.0, FIT_GRID);
        if let Some(t) = nodes.iter().find(|t| !(horner(&p.eta, **t) > 0.0)) {
            return Err(Error::Positivity(format!(
                "polynomial density is not positive at θ = {}",
                p.theta_of(*t)
            )));
        }
        Ok(p)
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::from_scaled(lo, hi, vec![0.5])
    }

    pub fn degree(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn scaled_coeffs(&self) -> &[f64] {
        &self.eta
    }

    fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    fn t_of(&self, theta: f64) -> f64 {
        (theta - self.mid()) / self.half()
    }

    fn theta_of(&self, t: f64) -> f64 {
        self.mid() + self.half() * t
    }

    /// Coefficients ξ_i of `f(θ) = Σ ξ_i θ^i`.
    pub fn coeffs(&self) -> Vec<f64> {
        let (m, h) = (self.mid(), self.half());
        let n = self.eta.len();
        let mut xi = vec![0.0; n];
        // η_i ((θ - m)/h)^i expanded binomially
        for (i, e) in self.eta.iter().enumerate() {
            let scale = e / h.powi(i as i32 + 1);
            let mut binom = 1.0;
            for (k, x) in xi.iter_mut().enumerate().take(i + 1) {
                *x += scale * binom * (-m).powi((i - k) as i32);
                binom = binom * (i - k) as f64 / (k + 1) as f64;
            }
        }
        xi
    }

    pub fn density(&self, theta: f64) -> f64 {
        if !(theta >= self.lo && theta <= self.hi) {
            return 0.0;
        }
        horner(&self.eta, self.t_of(theta)) / self.half()
    }

    fn cdf_t(&self, t: f64) -> f64 {
        // Σ η_i (t^{i+1} - (-1)^{i+1}) / (i+1)
        let anti: Vec<f64> = std::iter::once(0.0)
            .chain(self.eta.iter().enumerate().map(|(i, e)| e / (i + 1) as f64))
            .collect();
        horner(&anti, t) - horner(&anti, -1.0)
    }

    /// Closed-form CDF.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        if theta.is_nan() {
            return Err(Error::domain("poly_cdf", "argument is NaN"));
        }
        if theta <= self.lo {
            return Ok(0.0);
        }
        if theta >= self.hi {
            return Ok(1.0);
        }
        Ok(self.cdf_t(self.t_of(theta)).clamp(0.0, 1.0))
    }

    /// Inverse CDF by bisection to `|F(θ) - u| < 1e-12`.
    pub fn cdf_inverse(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(
                "poly_cdf_inverse",
                format!("u must lie in [0, 1], got {u}"),
            ));
        }
        let (mut a, mut b) = (-1.0f64, 1.0f64);
        if u == 0.0 {
            return Ok(self.lo);
        }
        if u == 1.0 {
            return Ok(self.hi);
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let f = self.cdf_t(mid);
            if (f - u).abs() < 1e-12 {
                return Ok(self.theta_of(mid));
            }
            if f < u {
                a = mid;
            } else {
                b = mid;
            }
            if b - a <= f64::EPSILON {
                break;
            }
        }
        Ok(self.theta_of(0.5 * (a + b)))
    }
}

fn free_to_intercept(free: &[f64]) -> f64 {
    let s: f64 = free
        .iter()
        .enumerate()
        .map(|(k, e)| e * moment(k + 1))
        .sum();
    (1.0 - s) / moment(0)
}

/// The penalized fitting objective
/// `L(η) = D(g ‖ v) + γ D(u ‖ g)` in the scaled variable, where `v` is the
/// target density and `u` the uniform density on [-1, 1], as a function of
/// the free coefficients `η_1 … η_d`.
#[derive(Debug, Clone)]
pub struct PolyObjective {
    lo: f64,
    hi: f64,
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_target: Vec<f64>,
    /// `∂g/∂η_i = t^i - α_i/α_0` at every node.
    basis: Vec<Vec<f64>>,
}

impl PolyObjective {
    /// Objective for the prior's density over its (interval) support.
    pub fn new(prior: &TiltedPrior, degree: usize) -> Result<Self> {
        if prior.is_radial() {
            return Err(Error::Unsupported(
                "polynomial fit needs a one-dimensional prior".into(),
            ));
        }
        let (lo, hi) = prior.support();
        let half = 0.5 * (hi - lo);
        let (nodes, weights) = simpson_grid(-1.0, 1.0, FIT_GRID);
        let spacing = 2.0 / (FIT_GRID - 1) as f64;
        let ln_target = nodes
            .iter()
            .map(|t| {
                let at = |t: f64| prior.ln_density(0.5 * (lo + hi) + half * t) + half.ln();
                let v = at(*t);
                if v.is_finite() {
                    v
                } else {
                    // target vanishes at an endpoint: evaluate just inside
                    at(t - t.signum() * 1e-3 * spacing)
                }
            })
            .collect::<Vec<_>>();
        if ln_target.iter().any(|v| !v.is_finite()) {
            return Err(Error::Positivity("target density vanishes inside Θ".into()));
        }
        let basis = (1..=degree)
            .map(|i| {
                let shift = moment(i) / moment(0);
                nodes.iter().map(|t| t.powi(i as i32) - shift).collect()
            })
            .collect();
        Ok(PolyObjective {
            lo,
            hi,
            degree,
            nodes,
            weights,
            ln_target,
            basis,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn coeffs(&self, free: &[f64]) -> Vec<f64> {
        let mut eta = Vec::with_capacity(free.len() + 1);
        eta.push(free_to_intercept(free));
        eta.extend_from_slice(free);
        eta
    }

    fn g_values(&self, free: &[f64]) -> Option<Vec<f64>> {
        let eta = self.coeffs(free);
        let g: Vec<f64> = self.nodes.iter().map(|t| horner(&eta, *t)).collect();
        if g.iter().all(|v| *v > 0.0) {
            Some(g)
        } else {
            None
        }
    }

    /// Objective value; `+∞` where the polynomial is not positive on the grid.
    pub fn value(&self, free: &[f64], gamma: f64) -> f64 {
        match self.g_values(free) {
            None => f64::INFINITY,
            Some(g) => self.value_at(&g, gamma),
        }
    }

    fn value_at(&self, g: &[f64], gamma: f64) -> f64 {
        let mut kl = 0.0;
        let mut barrier = 0.0;
        for ((gk, w), lt) in g.iter().zip(&self.weights).zip(&self.ln_target) {
            kl += w * gk * (gk.ln() - lt);
            barrier += w * 0.5 * (0.5 / gk).ln();
        }
        kl + gamma * barrier
    }

    /// `∫ b_i ψ` with `ψ = ln g - ln v - γ / (2g)`.
    pub fn gradient(&self, free: &[f64], gamma: f64) -> Result<Vec<f64>> {
        let g = self
            .g_values(free)
            .ok_or_else(|| Error::Positivity("iterate left the positive cone".into()))?;
        Ok(self.gradient_at(&g, gamma))
    }

    fn gradient_at(&self, g: &[f64], gamma: f64) -> Vec<f64> {
        let psi: Vec<f64> = (0..g.len())
            .map(|k| self.weights[k] * (g[k].ln() - self.ln_target[k] - 0.5 * gamma / g[k]))
            .collect();
        self.basis
            .iter()
            .map(|b| b.iter().zip(&psi).map(|(x, y)| x * y).sum())
            .collect()
    }

    /// `∫ b bᵀ (1/g + γ / (2 g²))`.
    pub fn hessian(&self, free: &[f64], gamma: f64) -> Result<DMatrix<f64>> {
        let g = self
            .g_values(free)
            .ok_or_else(|| Error::Positivity("iterate left the positive cone".into()))?;
        Ok(self.hessian_at(&g, gamma))
    }

    fn hessian_at(&self, g: &[f64], gamma: f64) -> DMatrix<f64> {
        let d = self.degree;
        let kern: Vec<f64> = (0..g.len())
            .map(|k| self.weights[k] * (1.0 / g[k] + 0.5 * gamma / (g[k] * g[k])))
            .collect();
        let mut h = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let v: f64 = (0..g.len())
                    .map(|k| self.basis[i][k] * self.basis[j][k] * kern[k])
                    .sum();
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }

    /// `D(f ‖ w)` in nats on the fit grid.
    pub fn divergence(&self, free: &[f64]) -> f64 {
        self.value(free, 0.0)
    }
}

/// One accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitIterate {
    pub gamma: f64,
    pub objective: f64,
    pub grad_norm: f64,
    pub min_hessian_eig: f64,
    pub step: f64,
}

/// Fitted density together with the solver trace.
#[derive(Debug, Clone)]
pub struct PolyFit {
    pub density: PolyDensity,
    pub trace: Vec<FitIterate>,
    /// Gradient norm at the final barrier weight.
    pub final_grad_norm: f64,
    /// Half the squared Newton decrement there.
    pub final_decrement: f64,
    /// `D(f ‖ w)` in nats on the fit grid.
    pub divergence: f64,
}

/// Fits a degree-`degree` polynomial density to the tilted prior of
/// `channel` at tilt `lambda`.
pub fn fit_poly_density(
    ch: &Channel,
    lambda: f64,
    degree: usize,
    schedule: &BarrierSchedule,
) -> Result<PolyFit> {
    let prior = TiltedPrior::new(ch, lambda, 0.0)?;
    fit_poly_to_prior(&prior, degree, schedule)
}

pub fn fit_poly_to_prior(
    prior: &TiltedPrior,
    degree: usize,
    schedule: &BarrierSchedule,
) -> Result<PolyFit> {
    schedule.validate()?;
    let obj = PolyObjective::new(prior, degree)?;
    let mut free = vec![0.0; degree];
    let mut trace = Vec::new();
    let mut grad_norm = 0.0;
    let mut decrement = 0.0;
    for gamma in schedule.stages() {
        let mut g = obj.g_values(&free).expect("iterates stay positive");
        let mut value = obj.value_at(&g, gamma);
        let mut iter = 0;
        loop {
            let grad = obj.gradient_at(&g, gamma);
            grad_norm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if grad_norm < schedule.newton_tol || degree == 0 {
                decrement = 0.0;
                break;
            }
            let hess = obj.hessian_at(&g, gamma);
            let chol = hess.cholesky().ok_or(Error::Convergence {
                op: "fit_poly_density (Hessian not positive definite)",
                iterations: iter,
                residual: grad_norm,
            })?;
            let grad = DVector::from_vec(grad);
            let dir = chol.solve(&-&grad);
            // half the squared Newton decrement: predicted objective decrease
            decrement = -0.5 * grad.dot(&dir);
            if decrement < STATIONARY_DECREMENT * value.abs().max(1.0) {
                break;
            }
            if iter == schedule.max_newton {
                return Err(Error::Convergence {
                    op: "fit_poly_density",
                    iterations: iter,
                    residual: grad_norm,
                });
            }
            iter += 1;
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let cand: Vec<f64> = free
                    .iter()
                    .zip(dir.iter())
                    .map(|(x, d)| x + step * d)
                    .collect();
                if let Some(gc) = obj.g_values(&cand) {
                    let vc = obj.value_at(&gc, gamma);
                    if vc < value {
                        accepted = Some((cand, gc, vc));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((cand, gc, vc)) = accepted else {
                if decrement < STALL_DECREMENT * value.abs().max(1.0) {
                    log::debug!("fit at rounding floor: γ = {gamma:e}, |∇| = {grad_norm:e}");
                    break;
                }
                return Err(Error::Convergence {
                    op: "fit_poly_density (line search)",
                    iterations: iter,
                    residual: grad_norm,
                });
            };
            free = cand;
            g = gc;
            value = vc;
            let min_eig = SymmetricEigen::new(obj.hessian_at(&g, gamma))
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            trace.push(FitIterate {
                gamma,
                objective: value,
                grad_norm,
                min_hessian_eig: min_eig,
                step,
            });
        }
        log::debug!("stage γ = {gamma:e}: {iter} Newton steps, |∇| = {grad_norm:e}");
    }
    let divergence = obj.divergence(&free);
    let mut eta = vec![0.0];
    eta.extend_from_slice(&free);
    Ok(PolyFit {
        density: PolyDensity::from_scaled(obj.lo, obj.hi, eta)?,
        trace,
        final_grad_norm: grad_norm,
        final_decrement: decrement,
        divergence,
    })
}

/// Jeffreys-style constellation from a fitted polynomial density.
pub fn approx_jeffreys_constellation(
    p: &PolyDensity,
    power: f64,
    m: usize,
) -> Result<Constellation> {
    check_size("approx_jeffreys_constellation", m, power)?;
    let raw = midpoint_grid(m)
        .into_iter()
        .map(|u| p.cdf_inverse(u))
        .collect::<Result<Vec<_>>>()?;
    scaled_uniform(raw, power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_constellations() {
        let ch = Channel::awgn(2.0).unwrap();
        let c = jeffreys_constellation(&ch, 4.0 / 3.0, 2).unwrap();
        assert!((c.points[0] + 1.0).abs() < 1e-10 && (c.points[1] - 1.0).abs() < 1e-10);
        let c = jeffreys_constellation(&ch, 4.0, 4).unwrap();
        let want = [-1.5, -0.5, 0.5, 1.5];
        for (g, w) in c.points.iter().zip(want) {
            assert!((g - w).abs() < 1e-10);
        }
        assert!((c.avg_power - 0.3125 * 4.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_and_power_limited() {
        let ch = Channel::clipped_awgn(1.0, 0.5).unwrap();
        let c = jeffreys_constellation(&ch, 0.1, 16).unwrap();
        for i in 0..8 {
            assert!((c.points[i] + c.points[15 - i]).abs() < 1e-9);
        }
        assert!(c.avg_power <= 0.1 + 1e-12);
        assert!(c.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pam_baseline() {
        let ch = Channel::awgn(1.0).unwrap();
        let c = pam_constellation(&ch, 1.0, 5).unwrap();
        assert_eq!(c.points, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let c = pam_constellation(&ch, 0.1, 5).unwrap();
        assert!((c.avg_power - 0.1).abs() < 1e-12);
    }

    #[test]
    fn poly_degree_zero() {
        let p = PolyDensity::uniform(-1.0, 1.0).unwrap();
        assert_eq!(p.coeffs(), vec![0.5]);
        assert!((p.cdf_inverse(0.75).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(p.cdf(-1.0).unwrap(), 0.0);
        assert_eq!(p.cdf(1.0).unwrap(), 1.0);
        assert!(p.cdf_inverse(-0.1).is_err());
        let ch = Channel::awgn(1.0).unwrap();
        let fit = fit_poly_density(&ch, 0.0, 0, &BarrierSchedule::default()).unwrap();
        assert!((fit.density.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!(fit.divergence.abs() < 1e-12);
        let c = approx_jeffreys_constellation(&fit.density, 1.0, 4).unwrap();
        let exact = jeffreys_constellation(&ch, 1.0, 4).unwrap();
        for (a, b) in c.points.iter().zip(&exact.points) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn monomial_coefficients_match_scaled_form() {
        let p = PolyDensity::from_scaled(1.0, 3.0, vec![0.0, 0.1, 0.2, -0.05]).unwrap();
        let xi = p.coeffs();
        for th in [1.0f64, 1.7, 2.2, 3.0] {
            let direct: f64 = xi
                .iter()
                .enumerate()
                .map(|(i, c)| c * th.powi(i as i32))
                .sum();
            assert!((direct - p.density(th)).abs() < 1e-12);
        }
        let f_hi: f64 = xi
            .iter()
            .enumerate()
            .map(|(i, c)| c * (3f64.powi(i as i32 + 1) - 1f64.powi(i as i32 + 1)) / (i + 1) as f64)
            .sum();
        assert!((f_hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_stages() {
        let s = BarrierSchedule::default().stages();
        assert_eq!(s.len(), 7);
        assert_eq!(*s.last().unwrap(), 1e-8);
        let bad = BarrierSchedule {
            decay: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn radial_design() {
        let ch = Channel::mimo_imperfect_csi(1.0, 1, 0.2).unwrap();
        let dirs = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let c = radial_constellation_isotropic(&ch, 10.0, 1, &dirs).unwrap();
        assert_eq!(c.points.len(), 2);
        assert!((c.points[0][0] + c.points[1][0]).abs() < 1e-15);
        assert_eq!(c.points[0][1], 0.0);
        let awgn = Channel::awgn(1.0).unwrap();
        assert!(matches!(
            radial_constellation_isotropic(&awgn, 1.0, 2, &[vec![1.0]]),
            Err(Error::Unsupported(_))
        ));
        assert!(radial_constellation_isotropic(&ch, 1.0, 2, &[vec![1.0, 1.0]]).is_err());
    }

    fn awgn_target() -> (Channel, f64) {
        let ch = Channel::awgn(1.0).unwrap();
        let lam = solve_lambda_star(&ch, 1.0 / 9.0).unwrap().lambda_star;
        (ch, lam)
    }

    #[test]
    fn degree_eight_fit_is_close() {
        let (ch, lam) = awgn_target();
        let fit = fit_poly_density(&ch, lam, 8, &BarrierSchedule::default()).unwrap();
        let prior = TiltedPrior::new(&ch, lam, 1.0 / 9.0).unwrap();
        // divergence by adaptive quadrature, independent of the fit grid
        let kl = crate::quad::integrate_interval(
            |t| {
                let f = fit.density.density(t);
                f * (f.ln() - prior.ln_density(t))
            },
            -1.0,
            1.0,
            &crate::quad::QuadRule::default(),
        )
        .unwrap()
        .value;
        assert!(kl < 1e-3, "{kl}");
        assert!(fit.final_grad_norm < BarrierSchedule::default().newton_tol);
        for u in [0.01, 0.37, 0.99] {
            let t = fit.density.cdf_inverse(u).unwrap();
            assert!((fit.density.cdf(t).unwrap() - u).abs() < 1e-12);
        }
        let exact = jeffreys_constellation(&ch, 1.0 / 9.0, 16).unwrap();
        let approx = approx_jeffreys_constellation(&fit.density, 1.0 / 9.0, 16).unwrap();
        for (a, b) in approx.points.iter().zip(&exact.points) {
            assert!((a - b).abs() < 1e-2);
        }
        let quarter = approx_jeffreys_constellation(&fit.density, 0.25, 16).unwrap();
        assert!(quarter.avg_power <= 0.25 + 1e-12);
    }

    #[test]
    fn fit_trace_properties() {
        let (ch, lam) = awgn_target();
        let a = fit_poly_density(&ch, lam, 8, &BarrierSchedule::default()).unwrap();
        let b = fit_poly_density(&ch, lam, 8, &BarrierSchedule::default()).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        assert_eq!(a.density, b.density);
        assert!(a.trace.iter().all(|it| it.min_hessian_eig > 0.0));
        for w in a.trace.windows(2) {
            if w[0].gamma == w[1].gamma {
                assert!(w[1].objective <= w[0].objective);
            }
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let (ch, lam) = awgn_target();
        let prior = TiltedPrior::new(&ch, lam, 0.0).unwrap();
        let obj = PolyObjective::new(&prior, 4).unwrap();
        let x = vec![0.01, -0.12, -0.005, 0.03];
        let gamma = 1e-3;
        let g = obj.gradient(&x, gamma).unwrap();
        let h = obj.hessian(&x, gamma).unwrap();
        let step = 1e-5;
        for i in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            let fd = (obj.value(&xp, gamma) - obj.value(&xm, gamma)) / (2.0 * step);
            assert!(
                ((fd - g[i]) / g[i]).abs() < 1e-6,
                "grad {i}: {fd} vs {}",
                g[i]
            );
            let gp = obj.gradient(&xp, gamma).unwrap();
            let gm = obj.gradient(&xm, gamma).unwrap();
            for j in 0..4 {
                let fd = (gp[j] - gm[j]) / (2.0 * step);
                assert!((fd - h[(j, i)]).abs() < 1e-6 * h[(j, i)].abs().max(1.0));
            }
        }
    }
}
