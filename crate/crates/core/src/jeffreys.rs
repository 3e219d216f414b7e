//! Tilted Jeffreys priors, the Jeffreys factor and the asymptotic capacity.
//!
//! For a channel with Fisher information `J`, cost `c` and tilt `λ ≥ 0`, the
//! tilted Jeffreys prior is `w(θ) ∝ 2^{-λ c(θ)} √det J(θ)` and the Jeffreys
//! factor is `JF(λ) = ∫ 2^{-λ(c(θ) - P)} √det J(θ) dθ`. The optimal tilt λ*
//! is the smallest λ whose prior meets the average-power budget, and the
//! capacity with `n_r` receive antennas behaves like
//! `(d/2) log₂(n_r / 2πe) + log₂ JF(λ*)`.
//!
//! Isotropic parameter spaces (balls in R^d) are handled through the radius:
//! every integral over Θ becomes `Surf(S^{d-1}) ∫_0^A (…) r^{d-1} dr`.

use crate::channels::{Channel, ParamShape};
use crate::error::{Error, Result};
use crate::quad::{integrate_interval, QuadRule};
use crate::specfun::log_gamma_unchecked;
use std::f64::consts::{LN_2, PI};

/// `2^{-λc}` is below `e^{-TAIL_CUT}` outside the integration window.
const TAIL_CUT: f64 = 745.0;
/// Equal panels per integration window.
const PANELS: usize = 16;
const MAX_DOUBLINGS: usize = 60;
const TIE_SLACK: f64 = 1e-12;

/// Surface area of the unit sphere in R^d, `2π^{d/2} / Γ(d/2)`.
pub fn sphere_surface(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (LN_2 + h * PI.ln() - log_gamma_unchecked(h)).exp()
}

fn quad_rule() -> QuadRule {
    QuadRule::default().with_rel_tol(1e-12)
}

/// Radial (or scalar) integration geometry of a channel's Θ.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    lo: f64,
    hi: f64,
    /// d - 1 for balls, 0 for intervals.
    radial_power: i32,
    surface: f64,
}

impl Geometry {
    fn of(ch: &Channel) -> Self {
        let ps = ch.param_space();
        match ps.shape {
            ParamShape::Interval { lo, hi } => Geometry {
                lo,
                hi,
                radial_power: 0,
                surface: 1.0,
            },
            ParamShape::Ball { radius } => Geometry {
                lo: 0.0,
                hi: radius,
                radial_power: ps.dim as i32 - 1,
                surface: sphere_surface(ps.dim),
            },
        }
    }

    #[inline]
    fn jacobian(&self, r: f64) -> f64 {
        if self.radial_power == 0 {
            1.0
        } else {
            self.surface * r.powi(self.radial_power)
        }
    }

    /// Sub-interval outside of which the tilt factor is negligible.
    fn window(&self, lambda: f64) -> (f64, f64) {
        if lambda <= 0.0 {
            return (self.lo, self.hi);
        }
        let w = (TAIL_CUT / (lambda * LN_2)).sqrt();
        let center = 0.0f64.clamp(self.lo, self.hi);
        ((center - w).max(self.lo), (center + w).min(self.hi))
    }
}

/// Panelized integral of a nonnegative integrand over `[a, b]`, returning
/// the per-panel values. The absolute tolerance is scaled to the integrand's
/// size so that negligible panels do not drive refinement.
fn panel_integrals<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = (b - a) / PANELS as f64;
    let edges: Vec<f64> = (0..=PANELS)
        .map(|i| if i == PANELS { b } else { a + h * i as f64 })
        .collect();
    let mut peak = 0.0f64;
    for i in 0..256 {
        let x = a + (b - a) * (i as f64 + 0.5) / 256.0;
        peak = peak.max(f(x).abs());
    }
    let rule = quad_rule().with_abs_tol((peak * (b - a) * 1e-15).max(f64::MIN_POSITIVE));
    let mut vals = Vec::with_capacity(PANELS);
    for w in edges.windows(2) {
        vals.push(integrate_interval(f, w[0], w[1], &rule)?.value);
    }
    Ok((edges, vals))
}

/// `√det J` at scalar coordinate `t` (the radius for ball spaces).
#[inline]
fn sqrt_det(ch: &Channel, t: f64) -> f64 {
    ch.sqrt_det_fisher(t).unwrap_or(f64::NAN)
}

/// `∫_Θ 2^{-λ c(θ)} √det J(θ) c(θ)^k dθ` for k ∈ {0, 1}.
fn tilted_moment(ch: &Channel, lambda: f64, k: i32) -> Result<f64> {
    let g = Geometry::of(ch);
    let (a, b) = g.window(lambda);
    let f = |t: f64| {
        let c = ch.cost(t);
        let mut v = (-lambda * LN_2 * c).exp() * sqrt_det(ch, t) * g.jacobian(t);
        if k == 1 {
            v *= c;
        }
        v
    };
    let (_, vals) = panel_integrals(&f, a, b)?;
    let total: f64 = vals.iter().sum();
    if total.is_nan() {
        return Err(Error::domain(
            "tilted_moment",
            "Fisher information could not be evaluated on Θ",
        ));
    }
    Ok(total)
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            op,
            format!("tilt must be finite and >= 0, got {lambda}"),
        ));
    }
    Ok(())
}

/// `log₂ JF(λ)`; stays finite where `JF` itself would overflow.
pub fn log2_jeffreys_factor(ch: &Channel, lambda: f64, power: f64) -> Result<f64> {
    check_lambda("jeffreys_factor", lambda)?;
    let z = tilted_moment(ch, lambda, 0)?;
    if !(z > 0.0) {
        return Err(Error::Degenerate(z));
    }
    Ok(lambda * power + z.log2())
}

/// Jeffreys factor `∫ 2^{-λ(c(θ) - P)} √det J(θ) dθ`.
pub fn jeffreys_factor(ch: &Channel, lambda: f64, power: f64) -> Result<f64> {
    check_lambda("jeffreys_factor", lambda)?;
    let z = tilted_moment(ch, lambda, 0)?;
    Ok(2f64.powf(lambda * power) * z)
}

/// `M(λ)`, the average cost under the tilted prior. Does not depend on P.
pub fn average_cost(ch: &Channel, lambda: f64) -> Result<f64> {
    check_lambda("average_cost", lambda)?;
    let z = tilted_moment(ch, lambda, 0)?;
    if !(z > 0.0) {
        return Err(Error::Degenerate(z));
    }
    Ok(tilted_moment(ch, lambda, 1)? / z)
}

/// The normalized tilted Jeffreys prior, with CDF and inverse CDF.
///
/// For ball spaces the density is that of θ in R^d at radius `r`, and the
/// CDF refers to the radial marginal `Surf · r^{d-1} w(r)`.
#[derive(Debug, Clone)]
pub struct TiltedPrior {
    channel: Channel,
    lambda: f64,
    power: f64,
    geom: Geometry,
    norm: f64,
    edges: Vec<f64>,
    cum: Vec<f64>,
}

impl TiltedPrior {
    pub fn new(channel: &Channel, lambda: f64, power: f64) -> Result<Self> {
        check_lambda("tilted_prior", lambda)?;
        let geom = Geometry::of(channel);
        let (a, b) = geom.window(lambda);
        let f = |t: f64| {
            (-lambda * LN_2 * channel.cost(t)).exp() * sqrt_det(channel, t) * geom.jacobian(t)
        };
        let (edges, vals) = panel_integrals(&f, a, b)?;
        let norm: f64 = vals.iter().sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Degenerate(norm));
        }
        let mut cum = Vec::with_capacity(vals.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for v in &vals {
            acc += v;
            cum.push(acc);
        }
        Ok(TiltedPrior {
            channel: channel.clone(),
            lambda,
            power,
            geom,
            norm,
            edges,
            cum,
        })
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// `∫ 2^{-λc} √det J`, without the `2^{λP}` factor.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// Jeffreys factor at this prior's tilt and power.
    pub fn jf(&self) -> f64 {
        2f64.powf(self.lambda * self.power) * self.norm
    }

    /// Range of the CDF's argument: Θ for intervals, `[0, A]` for balls.
    pub fn support(&self) -> (f64, f64) {
        (self.geom.lo, self.geom.hi)
    }

    pub fn is_radial(&self) -> bool {
        self.geom.radial_power > 0
    }

    /// Prior density `w(θ)`; zero outside Θ.
    pub fn density(&self, t: f64) -> f64 {
        if !(t >= self.geom.lo && t <= self.geom.hi) {
            return 0.0;
        }
        (-self.lambda * LN_2 * self.channel.cost(t)).exp() * sqrt_det(&self.channel, t) / self.norm
    }

    /// `ln w(θ)`, accurate where the density underflows.
    pub fn ln_density(&self, t: f64) -> f64 {
        if !(t >= self.geom.lo && t <= self.geom.hi) {
            return f64::NEG_INFINITY;
        }
        -self.lambda * LN_2 * self.channel.cost(t) + sqrt_det(&self.channel, t).ln()
            - self.norm.ln()
    }

    /// Density of the CDF's argument: `w` itself on intervals, the radial
    /// marginal on balls.
    pub fn marginal_density(&self, t: f64) -> f64 {
        self.density(t) * self.geom.jacobian(t)
    }

    /// `F(t) = ∫_lo^t` of the marginal density.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::domain("prior_cdf", "argument is NaN"));
        }
        let (a, b) = (self.edges[0], *self.edges.last().unwrap());
        if t <= a {
            return Ok(0.0);
        }
        if t >= b {
            return Ok(1.0);
        }
        let k = self.edges.partition_point(|e| *e <= t) - 1;
        let f = |x: f64| self.marginal_density(x) * self.norm;
        let part = integrate_interval(f, self.edges[k], t, &quad_rule().with_abs_tol(1e-300))?;
        Ok(((self.cum[k] + part.value) / self.norm).clamp(0.0, 1.0))
    }

    /// Inverse CDF by bisection to `|F(t) - u| < 1e-12`.
    pub fn cdf_inverse(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(
                "prior_cdf_inverse",
                format!("u must lie in [0, 1], got {u}"),
            ));
        }
        if u == 0.0 {
            return Ok(self.geom.lo);
        }
        if u == 1.0 {
            return Ok(self.geom.hi);
        }
        // locate the panel first, then bisect inside it
        let target = u * self.norm;
        let k = (self.cum.partition_point(|c| *c < target).max(1) - 1).min(self.edges.len() - 2);
        let (mut lo, mut hi) = (self.edges[k], self.edges[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = self.cdf(mid)?;
            if (fm - u).abs() < 1e-12 {
                return Ok(mid);
            }
            if fm < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `E_w[c(θ)]`.
    pub fn mean_cost(&self) -> Result<f64> {
        average_cost(&self.channel, self.lambda)
    }
}

/// λ*, the Jeffreys factor at λ* and the resulting capacity expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JeffreysSolution {
    pub lambda_star: f64,
    pub jf: f64,
    pub log2_jf: f64,
    pub m_at_star: f64,
    pub dim: usize,
    pub power: f64,
}

impl JeffreysSolution {
    /// `(d/2) log₂(n_r / 2πe) + log₂ JF(λ*)`; the o(1) remainder is dropped.
    pub fn capacity_bits(&self, n_r: f64) -> f64 {
        0.5 * self.dim as f64 * (n_r / (2.0 * PI * std::f64::consts::E)).log2() + self.log2_jf
    }
}

/// Smallest tilt whose prior meets `E[c] ≤ P`, found by bisection on the
/// strictly decreasing `M(λ)`.
pub fn solve_lambda_star(ch: &Channel, power: f64) -> Result<JeffreysSolution> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::domain(
            "solve_lambda_star",
            format!("power budget must be finite and > 0, got {power}"),
        ));
    }
    let finish = |lambda: f64, m: f64| -> Result<JeffreysSolution> {
        let log2_jf = log2_jeffreys_factor(ch, lambda, power)?;
        Ok(JeffreysSolution {
            lambda_star: lambda,
            jf: log2_jf.exp2(),
            log2_jf,
            m_at_star: m,
            dim: ch.dim(),
            power,
        })
    };
    let m0 = average_cost(ch, 0.0)?;
    // ties count as feasible; the slack absorbs quadrature rounding
    if m0 <= power * (1.0 + TIE_SLACK) {
        return finish(0.0, m0);
    }
    let mut hi = 1.0 / power;
    let mut m_hi = average_cost(ch, hi)?;
    let mut doublings = 0;
    while m_hi > power {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::UnboundedTilt {
                doublings,
                lambda: hi,
                m: m_hi,
            });
        }
        hi *= 2.0;
        m_hi = average_cost(ch, hi)?;
        doublings += 1;
    }
    let mut lo = if doublings == 0 { 0.0 } else { hi / 2.0 };
    loop {
        if (m_hi - power).abs() < 1e-10 * power {
            return finish(hi, m_hi);
        }
        if hi - lo < 1e-12 * hi.max(1.0) {
            return finish(hi, m_hi);
        }
        let mid = 0.5 * (lo + hi);
        let m = average_cost(ch, mid)?;
        if (m - power).abs() < 1e-10 * power {
            return finish(mid, m);
        }
        if m > power {
            lo = mid;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
}

/// Leading terms of the capacity with `n_r` receive antennas, in bits.
pub fn asymptotic_capacity(ch: &Channel, power: f64, n_r: f64) -> Result<f64> {
    if !(n_r >= 1.0) {
        return Err(Error::domain(
            "asymptotic_capacity",
            format!("n_r must be >= 1, got {n_r}"),
        ));
    }
    Ok(solve_lambda_star(ch, power)?.capacity_bits(n_r))
}

/// Rate achieved by a prior `w` (density on Θ as a function of the scalar
/// coordinate, the radius for balls):
/// `C(P) - D(w ‖ w_{J,λ*}) + λ* E_w[c - P]`, in bits.
pub fn mismatch_rate<W: Fn(f64) -> f64>(ch: &Channel, w: W, power: f64, n_r: f64) -> Result<f64> {
    let sol = solve_lambda_star(ch, power)?;
    let prior = TiltedPrior::new(ch, sol.lambda_star, power)?;
    let geom = Geometry::of(ch);
    let (lo, hi) = (geom.lo, geom.hi);

    const GRID: usize = 1025;
    for i in 0..GRID {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64;
        let v = w(t);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Positivity(format!(
                "prior density is {v} at θ = {t}; it must be strictly positive on Θ"
            )));
        }
    }
    let rule = quad_rule().with_abs_tol(1e-14);
    let mass = integrate_interval(|t| w(t) * geom.jacobian(t), lo, hi, &rule)?.value;
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Validation(format!(
            "prior density integrates to {mass}, expected 1"
        )));
    }
    let kl_nats = integrate_interval(
        |t| {
            let v = w(t);
            if v == 0.0 {
                0.0
            } else {
                v * (v.ln() - prior.ln_density(t)) * geom.jacobian(t)
            }
        },
        lo,
        hi,
        &rule,
    )?
    .value;
    let mean_cost =
        integrate_interval(|t| w(t) * ch.cost(t) * geom.jacobian(t), lo, hi, &rule)?.value;
    Ok(sol.capacity_bits(n_r) - kl_nats / LN_2 + sol.lambda_star * (mean_cost - power))
}
