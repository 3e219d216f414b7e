//! Mean estimation in stationary correlated Gaussian noise.
//!
//! With `n` receive samples sharing the mean θ and noise covariance
//! `Σ_n = [γ(j-k)]`, the per-sample Fisher information is
//! `(1/n) 1ᵀ Σ_n⁻¹ 1`. It does not depend on θ, so the Jeffreys prior is the
//! same as in white noise; only the constant changes, tending to
//! `1 / Σ_k γ(k)` as `n` grows.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};

/// Stationary autocovariance `γ(k) = γ(-k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Autocovariance {
    White {
        variance: f64,
    },
    /// `variance · ρ^|k|`
    Ar1 {
        variance: f64,
        rho: f64,
    },
    /// `γ(0), γ(1), ...`, zero past the end.
    Table {
        values: Vec<f64>,
    },
}

impl Autocovariance {
    pub fn white(variance: f64) -> Result<Self> {
        let a = Autocovariance::White { variance };
        a.validate()?;
        Ok(a)
    }

    pub fn ar1(variance: f64, rho: f64) -> Result<Self> {
        let a = Autocovariance::Ar1 { variance, rho };
        a.validate()?;
        Ok(a)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let a = Autocovariance::Table { values };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        let g0 = match self {
            Autocovariance::White { variance } => *variance,
            Autocovariance::Ar1 { variance, rho } => {
                if !(rho.abs() <= 1.0) {
                    return Err(Error::Validation(format!(
                        "AR coefficient must lie in [-1, 1], got {rho}"
                    )));
                }
                *variance
            }
            Autocovariance::Table { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Validation(
                        "autocovariance values must be finite".into(),
                    ));
                }
                values.first().copied().unwrap_or(0.0)
            }
        };
        if !(g0 > 0.0) || !g0.is_finite() {
            return Err(Error::Validation(format!(
                "γ(0) must be positive and finite, got {g0}"
            )));
        }
        Ok(())
    }

    /// `γ(k)`
    pub fn at(&self, k: i64) -> f64 {
        let k = k.unsigned_abs();
        match self {
            Autocovariance::White { variance } => {
                if k == 0 {
                    *variance
                } else {
                    0.0
                }
            }
            Autocovariance::Ar1 { variance, rho } => {
                variance * rho.powi(k.min(i32::MAX as u64) as i32)
            }
            Autocovariance::Table { values } => values.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// `c · γ`
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let a = match self {
            Autocovariance::White { variance } => Autocovariance::White {
                variance: c * variance,
            },
            Autocovariance::Ar1 { variance, rho } => Autocovariance::Ar1 {
                variance: c * variance,
                rho: *rho,
            },
            Autocovariance::Table { values } => Autocovariance::Table {
                values: values.iter().map(|v| c * v).collect(),
            },
        };
        a.validate()?;
        Ok(a)
    }

    /// `Σ_k γ(k)` over all integers, when finite.
    pub fn series_sum(&self) -> Option<f64> {
        match self {
            Autocovariance::White { variance } => Some(*variance),
            Autocovariance::Ar1 { variance, rho } => {
                if rho.abs() < 1.0 {
                    Some(variance * (1.0 + rho) / (1.0 - rho))
                } else {
                    None
                }
            }
            Autocovariance::Table { values } => {
                Some(values[0] + 2.0 * values[1..].iter().sum::<f64>())
            }
        }
    }
}

/// Solves `T x = b` for symmetric Toeplitz `T` with first row `col` by the
/// Levinson recursion. Fails unless `T` is positive definite.
pub fn toeplitz_solve(col: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = col.len();
    if n == 0 || b.len() != n {
        return Err(Error::Validation(
            "Toeplitz system needs matching nonempty sizes".into(),
        ));
    }
    let g0 = col[0];
    if !(g0 > 0.0) {
        return Err(Error::domain(
            "toeplitz_solve",
            "matrix is not positive definite",
        ));
    }
    let r: Vec<f64> = col[1..].iter().map(|v| v / g0).collect();
    let b: Vec<f64> = b.iter().map(|v| v / g0).collect();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    x[0] = b[0];
    if n == 1 {
        return Ok(x);
    }
    y[0] = -r[0];
    let mut alpha = -r[0];
    let mut beta = 1.0;
    for k in 1..n {
        beta *= 1.0 - alpha * alpha;
        if !(beta > 0.0) {
            return Err(Error::domain(
                "toeplitz_solve",
                format!("matrix is not positive definite (leading minor {})", k + 1),
            ));
        }
        let dot: f64 = (0..k).map(|i| r[i] * x[k - 1 - i]).sum();
        let mu = (b[k] - dot) / beta;
        for i in 0..k {
            tmp[i] = x[i] + mu * y[k - 1 - i];
        }
        x[..k].copy_from_slice(&tmp[..k]);
        x[k] = mu;
        if k < n - 1 {
            let dot: f64 = (0..k).map(|i| r[i] * y[k - 1 - i]).sum();
            alpha = -(r[k] + dot) / beta;
            for i in 0..k {
                tmp[i] = y[i] + alpha * y[k - 1 - i];
            }
            y[..k].copy_from_slice(&tmp[..k]);
            y[k] = alpha;
        }
    }
    Ok(x)
}

/// `(1/n) 1ᵀ Σ_n⁻¹ 1` for the `n × n` covariance built from `acov`.
pub fn fisher_rate_finite(acov: &Autocovariance, n: usize) -> Result<f64> {
    acov.validate()?;
    if n == 0 {
        return Err(Error::domain("fisher_rate_finite", "need n >= 1"));
    }
    let col: Vec<f64> = (0..n as i64).map(|k| acov.at(k)).collect();
    let x = toeplitz_solve(&col, &vec![1.0; n])
        .map_err(|e| Error::domain("fisher_rate_finite", e.to_string()))?;
    Ok(x.iter().sum::<f64>() / n as f64)
}

/// `1 / Σ_k γ(k)`, the large-`n` rate.
pub fn fisher_rate_limit(acov: &Autocovariance) -> Result<f64> {
    acov.validate()?;
    match acov.series_sum() {
        Some(s) if s > 0.0 && s.is_finite() => Ok(1.0 / s),
        Some(s) => Err(Error::domain(
            "fisher_rate_limit",
            format!("autocovariance sums to {s}, no positive zero-frequency spectrum"),
        )),
        None => Err(Error::domain(
            "fisher_rate_limit",
            "autocovariance is not summable",
        )),
    }
}

/// Scalar-mean channel in correlated noise; `n = None` uses the limiting rate.
pub fn correlated_channel(a: f64, acov: &Autocovariance, n: Option<usize>) -> Result<Channel> {
    let rate = match n {
        Some(n) => fisher_rate_finite(acov, n)?,
        None => fisher_rate_limit(acov)?,
    };
    Channel::correlated_awgn(a, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn cholesky_rate(acov: &Autocovariance, n: usize) -> Option<f64> {
        let m = DMatrix::from_fn(n, n, |i, j| acov.at(i as i64 - j as i64));
        let c = m.cholesky()?;
        Some(c.solve(&DVector::from_element(n, 1.0)).sum() / n as f64)
    }

    #[test]
    fn trivial_rates() {
        let w = Autocovariance::white(1.0).unwrap();
        for n in [1, 2, 17, 300] {
            assert!((fisher_rate_finite(&w, n).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(fisher_rate_limit(&w).unwrap(), 1.0);
        let a = Autocovariance::ar1(2.5, 0.7).unwrap();
        assert!((fisher_rate_finite(&a, 1).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn levinson_matches_cholesky() {
        let cases = [
            Autocovariance::ar1(1.0, 0.5).unwrap(),
            Autocovariance::ar1(0.3, -0.8).unwrap(),
            Autocovariance::table(vec![2.0, 0.6, -0.2, 0.1]).unwrap(),
        ];
        for a in &cases {
            for n in [2, 3, 10, 64] {
                let want = cholesky_rate(a, n).unwrap();
                let got = fisher_rate_finite(a, n).unwrap();
                assert!(
                    (got - want).abs() < 1e-12 * want,
                    "{a:?} n={n}: {got} vs {want}"
                );
            }
        }
        let col = [4.0, 1.0, 0.5];
        let b = [1.0, -2.0, 0.3];
        let x = toeplitz_solve(&col, &b).unwrap();
        for i in 0..3 {
            let row: f64 = (0..3)
                .map(|j| col[(i as i64 - j as i64).unsigned_abs() as usize] * x[j])
                .sum();
            assert!((row - b[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn ar_closed_form() {
        // 1ᵀΣ⁻¹1 for AR(1) with unit variance is (n(1-ρ) + 2ρ)/(1+ρ)
        let a = Autocovariance::ar1(1.0, 0.5).unwrap();
        for n in [1usize, 5, 100] {
            let want = (n as f64 * 0.5 + 1.0) / 1.5 / n as f64;
            assert!((fisher_rate_finite(&a, n).unwrap() - want).abs() < 1e-13);
        }
        assert!((fisher_rate_limit(&a).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let s = a.scaled(4.0).unwrap();
        assert!((fisher_rate_limit(&s).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_covariances() {
        let bad = Autocovariance::table(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            fisher_rate_finite(&bad, 2),
            Err(Error::Domain { .. })
        ));
        let unit = Autocovariance::ar1(1.0, 1.0).unwrap();
        assert!(fisher_rate_limit(&unit).is_err());
        let neg_sum = Autocovariance::table(vec![1.0, -0.5]).unwrap();
        assert!(fisher_rate_limit(&neg_sum).is_err());
        assert!(Autocovariance::white(0.0).is_err());
        assert!(fisher_rate_finite(&Autocovariance::white(1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn json_form() {
        let a: Autocovariance =
            serde_json::from_str(r#"{"kind":"ar1","variance":1,"rho":0.5}"#).unwrap();
        assert_eq!(a, Autocovariance::ar1(1.0, 0.5).unwrap());
    }
}
