//! Capacity of channels observed through many independent receive antennas.
//!
//! With `n_r` looks at the same input, capacity under a peak and an average
//! power constraint behaves like `(d/2) log₂(n_r / 2πe) + log₂ JF(λ*)`,
//! where `JF` integrates `√det J(θ)` of the per-antenna Fisher information
//! against an exponential cost tilt. The crate computes that expansion for
//! a range of channel families, the matching optimal prior, finite
//! constellations drawn from it, exact mutual information for comparison,
//! and the loss of receivers that only keep binned output counts.
//!
//! ```
//! use jfactor::channels::Channel;
//! use jfactor::jeffreys::solve_lambda_star;
//!
//! let ch = Channel::one_bit(2.0).unwrap();
//! let sol = solve_lambda_star(&ch, 4.0 / 9.0).unwrap();
//! assert!(sol.capacity_bits(1024.0) > 3.9);
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod constellation;
pub mod error;
pub mod jeffreys;
pub mod mutual_info;
pub mod noniid;
pub mod quad;
pub mod receiver_quant;
pub mod specfun;

pub use error::{Error, Result};
