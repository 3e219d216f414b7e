//! Peak- and power-limited Gaussian channel seen by many receive antennas.
//!
//! Sweeps the power budget and prints the optimal tilt, the Jeffreys factor
//! and the resulting capacity estimate, next to the small-power surrogate
//! `√(2πeP)`.

use jfactor::channels::Channel;
use jfactor::jeffreys::{solve_lambda_star, TiltedPrior};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = Channel::awgn(1.0)?;
    let n_r = 100.0;

    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>12}",
        "P", "lambda*", "JF", "sqrt2piEP", "C(100) bits"
    );
    for p in [0.001, 0.01, 0.05, 1.0 / 9.0, 0.2, 1.0 / 3.0, 0.5] {
        let sol = solve_lambda_star(&ch, p)?;
        let surrogate = (2.0 * std::f64::consts::PI * std::f64::consts::E * p).sqrt();
        println!(
            "{p:>8.4} {:>10.4} {:>10.5} {:>10.5} {:>12.5}",
            sol.lambda_star,
            sol.jf,
            surrogate,
            sol.capacity_bits(n_r)
        );
    }

    // past A²/3 the budget is inactive and the prior is uniform
    let prior = TiltedPrior::new(
        &ch,
        solve_lambda_star(&ch, 1.0 / 9.0)?.lambda_star,
        1.0 / 9.0,
    )?;
    println!("\noptimal prior at P = 1/9:");
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        println!("  w({t:+.1}) = {:.5}", prior.density(t));
    }
    println!("  mean cost {:.6}", prior.mean_cost()?);
    Ok(())
}
