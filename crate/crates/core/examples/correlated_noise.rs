//! Antennas sharing correlated noise: the Fisher information per antenna
//! drops, the optimal prior does not change shape.

use jfactor::jeffreys::{solve_lambda_star, TiltedPrior};
use jfactor::noniid::{correlated_channel, fisher_rate_finite, fisher_rate_limit, Autocovariance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ar = Autocovariance::ar1(1.0, 0.5)?;
    let limit = fisher_rate_limit(&ar)?;
    println!("{:>6} {:>12} {:>12}", "n", "rate", "rate-limit");
    for k in 0..=12 {
        let n = 1usize << k;
        let r = fisher_rate_finite(&ar, n)?;
        println!("{n:>6} {r:>12.8} {:>12.3e}", r - limit);
    }

    let p = 0.1;
    let n_r = 1024.0;
    for (name, acov) in [("white", Autocovariance::white(1.0)?), ("ar(0.5)", ar)] {
        let ch = correlated_channel(1.0, &acov, Some(1024))?;
        let sol = solve_lambda_star(&ch, p)?;
        let prior = TiltedPrior::new(&ch, sol.lambda_star, p)?;
        println!(
            "{name:>8}: J = {:.4}, lambda* = {:.4}, w(0) = {:.5}, C = {:.4} bits",
            ch.fisher(0.0)?,
            sol.lambda_star,
            prior.density(0.0),
            sol.capacity_bits(n_r)
        );
    }
    Ok(())
}
