//! Exact mutual information of a one-bit receiver against the asymptotic
//! capacity as the number of antennas grows.

use jfactor::channels::Channel;
use jfactor::jeffreys::{solve_lambda_star, TiltedPrior};
use jfactor::mutual_info::{discretize_prior, mi_finite_output, mi_gaussian_sufficient};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 2.0;
    let p = a * a / 9.0;
    let ch = Channel::one_bit(a)?;
    let sol = solve_lambda_star(&ch, p)?;
    let input = discretize_prior(&TiltedPrior::new(&ch, sol.lambda_star, p)?, 257)?;

    println!("one-bit receiver, A = {a}, P = {p:.4}");
    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "n_r", "exact", "asymptote", "gap"
    );
    for n in [16u64, 64, 256, 1024, 4096] {
        let mi = mi_finite_output(&ch, &input, n)?;
        let c = sol.capacity_bits(n as f64);
        println!("{n:>6} {mi:>10.5} {c:>10.5} {:>10.5}", c - mi);
    }

    let ch = Channel::awgn(1.0)?;
    let p = 1.0 / 9.0;
    let sol = solve_lambda_star(&ch, p)?;
    let input = discretize_prior(&TiltedPrior::new(&ch, sol.lambda_star, p)?, 513)?;
    println!("\nunquantized receiver, A = 1, P = 1/9");
    for n in [10.0, 100.0, 1000.0, 10000.0] {
        let mi = mi_gaussian_sufficient(&input, n)?;
        let c = sol.capacity_bits(n);
        println!("{n:>6} {mi:>10.5} {c:>10.5} {:>10.5}", c - mi);
    }
    Ok(())
}
