//! Two transmit antennas with imperfect channel estimates. The prior lives
//! on a ball in R⁴ and depends only on the radius, so constellations are
//! built from radial quantiles times a set of directions.

use jfactor::channels::Channel;
use jfactor::constellation::radial_constellation_isotropic;
use jfactor::jeffreys::{solve_lambda_star, TiltedPrior};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = Channel::mimo_imperfect_csi(1.0, 2, 0.1)?;
    let p = 0.3;
    let sol = solve_lambda_star(&ch, p)?;
    println!("lambda* = {:.5}, JF = {:.5}", sol.lambda_star, sol.jf);
    for n_r in [16.0, 64.0, 256.0, 1024.0] {
        println!("  n_r = {n_r:>6}: C = {:.4} bits", sol.capacity_bits(n_r));
    }

    let prior = TiltedPrior::new(&ch, sol.lambda_star, p)?;
    println!("\nradial marginal:");
    for r in [0.1, 0.4, 0.7, 1.0] {
        println!(
            "  f({r:.1}) = {:.5}  F = {:.5}",
            prior.marginal_density(r),
            prior.cdf(r)?
        );
    }

    // QPSK on each antenna, normalized
    let mut dirs = Vec::new();
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                for d in [1.0, -1.0] {
                    dirs.push(vec![0.5 * a, 0.5 * b, 0.5 * c, 0.5 * d]);
                }
            }
        }
    }
    let con = radial_constellation_isotropic(&ch, p, 4, &dirs)?;
    println!("\n{} points on radii {:?}", con.points.len(), con.radii);
    println!(
        "average power {:.4}, peak {:.4}",
        con.avg_power, con.peak_power
    );
    Ok(())
}
