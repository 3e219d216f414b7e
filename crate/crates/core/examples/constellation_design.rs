//! 16-point inputs for a one-bit receiver with 100 antennas: Jeffreys
//! quantiles, quantiles of a degree-8 polynomial fit, uniform PAM, and
//! Blahut–Arimoto reweighting of the Jeffreys points.

use jfactor::channels::Channel;
use jfactor::constellation::{
    approx_jeffreys_constellation, fit_poly_density, jeffreys_constellation, pam_constellation,
    BarrierSchedule,
};
use jfactor::jeffreys::{asymptotic_capacity, solve_lambda_star};
use jfactor::mutual_info::{blahut_arimoto, mi_finite_output};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 10.0;
    let p = a * a / 4.0;
    let n_r = 100;
    let ch = Channel::one_bit(a)?;

    let jeff = jeffreys_constellation(&ch, p, 16)?;
    let pam = pam_constellation(&ch, p, 16)?;
    let sol = solve_lambda_star(&ch, p)?;
    let fit = fit_poly_density(&ch, sol.lambda_star, 8, &BarrierSchedule::default())?;
    let poly = approx_jeffreys_constellation(&fit.density, p, 16)?;

    println!(
        "fit: {} Newton steps, D = {:.3e} nats",
        fit.trace.len(),
        fit.divergence
    );
    println!("coefficients: {:?}", fit.density.coeffs());
    println!(
        "\n{:>3} {:>10} {:>10} {:>10}",
        "i", "jeffreys", "poly", "pam"
    );
    for i in 0..16 {
        println!(
            "{i:>3} {:>10.4} {:>10.4} {:>10.4}",
            jeff.points[i], poly.points[i], pam.points[i]
        );
    }

    let ba = blahut_arimoto(&ch, &jeff.points, n_r, 1e-9, 10_000)?;
    println!("\nmutual information with {n_r} antennas (bits):");
    println!("  jeffreys  {:.4}", mi_finite_output(&ch, &jeff, n_r)?);
    println!("  poly      {:.4}", mi_finite_output(&ch, &poly, n_r)?);
    println!("  pam       {:.4}", mi_finite_output(&ch, &pam, n_r)?);
    println!(
        "  BA        {:.4} after {} iterations",
        ba.bits, ba.iterations
    );
    println!(
        "  asymptote {:.4}",
        asymptotic_capacity(&ch, p, n_r as f64)?
    );
    Ok(())
}
