//! Every built-in channel family, loaded from its JSON description.

use jfactor::channels::Channel;
use jfactor::jeffreys::{average_cost, solve_lambda_star};

const SPECS: &[&str] = &[
    r#"{"kind": "awgn", "A": 2}"#,
    r#"{"kind": "clipped_awgn", "A": 2, "B": 1}"#,
    r#"{"kind": "quantized_awgn", "A": 2, "thresholds": [0]}"#,
    r#"{"kind": "quantized_awgn", "A": 2, "thresholds": [-1, 0, 1]}"#,
    r#"{"kind": "energy_detection", "A": 2}"#,
    r#"{"kind": "noncoherent", "A": 2, "sigma2": 0.5}"#,
    r#"{"kind": "poisson", "A": 2, "h": {"values": [1], "probs": [1]}, "mu": {"values": [0.6], "probs": [1]}}"#,
    r#"{"kind": "dithered_1bit", "A": 2, "dither": {"points": [-2, 0, 2]}}"#,
    r#"{"kind": "truncated_awgn", "A": 2, "B": 2.5}"#,
    r#"{"kind": "mimo_imperfect_csi", "A": 2, "nt": 2, "sigma2": 0.1}"#,
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = 1.0;
    let n_r = 64.0;
    println!(
        "{:<20} {:>4} {:>10} {:>10} {:>10} {:>10}",
        "channel", "dim", "sqrtJ(mid)", "M(0)", "lambda*", "C bits"
    );
    for spec in SPECS {
        let ch = Channel::from_json(spec)?;
        let (lo, hi) = ch.param_space().scalar_range();
        let mid = 0.5 * (lo + hi);
        let sol = solve_lambda_star(&ch, p)?;
        println!(
            "{:<20} {:>4} {:>10.5} {:>10.5} {:>10.4} {:>10.4}",
            ch.kind_name(),
            ch.dim(),
            ch.sqrt_det_fisher(mid)?,
            average_cost(&ch, 0.0)?,
            sol.lambda_star,
            sol.capacity_bits(n_r)
        );
    }
    Ok(())
}
