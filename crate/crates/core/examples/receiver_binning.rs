//! A receiver that only keeps bin counts of its antenna outputs.
//!
//! Simulates one channel use with 256 antennas, detects the transmitted
//! 4-PAM symbol from the binned type, and shows how the capacity loss of
//! binning shrinks with the number of bins.

use jfactor::channels::Channel;
use jfactor::receiver_quant::{gaussian_tail_radius, ml_detect, scaling_study, Quantizer1D};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ch = Channel::awgn(1.0)?;
    let points = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
    let q = Quantizer1D::new(4.0, 16)?;
    let mut rng = StdRng::seed_from_u64(7);

    let mut errors = 0;
    let trials = 2000;
    for k in 0..trials {
        let sent = k % points.len();
        let noise = Normal::new(points[sent], 1.0)?;
        let ys: Vec<f64> = (0..256).map(|_| noise.sample(&mut rng)).collect();
        let ty = q.type_of(&ys);
        if ml_detect(&ch, &q, &ty, &points)? != sent {
            errors += 1;
        }
    }
    println!(
        "symbol error rate with 16 bins: {:.4}",
        errors as f64 / trials as f64
    );

    let bins: Vec<usize> = (3..=10).map(|k| 1usize << k).collect();
    let study = scaling_study(&ch, gaussian_tail_radius, &bins)?;
    println!("\n{:>6} {:>8} {:>12}", "L", "r", "e_L");
    for pt in &study.points {
        println!("{:>6} {:>8.3} {:>12.4e}", pt.bins, pt.radius, pt.loss);
    }
    println!("slope of log e_L vs log L: {:.3}", study.slope);
    Ok(())
}
