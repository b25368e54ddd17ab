//! Estimate the surface tension in a few directions.

use std::f64::consts::PI;

use percoflow::capacity::CapacityLaw;
use percoflow::cylinder::{estimate_nu, NuRequest};

fn main() -> percoflow::Result<()> {
    for k in 0..=4 {
        let theta = k as f64 * PI / 16.0;
        let est = estimate_nu(&NuRequest {
            direction: vec![theta.cos(), theta.sin()],
            law: CapacityLaw::Uniform { a: 0.0, b: 1.0 },
            base_size: 4.0,
            half_height: None,
            n_values: vec![8, 16],
            trials: 40,
            seed: 1,
        })?;
        println!(
            "theta = {theta:.4}: nu = {:.4} +/- {:.4} (n = 8 gives {:.4})",
            est.point(),
            est.point_ci95(),
            est.estimates[0]
        );
    }
    Ok(())
}
