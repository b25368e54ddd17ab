//! Sweep the Bernoulli parameter through the bond percolation threshold.

use percoflow::capacity::CapacityLaw;
use percoflow::geometry::Domain;
use percoflow::harness::{run_phase, ExperimentConfig};

fn main() -> percoflow::Result<()> {
    let ps = [0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7];
    let cfg = ExperimentConfig::new(
        Domain::unit_square(),
        CapacityLaw::Constant { c: 1.0 },
        vec![8, 16, 32],
        50,
        5,
    );
    let report = run_phase(&cfg, &ps, 1.0, None)?;
    for (p, means) in ps.iter().zip(&report.means) {
        let cells: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
        println!("p = {p:.2}: {}", cells.join("  "));
    }
    println!("largest p with finest-mesh mean below {:.3}: {:?}", report.threshold, report.transition);
    Ok(())
}
