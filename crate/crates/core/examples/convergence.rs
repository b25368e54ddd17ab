//! Watch the normalized max-flow settle as the mesh is refined.

use std::io;

use percoflow::capacity::CapacityLaw;
use percoflow::continuum::NuModel;
use percoflow::geometry::Domain;
use percoflow::harness::{run_converge, write_csv, ExperimentConfig, FlatCutRequest};

fn main() -> percoflow::Result<()> {
    let mut cfg = ExperimentConfig::new(
        Domain::unit_square(),
        CapacityLaw::Exponential { rate: 1.0 },
        vec![4, 8, 16, 32],
        50,
        2024,
    );
    cfg.flat_cut = Some(FlatCutRequest {
        nu: NuModel::Constant { nu: 0.4 },
        axis: vec![1.0, 0.0],
        grid: 32,
    });
    let report = run_converge(&cfg)?;
    write_csv(io::stdout(), &report.rows)?;
    if let Some(b) = report.flat_cut {
        println!("flat cut bound with nu = 0.4: {:.4} at x = {}", b.value, b.offset);
    }
    Ok(())
}
