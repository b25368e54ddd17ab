//! Solve one random instance with both solvers and certify the answer.

use percoflow::capacity::{fixed_to_f64, sample, CapacityLaw};
use percoflow::flow::{check_stream, cut_capacity, max_flow_with, min_cut_is_cutset, Solver};
use percoflow::geometry::Domain;
use percoflow::lattice::discretize;

fn main() -> percoflow::Result<()> {
    let lat = discretize(&Domain::unit_square(), 24)?;
    let caps = sample(&CapacityLaw::Exponential { rate: 1.0 }, &lat, 42);
    let (f1, f2) = (lat.gamma1(), lat.gamma2());

    for solver in [Solver::PushRelabel, Solver::Augmenting] {
        let r = max_flow_with(&lat, &caps, f1, f2, solver)?;
        let check = check_stream(&lat, &caps, f1, f2, &r.stream);
        println!(
            "{solver:?}: flow {:.6}, cut of {} edges with capacity {:.6}",
            fixed_to_f64(r.value),
            r.cut.edges.len(),
            fixed_to_f64(cut_capacity(&r.cut.edges, &caps)?)
        );
        println!(
            "  stream valid: {}, separating: {}",
            check.valid,
            min_cut_is_cutset(&lat, &r.cut.edges, f1, f2)
        );
    }
    Ok(())
}
