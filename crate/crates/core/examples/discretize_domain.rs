//! Discretize the L-shaped domain at a few mesh sizes and report the lattice.

use percoflow::geometry::Domain;
use percoflow::lattice::discretize;

fn main() -> percoflow::Result<()> {
    let domain = Domain::l_shape();
    println!("{:>4} {:>8} {:>8} {:>6} {:>6} {:>6}", "n", "vertices", "edges", "bdry", "src", "sink");
    for n in [1, 2, 4, 8, 16] {
        let lat = discretize(&domain, n)?;
        println!(
            "{:>4} {:>8} {:>8} {:>6} {:>6} {:>6}",
            n,
            lat.num_vertices(),
            lat.num_edges(),
            lat.gamma().len(),
            lat.gamma1().len(),
            lat.gamma2().len()
        );
    }
    Ok(())
}
