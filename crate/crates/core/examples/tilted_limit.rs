//! Tilted-cylinder limits and capacities of convex sets under an anisotropic model.

use percoflow::continuum::{convex_set_capacity_2d, tilted_limit_2d, NuModel};
use percoflow::geometry::ConvexPolytope;

fn main() -> percoflow::Result<()> {
    let nu = NuModel::L1Scaled { c: 1.0 };
    for alpha in [0.0, 0.2, 0.4, 0.7] {
        println!("alpha = {alpha}: {:.6}", tilted_limit_2d(&[0.6, 0.8], alpha, &nu)?);
    }
    let square = ConvexPolytope::aabb(&[0.0, 0.0], &[1.0, 1.0]);
    println!("unit square capacity: {:.6}", convex_set_capacity_2d(&square, &nu)?);
    Ok(())
}
