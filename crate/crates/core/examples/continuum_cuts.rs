//! Evaluate the continuum capacity of cuts and search for the best flat cut.

use percoflow::continuum::{flat_cut_bound, i_omega, offset_grid, NuModel, PolyhedralCut};
use percoflow::geometry::{halfspace, Domain};

fn main() -> percoflow::Result<()> {
    let nu = NuModel::L1Scaled { c: 1.0 };
    let square = Domain::unit_square();
    for cut in [
        PolyhedralCut::flat(&[1.0, 0.0], 0.5),
        PolyhedralCut::new(vec![halfspace(&[1.0, 0.2], 0.6)]),
    ] {
        let v = i_omega(&cut, &square, &nu)?;
        println!("square, {} facet piece(s): {:.6}", v.pieces.len(), v.value);
    }

    let l = Domain::l_shape();
    let axis = [1.0, 0.0];
    let best = flat_cut_bound(&l, &nu, &axis, &offset_grid(&l, &axis, 64))?;
    println!("L-shape best flat cut x = {}: {:.6}", best.offset, best.value);
    Ok(())
}
