//! Compare the two cylinder flows on a tilted cylinder.

use percoflow::capacity::{fixed_to_f64, sample, CapacityLaw};
use percoflow::cylinder::{build_cylinder_instance, flat_cut_edges, nu_cylinder, phi_cyl, tau};
use percoflow::flow::cut_capacity;

fn main() -> percoflow::Result<()> {
    let v = [0.6, 0.8];
    let spec = nu_cylinder(&v, 4.0, 1.0)?;
    let law = CapacityLaw::Uniform { a: 0.0, b: 1.0 };
    for n in [4, 8, 16] {
        let inst = build_cylinder_instance(&spec, n)?;
        let caps = sample(&law, &inst.lattice, 7);
        let t = fixed_to_f64(tau(&inst, &caps)?);
        let p = fixed_to_f64(phi_cyl(&inst, &caps)?);
        let flat = fixed_to_f64(cut_capacity(&flat_cut_edges(&inst), &caps)?);
        println!(
            "n = {n:>2}: {} edges, tau = {t:.4}, phi = {p:.4}, flat cut = {flat:.4}",
            inst.lattice.num_edges()
        );
    }
    Ok(())
}
