//! Exact geometric primitives: convex polytopes, polytopal domains with marked
//! boundary patches, cylinders, distances and face measures.

mod convex;
mod cylinder;
mod domain;
pub mod linalg;

pub use convex::{enumerate_vertices, hd_measure_facet, ConvexPolytope, ConvexSet, Halfspace};
pub use cylinder::{make_cylinder, CylinderSpec, Face};
pub use domain::{dist_l2, dist_linf, edge_in_set, halfspace, BoundaryPatch, Closure, Domain, Side};

/// Absolute tolerance for geometric predicates, in lattice length units.
pub const GEOM_TOL: f64 = 1e-9;
