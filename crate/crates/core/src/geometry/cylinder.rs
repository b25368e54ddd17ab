use serde::{Deserialize, Serialize};

use super::convex::{ConvexPolytope, Halfspace};
use super::linalg::{add_scaled, dot, norm, orthonormal_complement, scale, sub};
use super::GEOM_TOL;
use crate::error::{geometry, Result};

/// `cyl(A, h) = {x + t v : x ∈ A, t ∈ [−h, h]}` over a hyperrectangle base `A`.
///
/// The base is `center + Σ s_j e_j / 2` for `s_j ∈ [−1, 1]`, where the
/// `base_edges` `e_j` are mutually orthogonal full edge vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub base_center: Vec<f64>,
    pub base_edges: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub half_height: f64,
    polytope: ConvexPolytope,
}

/// One of the two flat ends of a cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// `A + h v`
    Top,
    /// `A − h v`
    Bottom,
}

/// Builds a cylinder, checking that the base is a non-degenerate
/// hyperrectangle orthogonal to the unit normal `v`.
pub fn make_cylinder(
    base_center: &[f64],
    base_edges: &[Vec<f64>],
    half_height: f64,
    normal: &[f64],
) -> Result<CylinderSpec> {
    let d = base_center.len();
    if d < 2 {
        return Err(geometry("cylinders need dimension at least 2"));
    }
    if half_height.is_nan() || half_height <= 0.0 {
        return Err(geometry(format!("half height must be positive, got {half_height}")));
    }
    if normal.len() != d || (norm(normal) - 1.0).abs() > GEOM_TOL {
        return Err(geometry("cylinder normal must be a unit vector of the ambient dimension"));
    }
    if base_edges.len() != d - 1 || base_edges.iter().any(|e| e.len() != d) {
        return Err(geometry(format!("a base in dimension {d} needs {} edge vectors", d - 1)));
    }
    for (i, e) in base_edges.iter().enumerate() {
        let len = norm(e);
        if len <= GEOM_TOL {
            return Err(geometry("degenerate base edge"));
        }
        if (dot(e, normal) / len).abs() > GEOM_TOL {
            return Err(geometry("normal is not orthogonal to the base"));
        }
        for f in &base_edges[..i] {
            if (dot(e, f) / (len * norm(f))).abs() > GEOM_TOL {
                return Err(geometry("base edges must be mutually orthogonal"));
            }
        }
    }
    let mut halfspaces = Vec::with_capacity(2 * d);
    for e in base_edges {
        let len = norm(e);
        let u = scale(e, 1.0 / len);
        let c = dot(&u, base_center);
        halfspaces.push(Halfspace::new(scale(&u, -1.0), -(c - len / 2.0)));
        halfspaces.push(Halfspace::new(u, c + len / 2.0));
    }
    let c = dot(normal, base_center);
    halfspaces.push(Halfspace::new(scale(normal, -1.0), -(c - half_height)));
    halfspaces.push(Halfspace::new(normal.to_vec(), c + half_height));
    Ok(CylinderSpec {
        base_center: base_center.to_vec(),
        base_edges: base_edges.to_vec(),
        normal: normal.to_vec(),
        half_height,
        polytope: ConvexPolytope::new(halfspaces),
    })
}

impl CylinderSpec {
    /// Cylinder over a cube of side `side` centred at the origin, orthogonal to
    /// `normal`; the base axes complete `normal` to an orthonormal frame.
    pub fn centered(normal: &[f64], side: f64, half_height: f64) -> Result<Self> {
        let d = normal.len();
        if !(side > 0.0) {
            return Err(geometry("base side must be positive"));
        }
        let nn = norm(normal);
        if nn <= GEOM_TOL {
            return Err(geometry("zero direction"));
        }
        let v = scale(normal, 1.0 / nn);
        let edges: Vec<Vec<f64>> = orthonormal_complement(&[v.clone()], d)
            .into_iter()
            .map(|b| scale(&b, side))
            .collect();
        make_cylinder(&vec![0.0; d], &edges, half_height, &v)
    }

    pub fn dim(&self) -> usize {
        self.base_center.len()
    }

    pub fn polytope(&self) -> &ConvexPolytope {
        &self.polytope
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.polytope.contains(x)
    }

    /// `H^{d−1}(A)`.
    pub fn base_measure(&self) -> f64 {
        self.base_edges.iter().map(|e| norm(e)).product()
    }

    /// Signed distance of `x` to `hyp(A)` along the normal.
    pub fn height_of(&self, x: &[f64]) -> f64 {
        dot(&sub(x, &self.base_center), &self.normal)
    }

    fn within_base(&self, x: &[f64]) -> bool {
        let rel = sub(x, &self.base_center);
        self.base_edges.iter().all(|e| {
            let len = norm(e);
            (dot(&rel, e) / len).abs() <= len / 2.0 + GEOM_TOL
        })
    }

    /// Whether the closed segment `[p, q]` meets the closed face `A ± h v`.
    pub fn segment_meets_face(&self, p: &[f64], q: &[f64], face: Face) -> bool {
        let target = match face {
            Face::Top => self.half_height,
            Face::Bottom => -self.half_height,
        };
        let hp = self.height_of(p) - target;
        let hq = self.height_of(q) - target;
        if hp.abs() <= GEOM_TOL {
            return self.within_base(p);
        }
        if hq.abs() <= GEOM_TOL {
            return self.within_base(q);
        }
        if hp.signum() == hq.signum() {
            return false;
        }
        let t = hp / (hp - hq);
        self.within_base(&add_scaled(p, t, &sub(q, p)))
    }

    /// Corner points of the cylinder.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.polytope.vertices()
    }
}
