use std::path::Path;

use serde::{Deserialize, Serialize};

use super::convex::{ConvexPolytope, ConvexSet, Halfspace};
use super::linalg::{add_scaled, norm, sub};
use super::GEOM_TOL;
use crate::error::{config, geometry, Result};

/// A boundary patch: one facet of one piece, optionally cut down by a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPatch {
    pub piece: usize,
    pub facet: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<ConvexPolytope>,
}

impl BoundaryPatch {
    pub fn facet(piece: usize, facet: usize) -> Self {
        Self {
            piece,
            facet,
            region: None,
        }
    }

    pub fn restricted(piece: usize, facet: usize, region: ConvexPolytope) -> Self {
        Self {
            piece,
            facet,
            region: Some(region),
        }
    }
}

/// Which of the two marked boundary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Source,
    Sink,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Source => Side::Sink,
            Side::Sink => Side::Source,
        }
    }
}

/// Open region whose closure is the union of convex pieces, with the two
/// boundary parts between which flows are measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub dim: usize,
    pub pieces: Vec<ConvexPolytope>,
    pub gamma1: Vec<BoundaryPatch>,
    pub gamma2: Vec<BoundaryPatch>,
}

impl Domain {
    /// Box `∏ (lo_i, hi_i)` with the lower and upper faces along `axis` as
    /// source and sink.
    pub fn rectangle(lo: &[f64], hi: &[f64], axis: usize) -> Self {
        Self {
            dim: lo.len(),
            pieces: vec![ConvexPolytope::aabb(lo, hi)],
            gamma1: vec![BoundaryPatch::facet(0, 2 * axis)],
            gamma2: vec![BoundaryPatch::facet(0, 2 * axis + 1)],
        }
    }

    pub fn unit_square() -> Self {
        Self::rectangle(&[0.0, 0.0], &[1.0, 1.0], 0)
    }

    /// `(0,1)² ∪ (1,2)×(0,½)` with the left edge as source and the right edge
    /// `{2}×(0,½)` as sink.
    pub fn l_shape() -> Self {
        Self {
            dim: 2,
            pieces: vec![
                ConvexPolytope::aabb(&[0.0, 0.0], &[1.0, 1.0]),
                ConvexPolytope::aabb(&[1.0, 0.0], &[2.0, 0.5]),
            ],
            gamma1: vec![BoundaryPatch::facet(0, 0)],
            gamma2: vec![BoundaryPatch::facet(1, 1)],
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let d: Domain = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn patches(&self, side: Side) -> &[BoundaryPatch] {
        match side {
            Side::Source => &self.gamma1,
            Side::Sink => &self.gamma2,
        }
    }

    pub fn patch_set(&self, patch: &BoundaryPatch) -> ConvexSet {
        self.pieces[patch.piece].facet_set(patch.facet, patch.region.as_ref())
    }

    /// Checks every structural invariant except connectedness, which is
    /// verified on a discretization.
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(config(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.pieces.is_empty() {
            return Err(config("domain has no pieces"));
        }
        for (pi, piece) in self.pieces.iter().enumerate() {
            for h in &piece.halfspaces {
                if h.normal.len() != self.dim {
                    return Err(config(format!(
                        "piece {pi}: normal of length {} in dimension {}",
                        h.normal.len(),
                        self.dim
                    )));
                }
                if (norm(&h.normal) - 1.0).abs() > GEOM_TOL {
                    return Err(geometry(format!("piece {pi}: facet normal is not a unit vector")));
                }
            }
            if !piece.is_bounded() {
                return Err(geometry(format!("piece {pi} is unbounded")));
            }
            if piece.volume() <= GEOM_TOL {
                return Err(geometry(format!("piece {pi} has empty interior")));
            }
        }
        if self.gamma1.is_empty() || self.gamma2.is_empty() {
            return Err(config("both boundary parts need at least one patch"));
        }
        for side in [Side::Source, Side::Sink] {
            for p in self.patches(side) {
                self.validate_patch(p)?;
            }
        }
        for a in &self.gamma1 {
            let sa = self.patch_set(a);
            for b in &self.gamma2 {
                if !sa.intersect(&self.patch_set(b)).is_empty() {
                    return Err(geometry(
                        "source and sink patches touch; their distance must be positive",
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_patch(&self, p: &BoundaryPatch) -> Result<()> {
        let piece = self
            .pieces
            .get(p.piece)
            .ok_or_else(|| config(format!("patch refers to missing piece {}", p.piece)))?;
        let facet = piece
            .halfspaces
            .get(p.facet)
            .ok_or_else(|| config(format!("patch refers to missing facet {}", p.facet)))?;
        if let Some(r) = &p.region {
            if r.halfspaces.iter().any(|h| h.normal.len() != self.dim) {
                return Err(config("patch region has wrong dimension"));
            }
        }
        let set = self.patch_set(p);
        if set.measure() <= GEOM_TOL {
            return Err(geometry(format!(
                "patch (piece {}, facet {}) has empty relative interior",
                p.piece, p.facet
            )));
        }
        // Step outward from the patch barycentre: a boundary patch must leave Ω.
        let verts = set.vertices();
        let mut c = vec![0.0; self.dim];
        for v in &verts {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / verts.len() as f64;
            }
        }
        let probe = add_scaled(&c, 1e-6, &facet.normal);
        if self.pieces.iter().any(|q| q.contains(&probe)) {
            return Err(geometry(format!(
                "patch (piece {}, facet {}) is not on the boundary of the domain",
                p.piece, p.facet
            )));
        }
        Ok(())
    }

    /// Axis-aligned bounding box of the closure.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for piece in &self.pieces {
            for v in piece.vertices() {
                for i in 0..self.dim {
                    lo[i] = lo[i].min(v[i]);
                    hi[i] = hi[i].max(v[i]);
                }
            }
        }
        (lo, hi)
    }

    /// Membership in the closure.
    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    /// Membership in the open domain, i.e. the interior of the union.
    pub fn contains(&self, x: &[f64]) -> bool {
        interior_of_union(&self.pieces, x)
    }

    pub fn dist_linf(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.to_set().dist_linf(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dist_l2(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.to_set().dist_l2(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn patch_dist_linf(&self, x: &[f64], side: Side) -> f64 {
        self.patches(side)
            .iter()
            .map(|p| self.patch_set(p).dist_linf(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the open segment `(p, q)` lies in the open domain.
    pub fn contains_edge(&self, p: &[f64], q: &[f64]) -> bool {
        edge_in_set(p, q, &self.pieces, Closure::Open)
    }
}

/// How a union of closed convex pieces is read as a point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// The interior of the union.
    Open,
    /// The union itself.
    Closed,
}

/// L∞ distance from `x` to a union of convex sets.
pub fn dist_linf(x: &[f64], sets: &[ConvexSet]) -> f64 {
    sets.iter().map(|s| s.dist_linf(x)).fold(f64::INFINITY, f64::min)
}

/// Euclidean distance from `x` to a union of convex sets.
pub fn dist_l2(x: &[f64], sets: &[ConvexSet]) -> f64 {
    sets.iter().map(|s| s.dist_l2(x)).fold(f64::INFINITY, f64::min)
}

/// Whether every point of the open segment `(p, q)` belongs to the region.
///
/// Each piece contributes the parameter interval of the segment it contains;
/// the union must cover `[0, 1]`. For the open reading, every breakpoint and
/// every sub-interval midpoint is additionally tested for interiority.
pub fn edge_in_set(p: &[f64], q: &[f64], pieces: &[ConvexPolytope], closure: Closure) -> bool {
    let mut intervals: Vec<(f64, f64)> = pieces
        .iter()
        .filter_map(|piece| piece.segment_interval(p, q))
        .collect();
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = 0.0f64;
    let mut started = false;
    for &(a, b) in &intervals {
        if !started {
            if a > GEOM_TOL {
                return false;
            }
            started = true;
        } else if a > reach + GEOM_TOL {
            return false;
        }
        reach = reach.max(b);
    }
    if !started || reach < 1.0 - GEOM_TOL {
        return false;
    }
    if closure == Closure::Closed {
        return true;
    }
    let mut breaks: Vec<f64> = vec![0.0, 1.0];
    for &(a, b) in &intervals {
        for t in [a, b] {
            if t > GEOM_TOL && t < 1.0 - GEOM_TOL {
                breaks.push(t);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= GEOM_TOL);
    let dir = sub(q, p);
    let mut probes: Vec<f64> = breaks[1..breaks.len() - 1].to_vec();
    probes.extend(breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probes
        .iter()
        .all(|&t| interior_of_union(pieces, &add_scaled(p, t, &dir)))
}

/// Interior test for a union of closed convex pieces: strictly inside one
/// piece, or every point of a small cubical neighbourhood stencil covered.
fn interior_of_union(pieces: &[ConvexPolytope], x: &[f64]) -> bool {
    if pieces.iter().any(|p| p.contains_strict(x)) {
        return true;
    }
    if !pieces.iter().any(|p| p.contains(x)) {
        return false;
    }
    const EPS: f64 = 1e-7;
    let d = x.len();
    let count = 3usize.pow(d as u32);
    (0..count).all(|code| {
        let mut c = code;
        let mut y = x.to_vec();
        for yi in y.iter_mut() {
            let digit = (c % 3) as f64 - 1.0;
            c /= 3;
            *yi += EPS * digit;
        }
        pieces.iter().any(|p| p.contains(&y))
    })
}

/// Halfspace helper for JSON-free construction.
pub fn halfspace(normal: &[f64], offset: f64) -> Halfspace {
    Halfspace::new(normal.to_vec(), offset)
}
