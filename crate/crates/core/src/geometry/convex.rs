//! Convex polytopes in halfspace form and the exact primitives built on them:
//! vertex enumeration, Hausdorff measures of faces, and L∞ / L2 distances.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::linalg::{dot, norm, orthonormal_complement, project_affine, solve_square, sub};
use super::GEOM_TOL;

/// `{x : normal · x ≤ offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed slack `normal · x − offset`; nonpositive inside.
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    fn normalized(&self) -> Option<Halfspace> {
        let n = norm(&self.normal);
        if n < 1e-300 {
            return None;
        }
        Some(Halfspace {
            normal: self.normal.iter().map(|a| a / n).collect(),
            offset: self.offset / n,
        })
    }

    /// True when both describe the same hyperplane (up to orientation).
    pub fn coincident_with(&self, other: &Halfspace, tol: f64) -> bool {
        let (Some(a), Some(b)) = (self.normalized(), other.normalized()) else {
            return false;
        };
        let c = dot(&a.normal, &b.normal);
        if (c.abs() - 1.0).abs() > tol {
            return false;
        }
        (a.offset - c.signum() * b.offset).abs() <= tol
    }
}

/// A bounded convex polytope `∩ {normal_i · x ≤ offset_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolytope {
    pub halfspaces: Vec<Halfspace>,
}

impl ConvexPolytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Self {
        Self { halfspaces }
    }

    /// Axis-aligned box. Facet `2i` is the lower face along axis `i`, facet
    /// `2i + 1` the upper one.
    pub fn aabb(lo: &[f64], hi: &[f64]) -> Self {
        let d = lo.len();
        let mut halfspaces = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = -1.0;
            halfspaces.push(Halfspace::new(e.clone(), -lo[i]));
            e[i] = 1.0;
            halfspaces.push(Halfspace::new(e, hi[i]));
        }
        Self { halfspaces }
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, |h| h.normal.len())
    }

    /// Closed membership with the geometric tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.eval(x) <= GEOM_TOL)
    }

    /// Interior membership with the geometric tolerance.
    pub fn contains_strict(&self, x: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.eval(x) < -GEOM_TOL)
    }

    pub fn to_set(&self) -> ConvexSet {
        ConvexSet::new(self.dim(), self.halfspaces.clone(), Vec::new())
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.to_set().vertices()
    }

    pub fn volume(&self) -> f64 {
        self.to_set().measure()
    }

    pub fn is_bounded(&self) -> bool {
        self.to_set().is_bounded()
    }

    /// The facet `i`, optionally intersected with `restriction`, as a convex set
    /// living in the facet hyperplane.
    pub fn facet_set(&self, i: usize, restriction: Option<&ConvexPolytope>) -> ConvexSet {
        let mut ineqs: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h.clone())
            .collect();
        if let Some(r) = restriction {
            ineqs.extend(r.halfspaces.iter().cloned());
        }
        ConvexSet::new(self.dim(), ineqs, vec![self.halfspaces[i].clone()])
    }

    /// Parameter interval `[t0, t1] ⊂ [0, 1]` of the closed segment `p + t (q − p)`
    /// lying in the closed polytope.
    pub fn segment_interval(&self, p: &[f64], q: &[f64]) -> Option<(f64, f64)> {
        let dir = sub(q, p);
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for h in &self.halfspaces {
            let a = h.eval(p);
            let slope = dot(&h.normal, &dir);
            if slope.abs() < 1e-15 {
                if a > GEOM_TOL {
                    return None;
                }
                continue;
            }
            let t = -a / slope;
            let slack = GEOM_TOL / slope.abs();
            if slope > 0.0 {
                t1 = t1.min(t + slack);
            } else {
                t0 = t0.max(t - slack);
            }
        }
        let (t0, t1) = (t0.max(0.0), t1.min(1.0));
        (t0 <= t1).then_some((t0, t1))
    }
}

/// `(d−1)`-dimensional measure of facet `facet` of `poly`, optionally restricted.
pub fn hd_measure_facet(
    poly: &ConvexPolytope,
    facet: usize,
    restriction: Option<&ConvexPolytope>,
) -> f64 {
    poly.facet_set(facet, restriction).measure()
}

/// A convex set given by inequalities and affine equalities. Used for polytopes,
/// their faces, and intersections of both.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexSet {
    pub dim: usize,
    pub ineqs: Vec<Halfspace>,
    pub eqs: Vec<Halfspace>,
}

impl ConvexSet {
    pub fn new(dim: usize, ineqs: Vec<Halfspace>, eqs: Vec<Halfspace>) -> Self {
        Self { dim, ineqs, eqs }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.ineqs.iter().all(|h| h.eval(x) <= GEOM_TOL)
            && self.eqs.iter().all(|h| h.eval(x).abs() <= GEOM_TOL)
    }

    pub fn intersect(&self, other: &ConvexSet) -> ConvexSet {
        let mut ineqs = self.ineqs.clone();
        ineqs.extend(other.ineqs.iter().cloned());
        let mut eqs = self.eqs.clone();
        eqs.extend(other.eqs.iter().cloned());
        ConvexSet::new(self.dim, ineqs, eqs)
    }

    pub fn with_ineqs(&self, extra: &[Halfspace]) -> ConvexSet {
        let mut s = self.clone();
        s.ineqs.extend(extra.iter().cloned());
        s
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        enumerate_vertices(self.dim, &self.ineqs, &self.eqs)
    }

    /// Empty test; exact for sets that have a vertex whenever nonempty
    /// (bounded sets, in particular).
    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        const FAR: f64 = 1e6;
        let lo = vec![-FAR; self.dim];
        let hi = vec![FAR; self.dim];
        let boxed = self.with_ineqs(&ConvexPolytope::aabb(&lo, &hi).halfspaces);
        boxed
            .vertices()
            .iter()
            .all(|v| v.iter().all(|c| c.abs() < FAR * 0.5))
    }

    /// Affine dimension implied by the equality constraints.
    pub fn affine_dim(&self) -> usize {
        let rows: Vec<Vec<f64>> = self.eqs.iter().map(|h| h.normal.clone()).collect();
        orthonormal_complement(&rows, self.dim).len()
    }

    /// Hausdorff measure of dimension `affine_dim()`; zero for sets that are
    /// degenerate within their affine hull.
    pub fn measure(&self) -> f64 {
        if self.eqs.is_empty() {
            return volume_full(self.dim, &self.ineqs);
        }
        let rows: Vec<Vec<f64>> = self.eqs.iter().map(|h| h.normal.clone()).collect();
        let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let rhs: Vec<f64> = self.eqs.iter().map(|h| h.offset).collect();
        let Some(p0) = project_affine(&vec![0.0; self.dim], &row_refs, &rhs) else {
            return 0.0;
        };
        if self.eqs.iter().any(|h| h.eval(&p0).abs() > GEOM_TOL) {
            return 0.0;
        }
        let basis = orthonormal_complement(&rows, self.dim);
        let reduced: Vec<Halfspace> = self
            .ineqs
            .iter()
            .map(|h| Halfspace {
                normal: basis.iter().map(|b| dot(&h.normal, b)).collect(),
                offset: h.offset - dot(&h.normal, &p0),
            })
            .collect();
        volume_full(basis.len(), &reduced)
    }

    /// Exact L∞ distance from `x`, solved as a small linear program by vertex
    /// enumeration over `(y, t)`.
    pub fn dist_linf(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        let d = self.dim;
        let lift = |h: &Halfspace| {
            let mut normal = h.normal.clone();
            normal.push(0.0);
            Halfspace::new(normal, h.offset)
        };
        let mut ineqs: Vec<Halfspace> = self.ineqs.iter().map(lift).collect();
        for i in 0..d {
            let mut up = vec![0.0; d + 1];
            up[i] = 1.0;
            up[d] = -1.0;
            ineqs.push(Halfspace::new(up, x[i]));
            let mut down = vec![0.0; d + 1];
            down[i] = -1.0;
            down[d] = -1.0;
            ineqs.push(Halfspace::new(down, -x[i]));
        }
        let eqs: Vec<Halfspace> = self.eqs.iter().map(lift).collect();
        enumerate_vertices(d + 1, &ineqs, &eqs)
            .iter()
            .map(|z| z[d])
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    /// Exact Euclidean distance from `x`: the projection lies in the relative
    /// interior of some face, so projecting onto every candidate active set and
    /// keeping the feasible minimum is exact.
    pub fn dist_l2(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        let (ineqs, eqs) = match normalize_all(&self.ineqs, &self.eqs) {
            Some(v) => v,
            None => return f64::INFINITY,
        };
        let free = self.dim.saturating_sub(eqs.len());
        let mut best = f64::INFINITY;
        for k in 0..=free.min(ineqs.len()) {
            for combo in (0..ineqs.len()).combinations(k) {
                let mut rows: Vec<&[f64]> = eqs.iter().map(|h| h.normal.as_slice()).collect();
                let mut rhs: Vec<f64> = eqs.iter().map(|h| h.offset).collect();
                for &i in &combo {
                    rows.push(&ineqs[i].normal);
                    rhs.push(ineqs[i].offset);
                }
                if rows.is_empty() {
                    continue;
                }
                let Some(y) = project_affine(x, &rows, &rhs) else {
                    continue;
                };
                if feasible(&y, &ineqs, &eqs) {
                    best = best.min(norm(&sub(&y, x)));
                }
            }
        }
        best
    }
}

fn normalize_all(
    ineqs: &[Halfspace],
    eqs: &[Halfspace],
) -> Option<(Vec<Halfspace>, Vec<Halfspace>)> {
    let mut ni = Vec::with_capacity(ineqs.len());
    for h in ineqs {
        match h.normalized() {
            Some(n) => ni.push(n),
            None if h.offset < -GEOM_TOL => return None,
            None => {}
        }
    }
    let mut ne = Vec::with_capacity(eqs.len());
    for h in eqs {
        match h.normalized() {
            Some(n) => ne.push(n),
            None if h.offset.abs() > GEOM_TOL => return None,
            None => {}
        }
    }
    Some((ni, ne))
}

fn feasible(x: &[f64], ineqs: &[Halfspace], eqs: &[Halfspace]) -> bool {
    ineqs.iter().all(|h| h.eval(x) <= GEOM_TOL) && eqs.iter().all(|h| h.eval(x).abs() <= GEOM_TOL)
}

/// All vertices of `{ineqs} ∩ {eqs}` by basis enumeration, deduplicated, in a
/// deterministic order.
pub fn enumerate_vertices(dim: usize, ineqs: &[Halfspace], eqs: &[Halfspace]) -> Vec<Vec<f64>> {
    let Some((ineqs, eqs)) = normalize_all(ineqs, eqs) else {
        return Vec::new();
    };
    if eqs.len() > dim {
        return Vec::new();
    }
    let k = dim - eqs.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    if k == 0 {
        let rows: Vec<&[f64]> = eqs.iter().map(|h| h.normal.as_slice()).collect();
        let rhs: Vec<f64> = eqs.iter().map(|h| h.offset).collect();
        if let Some(x) = solve_square(&rows, &rhs) {
            if feasible(&x, &ineqs, &eqs) {
                out.push(x);
            }
        }
        return out;
    }
    for combo in (0..ineqs.len()).combinations(k) {
        let mut rows: Vec<&[f64]> = eqs.iter().map(|h| h.normal.as_slice()).collect();
        let mut rhs: Vec<f64> = eqs.iter().map(|h| h.offset).collect();
        for &i in &combo {
            rows.push(&ineqs[i].normal);
            rhs.push(ineqs[i].offset);
        }
        let Some(x) = solve_square(&rows, &rhs) else {
            continue;
        };
        if !feasible(&x, &ineqs, &eqs) {
            continue;
        }
        let dup = out
            .iter()
            .any(|v| v.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 10.0 * GEOM_TOL));
        if !dup {
            out.push(x);
        }
    }
    out
}

/// Volume of a bounded full-dimensional polytope in R^k by cone decomposition
/// from the vertex centroid, recursing into facets.
fn volume_full(k: usize, ineqs: &[Halfspace]) -> f64 {
    let Some((rows, _)) = normalize_all(ineqs, &[]) else {
        return 0.0;
    };
    // Zero rows survive `normalize_all` only when feasible; drop them.
    let rows: Vec<Halfspace> = rows;
    match k {
        0 => 1.0,
        1 => {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for h in &rows {
                if h.normal[0] > 0.0 {
                    hi = hi.min(h.offset / h.normal[0]);
                } else {
                    lo = lo.max(h.offset / h.normal[0]);
                }
            }
            (hi - lo).max(0.0)
        }
        _ => {
            let verts = enumerate_vertices(k, &rows, &[]);
            if verts.len() <= k {
                return 0.0;
            }
            let mut centroid = vec![0.0; k];
            for v in &verts {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x;
                }
            }
            for c in centroid.iter_mut() {
                *c /= verts.len() as f64;
            }
            let mut facets: Vec<&Halfspace> = Vec::new();
            for h in &rows {
                let dup = facets.iter().any(|f| {
                    f.normal
                        .iter()
                        .zip(&h.normal)
                        .all(|(a, b)| (a - b).abs() <= GEOM_TOL)
                        && (f.offset - h.offset).abs() <= GEOM_TOL
                });
                if !dup {
                    facets.push(h);
                }
            }
            let mut total = 0.0;
            for (i, f) in facets.iter().enumerate() {
                let height = -f.eval(&centroid);
                if height <= GEOM_TOL {
                    continue;
                }
                let basis = orthonormal_complement(&[f.normal.clone()], k);
                let anchor: Vec<f64> = f.normal.iter().map(|a| a * f.offset).collect();
                let reduced: Vec<Halfspace> = facets
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, g)| Halfspace {
                        normal: basis.iter().map(|b| dot(&g.normal, b)).collect(),
                        offset: g.offset - dot(&g.normal, &anchor),
                    })
                    .collect();
                total += height * volume_full(k - 1, &reduced) / k as f64;
            }
            total
        }
    }
}
