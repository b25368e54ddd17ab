//! The continuous min-cut side: the capacity functional `I_Ω(P)` of separating
//! polyhedral sets, flat-cut upper bounds, the positivity criterion and
//! two planar limit formulas.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::{atom_at_zero, CapacityLaw, PcTable};
use crate::cylinder::NuEstimate;
use crate::error::{config, geometry, Result};
use crate::geometry::linalg::{dot, norm, scale};
use crate::geometry::{hd_measure_facet, ConvexPolytope, ConvexSet, Domain, Halfspace, Side, GEOM_TOL};
use crate::lattice::SignedPermutation;

/// Sampled values of `ν` on the unit circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuTable {
    pub directions: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Symmetrized interpolation nodes: angle in `[0, 2π)` and value.
#[derive(Clone, Debug, PartialEq)]
struct Nodes(Vec<(f64, f64)>);

impl NuTable {
    pub fn from_estimates(estimates: &[NuEstimate]) -> Self {
        Self {
            directions: estimates.iter().map(|e| e.direction.clone()).collect(),
            values: estimates.iter().map(NuEstimate::point).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.directions.is_empty() || self.directions.len() != self.values.len() {
            return Err(config("a ν table needs one value per direction and at least one entry"));
        }
        if self.directions.iter().any(|d| d.len() != 2 || !(norm(d) > GEOM_TOL)) {
            return Err(config("ν tables are supported for nonzero planar directions only"));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(config("ν table values must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Images of every sample under the eight lattice symmetries, merged when
    /// they land on the same angle.
    fn nodes(&self) -> Nodes {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (d, &val) in self.directions.iter().zip(&self.values) {
            for sym in SignedPermutation::linear_group(2) {
                let w = sym.apply_linear(d);
                raw.push((w[1].atan2(w[0]).rem_euclid(2.0 * PI), val));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64, usize)> = Vec::new();
        for (a, v) in raw {
            match merged.last_mut() {
                Some(last) if (a - last.0).abs() < 1e-9 => {
                    last.1 += v;
                    last.2 += 1;
                }
                _ => merged.push((a, v, 1)),
            }
        }
        if merged.len() > 1 {
            let (first, last) = (merged[0], merged[merged.len() - 1]);
            if (first.0 + 2.0 * PI - last.0).abs() < 1e-9 {
                merged[0].1 += last.1;
                merged[0].2 += last.2;
                merged.pop();
            }
        }
        Nodes(merged.into_iter().map(|(a, s, c)| (a, s / c as f64)).collect())
    }
}

impl Nodes {
    fn eval(&self, angle: f64) -> f64 {
        let nodes = &self.0;
        if nodes.len() == 1 {
            return nodes[0].1;
        }
        let a = angle.rem_euclid(2.0 * PI);
        let m = nodes.len();
        let k = nodes.partition_point(|n| n.0 <= a);
        let (lo, hi) = match k {
            0 => ((nodes[m - 1].0 - 2.0 * PI, nodes[m - 1].1), nodes[0]),
            k if k == m => (nodes[m - 1], (nodes[0].0 + 2.0 * PI, nodes[0].1)),
            k => (nodes[k - 1], nodes[k]),
        };
        let w = (a - lo.0) / (hi.0 - lo.0);
        lo.1 + w * (hi.1 - lo.1)
    }
}

/// Model of the asymptotic capacity per unit area `ν(v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NuModel {
    Constant { nu: f64 },
    /// `ν(v) = c · |v|₁` for unit `v`.
    L1Scaled { c: f64 },
    Table(NuTable),
}

impl NuModel {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let m: NuModel = serde_json::from_str(s).map_err(|e| config(format!("ν model: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NuModel::Constant { nu: c } | NuModel::L1Scaled { c } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(config("ν model constant must be finite and nonnegative"));
                }
                Ok(())
            }
            NuModel::Table(t) => t.validate(),
        }
    }

    /// `ν(v / |v|₂)`.
    pub fn eval(&self, v: &[f64]) -> f64 {
        let len = norm(v);
        match self {
            NuModel::Constant { nu } => *nu,
            NuModel::L1Scaled { c } => c * v.iter().map(|x| x.abs()).sum::<f64>() / len,
            NuModel::Table(t) => t.nodes().eval(v[1].atan2(v[0])),
        }
    }

    /// Smallest value on the unit sphere of dimension `d − 1`.
    pub fn nu_min(&self, _d: usize) -> f64 {
        match self {
            NuModel::Constant { nu } => *nu,
            NuModel::L1Scaled { c } => *c,
            NuModel::Table(t) => t.values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest value on the unit sphere of dimension `d − 1`.
    pub fn nu_max(&self, d: usize) -> f64 {
        match self {
            NuModel::Constant { nu } => *nu,
            NuModel::L1Scaled { c } => c * (d as f64).sqrt(),
            NuModel::Table(t) => t.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// A convex polyhedral set `P = ∩ {normal · x ≤ offset}`, possibly unbounded,
/// meant to contain `Γ¹` in its interior and keep `Γ²` outside its closure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralCut {
    pub halfspaces: Vec<Halfspace>,
}

impl PolyhedralCut {
    pub fn new(halfspaces: Vec<Halfspace>) -> Self {
        Self { halfspaces }
    }

    /// `{x : axis · x ≤ offset}`.
    pub fn flat(axis: &[f64], offset: f64) -> Self {
        let len = norm(axis);
        Self::new(vec![Halfspace::new(scale(axis, 1.0 / len), offset / len)])
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| config(format!("cut: {e}")))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn polytope(&self) -> ConvexPolytope {
        ConvexPolytope::new(self.halfspaces.clone())
    }

    fn as_set(&self, dim: usize) -> ConvexSet {
        ConvexSet::new(dim, self.halfspaces.clone(), Vec::new())
    }
}

/// Contribution of one facet of `∂P` clipped to `Ω`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetPiece {
    pub facet: usize,
    /// Outward unit normal of `P` on this facet.
    pub normal: Vec<f64>,
    pub area: f64,
    pub nu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityFunctionalValue {
    pub value: f64,
    pub pieces: Vec<FacetPiece>,
}

const MAX_PIECES: usize = 16;

/// `(d−1)`-measure of `face ∩ closure(Ω)` by inclusion-exclusion over pieces.
fn measure_in_domain(face: &ConvexSet, domain: &Domain) -> f64 {
    let k = domain.pieces.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let mut set = face.clone();
        for (j, piece) in domain.pieces.iter().enumerate() {
            if mask & (1 << j) != 0 {
                set = set.with_ineqs(&piece.halfspaces);
            }
        }
        let m = set.measure();
        if mask.count_ones() % 2 == 1 {
            total += m;
        } else {
            total -= m;
        }
    }
    total.max(0.0)
}

fn check_cut(cut: &PolyhedralCut, domain: &Domain) -> Result<()> {
    let not_separating = || geometry("not a separating polyhedral set");
    if cut.halfspaces.is_empty() || cut.halfspaces.iter().any(|h| h.normal.len() != domain.dim) {
        return Err(not_separating());
    }
    if domain.pieces.len() > MAX_PIECES {
        return Err(geometry(format!("at most {MAX_PIECES} domain pieces are supported")));
    }
    let poly = cut.polytope();
    for patch in domain.patches(Side::Source) {
        let verts = domain.patch_set(patch).vertices();
        if verts.is_empty() || !verts.iter().all(|x| poly.contains_strict(x)) {
            return Err(not_separating());
        }
    }
    let closed = cut.as_set(domain.dim);
    for patch in domain.patches(Side::Sink) {
        if !domain.patch_set(patch).intersect(&closed).is_empty() {
            return Err(not_separating());
        }
    }
    for h in &cut.halfspaces {
        for piece in &domain.pieces {
            if piece.halfspaces.iter().any(|f| h.coincident_with(f, GEOM_TOL)) {
                return Err(geometry("cut is not transverse to the domain boundary"));
            }
        }
    }
    Ok(())
}

/// `I_Ω(P) = ∫_{∂P ∩ Ω} ν(v_P(x)) dH^{d−1}(x)`.
pub fn i_omega(cut: &PolyhedralCut, domain: &Domain, nu: &NuModel) -> Result<CapacityFunctionalValue> {
    i_omega_subdivided(cut, domain, nu, &[])
}

/// `I_Ω(P)` with every facet split along the arrangement of `planes` before
/// measuring; the value does not depend on the subdivision.
pub fn i_omega_subdivided(
    cut: &PolyhedralCut,
    domain: &Domain,
    nu: &NuModel,
    planes: &[Halfspace],
) -> Result<CapacityFunctionalValue> {
    check_cut(cut, domain)?;
    if planes.len() > 12 {
        return Err(config("too many subdivision planes"));
    }
    let poly = cut.polytope();
    let mut pieces = Vec::new();
    let mut value = 0.0;
    for (i, h) in cut.halfspaces.iter().enumerate() {
        let normal = scale(&h.normal, 1.0 / norm(&h.normal));
        let weight = nu.eval(&normal);
        let facet = poly.facet_set(i, None);
        let mut area = 0.0;
        for signs in 0u32..(1 << planes.len()) {
            let cell: Vec<Halfspace> = planes
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if signs & (1 << j) != 0 {
                        p.clone()
                    } else {
                        Halfspace::new(scale(&p.normal, -1.0), -p.offset)
                    }
                })
                .collect();
            area += measure_in_domain(&facet.with_ineqs(&cell), domain);
        }
        if area > 0.0 {
            value += area * weight;
            pieces.push(FacetPiece {
                facet: i,
                normal,
                area,
                nu: weight,
            });
        }
    }
    Ok(CapacityFunctionalValue { value, pieces })
}

/// Best flat cut `{x · axis ≤ offset}` among the separating, transverse
/// offsets tried.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatCutBound {
    pub axis: Vec<f64>,
    pub offset: f64,
    pub value: f64,
    /// Offsets that gave an admissible cut.
    pub admissible: usize,
}

/// Minimizes `I_Ω` over flat cuts orthogonal to `axis`; ties go to the
/// smallest offset.
pub fn flat_cut_bound(domain: &Domain, nu: &NuModel, axis: &[f64], offsets: &[f64]) -> Result<FlatCutBound> {
    if axis.len() != domain.dim || !(norm(axis) > GEOM_TOL) {
        return Err(config("axis must be a nonzero vector of the domain dimension"));
    }
    let unit = scale(axis, 1.0 / norm(axis));
    let mut sorted = offsets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    let mut admissible = 0;
    for &c in &sorted {
        let Ok(v) = i_omega(&PolyhedralCut::flat(&unit, c), domain, nu) else {
            continue;
        };
        admissible += 1;
        match best {
            Some((_, bv)) if v.value >= bv - 1e-12 => {}
            _ => best = Some((c, v.value)),
        }
    }
    let (offset, value) = best.ok_or_else(|| geometry("no offset gives a separating flat cut"))?;
    Ok(FlatCutBound {
        axis: unit,
        offset,
        value,
        admissible,
    })
}

/// `grid − 1` equally spaced offsets strictly inside the extent of the domain
/// along `axis`.
pub fn offset_grid(domain: &Domain, axis: &[f64], grid: usize) -> Vec<f64> {
    let unit = scale(axis, 1.0 / norm(axis));
    let proj: Vec<f64> = domain
        .pieces
        .iter()
        .flat_map(|p| p.vertices())
        .map(|x| dot(&x, &unit))
        .collect();
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (1..grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect()
}

/// `φ_Ω > 0` exactly when `Λ(0) < 1 − p_c(d)`.
pub fn positivity(law: &CapacityLaw, d: usize, pc: &PcTable) -> Result<bool> {
    if d < 2 {
        return Err(config("dimension must be at least 2"));
    }
    Ok(atom_at_zero(law) < 1.0 - pc.get(d)?)
}

const GRID_STEP: f64 = 1e-4;

/// `inf { ν(v′) / (v · v′) : v · v′ ≥ cos α }` in the plane.
pub fn tilted_limit_2d(v: &[f64], alpha: f64, nu: &NuModel) -> Result<f64> {
    if v.len() != 2 || !(norm(v) > GEOM_TOL) {
        return Err(config("tilted limit needs a nonzero planar direction"));
    }
    if !(0.0..=PI / 2.0 + 1e-12).contains(&alpha) {
        return Err(config("tilt angle must lie in [0, π/2]"));
    }
    let base = v[1].atan2(v[0]);
    let ratio = |theta: f64| -> f64 {
        let c = theta.cos();
        if c <= 1e-12 {
            return f64::INFINITY;
        }
        let a = base + theta;
        nu.eval(&[a.cos(), a.sin()]) / c
    };
    let steps = (alpha / GRID_STEP).floor() as i64;
    let mut grid: Vec<f64> = (-steps..=steps).map(|k| k as f64 * GRID_STEP).collect();
    grid.push(-alpha);
    grid.push(alpha);
    let mut best = (0.0, ratio(0.0));
    for &t in &grid {
        let r = ratio(t);
        if r < best.1 {
            best = (t, r);
        }
    }
    // golden-section search around the best grid point
    let (mut lo, mut hi) = (
        (best.0 - GRID_STEP).max(-alpha),
        (best.0 + GRID_STEP).min(alpha),
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if ratio(a) < ratio(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(best.1.min(ratio(0.5 * (lo + hi))))
}

/// `∫_{∂A} ν(v_A) dH¹` for a bounded convex polygon `A`.
pub fn convex_set_capacity_2d(poly: &ConvexPolytope, nu: &NuModel) -> Result<f64> {
    if poly.dim() != 2 {
        return Err(config("convex set capacity is planar only"));
    }
    if !poly.is_bounded() || poly.volume() <= GEOM_TOL {
        return Err(geometry("degenerate polygon"));
    }
    let mut total = 0.0;
    for (i, h) in poly.halfspaces.iter().enumerate() {
        let len = hd_measure_facet(poly, i, None);
        if len > 0.0 {
            total += len * nu.eval(&h.normal);
        }
    }
    Ok(total)
}

impl From<NuTable> for NuModel {
    fn from(t: NuTable) -> Self {
        NuModel::Table(t)
    }
}
