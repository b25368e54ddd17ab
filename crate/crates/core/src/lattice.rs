//! The rescaled lattice `Z^d / n` restricted to a domain, with its discrete
//! boundary and the two marked boundary vertex sets.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{geometry, mesh, Result};
use crate::geometry::{Domain, Side, GEOM_TOL};

/// Nearest-neighbour edge `u → u + e_axis`; `u` precedes `v` lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeEdge {
    pub u: usize,
    pub v: usize,
    pub axis: usize,
}

/// Vertices are integer points `k` standing for `k / n`, stored in
/// lexicographic order; edges are ordered by (lower endpoint, axis).
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    dim: usize,
    n: u32,
    coords: Vec<i64>,
    index: HashMap<Vec<i64>, usize>,
    edges: Vec<LatticeEdge>,
    gamma: Vec<usize>,
    gamma1: Vec<usize>,
    gamma2: Vec<usize>,
}

impl Lattice {
    /// Canonical lattice on the given integer points, with every
    /// nearest-neighbour pair among them as an edge and no marks.
    pub fn from_vertices(dim: usize, n: u32, mut points: Vec<Vec<i64>>) -> Self {
        points.sort();
        points.dedup();
        let index: HashMap<Vec<i64>, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut edges = Vec::new();
        let mut probe = vec![0i64; dim];
        for (u, p) in points.iter().enumerate() {
            for axis in 0..dim {
                probe.copy_from_slice(p);
                probe[axis] += 1;
                if let Some(&v) = index.get(&probe) {
                    edges.push(LatticeEdge { u, v, axis });
                }
            }
        }
        let coords = points.concat();
        Self {
            dim,
            n,
            coords,
            index,
            edges,
            gamma: Vec::new(),
            gamma1: Vec::new(),
            gamma2: Vec::new(),
        }
    }

    pub(crate) fn set_marks(&mut self, gamma: Vec<usize>, gamma1: Vec<usize>, gamma2: Vec<usize>) {
        self.gamma = gamma;
        self.gamma1 = gamma1;
        self.gamma2 = gamma2;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    /// Integer coordinates of vertex `i`.
    pub fn vertex(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Physical position `k / n` of vertex `i`.
    pub fn position(&self, i: usize) -> Vec<f64> {
        let n = self.n as f64;
        self.vertex(i).iter().map(|&k| k as f64 / n).collect()
    }

    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// Vertices with a nearest neighbour outside the vertex set.
    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn gamma1(&self) -> &[usize] {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &[usize] {
        &self.gamma2
    }

    /// `(neighbour, edge index)` lists per vertex.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    /// Whether some nearest neighbour of `i` in `Z^d` is missing from the set.
    pub fn has_outside_neighbour(&self, i: usize) -> bool {
        let mut probe = self.vertex(i).to_vec();
        (0..self.dim).any(|axis| {
            [-1i64, 1].iter().any(|&step| {
                probe[axis] += step;
                let missing = !self.index.contains_key(&probe);
                probe[axis] -= step;
                missing
            })
        })
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        if nv == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == nv
    }

    pub fn summary(&self) -> LatticeSummary {
        LatticeSummary {
            dim: self.dim,
            n: self.n,
            vertices: self.num_vertices(),
            edges: self.num_edges(),
            gamma: self.gamma.len(),
            gamma1: self.gamma1.len(),
            gamma2: self.gamma2.len(),
        }
    }

    pub fn graph(&self) -> LatticeGraph {
        LatticeGraph {
            vertices: (0..self.num_vertices()).map(|i| self.vertex(i).to_vec()).collect(),
            edges: self.edges.iter().map(|e| [e.u, e.v]).collect(),
            gamma: self.gamma.clone(),
            gamma1: self.gamma1.clone(),
            gamma2: self.gamma2.clone(),
        }
    }
}

/// Counts reported by `percoflow discretize`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeSummary {
    pub dim: usize,
    pub n: u32,
    pub vertices: usize,
    pub edges: usize,
    pub gamma: usize,
    pub gamma1: usize,
    pub gamma2: usize,
}

/// The full graph, integer coordinates and vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeGraph {
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<[usize; 2]>,
    pub gamma: Vec<usize>,
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
}

/// Discretizes `domain` at mesh `1/n`:
///
/// * `Ω_n`: lattice points at L∞ distance `< 1/n` from `Ω`,
/// * `Γ_n`: points of `Ω_n` with a nearest neighbour outside `Ω_n`,
/// * `Γ^i_n`: points of `Γ_n` within `< 1/n` of `Γ^i` and `≥ 1/n` from `Γ^{3−i}`.
pub fn discretize(domain: &Domain, n: u32) -> Result<Lattice> {
    if n == 0 {
        return Err(mesh("mesh parameter n must be at least 1"));
    }
    let d = domain.dim;
    let nf = n as f64;
    let cutoff = 1.0 / nf - GEOM_TOL;
    let (lo, hi) = domain.bounding_box();
    let kmin: Vec<i64> = lo.iter().map(|&l| (l * nf).floor() as i64 - 1).collect();
    let kmax: Vec<i64> = hi.iter().map(|&h| (h * nf).ceil() as i64 + 1).collect();

    let mut points = Vec::new();
    let mut k = kmin.clone();
    'scan: loop {
        let x: Vec<f64> = k.iter().map(|&c| c as f64 / nf).collect();
        if domain.contains_closed(&x) || domain.dist_linf(&x) < cutoff {
            points.push(k.clone());
        }
        for axis in (0..d).rev() {
            if k[axis] < kmax[axis] {
                k[axis] += 1;
                continue 'scan;
            }
            k[axis] = kmin[axis];
        }
        break;
    }
    if points.is_empty() {
        return Err(mesh(format!("mesh too coarse: no lattice point at n = {n}")));
    }

    let mut lat = Lattice::from_vertices(d, n, points);
    let gamma: Vec<usize> = (0..lat.num_vertices())
        .filter(|&i| lat.has_outside_neighbour(i))
        .collect();
    let mut marks = [Vec::new(), Vec::new()];
    for &i in &gamma {
        let x = lat.position(i);
        let d1 = domain.patch_dist_linf(&x, Side::Source);
        let d2 = domain.patch_dist_linf(&x, Side::Sink);
        if d1 < cutoff && d2 >= cutoff {
            marks[0].push(i);
        } else if d2 < cutoff && d1 >= cutoff {
            marks[1].push(i);
        }
    }
    let [gamma1, gamma2] = marks;
    for (name, set) in [("source", &gamma1), ("sink", &gamma2)] {
        if set.is_empty() {
            return Err(mesh(format!(
                "no lattice vertex represents the {name} patch at n = {n}"
            )));
        }
    }
    lat.set_marks(gamma, gamma1, gamma2);
    Ok(lat)
}

/// Affine map `y_i = sign_i · x_{perm_i} + shift_i` of `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
    pub shift: Vec<f64>,
}

impl SignedPermutation {
    pub fn identity(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
            signs: vec![1; d],
            shift: vec![0.0; d],
        }
    }

    /// `x_axis ↦ 2 c − x_axis`.
    pub fn reflection(d: usize, axis: usize, center: f64) -> Self {
        let mut s = Self::identity(d);
        s.signs[axis] = -1;
        s.shift[axis] = 2.0 * center;
        s
    }

    /// Quarter turn in the `(i, j)` plane about `center`: `x_i ↦ c_i − (x_j − c_j)`,
    /// `x_j ↦ c_j + (x_i − c_i)`.
    pub fn quarter_turn(d: usize, i: usize, j: usize, center: &[f64]) -> Self {
        let mut s = Self::identity(d);
        s.perm[i] = j;
        s.perm[j] = i;
        s.signs[i] = -1;
        s.shift[i] = center[i] + center[j];
        s.shift[j] = center[j] - center[i];
        s
    }

    /// Pure linear signed permutations of `R^d` (the hyperoctahedral group).
    pub fn linear_group(d: usize) -> Vec<SignedPermutation> {
        use itertools::Itertools;
        let mut out = Vec::new();
        for perm in (0..d).permutations(d) {
            for mask in 0..(1u32 << d) {
                let signs = (0..d)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                out.push(SignedPermutation {
                    perm: perm.clone(),
                    signs,
                    shift: vec![0.0; d],
                });
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| self.signs[i] as f64 * x[self.perm[i]] + self.shift[i])
            .collect()
    }

    pub fn apply_linear(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| self.signs[i] as f64 * x[self.perm[i]])
            .collect()
    }

    fn apply_int(&self, k: &[i64], shift: &[i64]) -> Vec<i64> {
        (0..k.len())
            .map(|i| self.signs[i] as i64 * k[self.perm[i]] + shift[i])
            .collect()
    }

    fn integer_shift(&self, n: u32) -> Result<Vec<i64>> {
        self.shift
            .iter()
            .map(|&s| {
                let v = s * n as f64;
                let r = v.round();
                if (v - r).abs() > GEOM_TOL * n as f64 {
                    Err(geometry("symmetry shift is not a lattice translation"))
                } else {
                    Ok(r as i64)
                }
            })
            .collect()
    }
}

/// Vertex and edge correspondence induced by a lattice symmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    /// `vertex[i]` is the image of vertex `i`.
    pub vertex: Vec<usize>,
    /// `edge[e]` is the image of edge `e`.
    pub edge: Vec<usize>,
}

/// Vertex/edge correspondence of `sym` on `lat`; fails unless `sym` maps the
/// vertex set onto itself.
pub fn relabeling(lat: &Lattice, sym: &SignedPermutation) -> Result<Relabeling> {
    let d = lat.dim();
    if sym.perm.len() != d || sym.signs.len() != d || sym.shift.len() != d {
        return Err(geometry("symmetry dimension does not match the lattice"));
    }
    let shift = sym.integer_shift(lat.n())?;
    let mut vertex = Vec::with_capacity(lat.num_vertices());
    for i in 0..lat.num_vertices() {
        let img = sym.apply_int(lat.vertex(i), &shift);
        let j = lat
            .index_of(&img)
            .ok_or_else(|| geometry("symmetry does not preserve the vertex set"))?;
        vertex.push(j);
    }
    let edge_index: HashMap<(usize, usize), usize> = lat
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.u, e.v), i))
        .collect();
    let mut edge = Vec::with_capacity(lat.num_edges());
    for e in lat.edges() {
        let (a, b) = (vertex[e.u], vertex[e.v]);
        let key = (a.min(b), a.max(b));
        let j = *edge_index
            .get(&key)
            .ok_or_else(|| geometry("symmetry does not preserve the edge set"))?;
        edge.push(j);
    }
    Ok(Relabeling { vertex, edge })
}

/// Image of `lat` under a symmetry of the domain; the marked sets are carried
/// along, so a symmetry exchanging the patches swaps `Γ¹_n` and `Γ²_n`.
pub fn automorphism_apply(lat: &Lattice, sym: &SignedPermutation) -> Result<Lattice> {
    let map = relabeling(lat, sym)?;
    let image = |set: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&i| map.vertex[i]).collect();
        v.sort_unstable();
        v
    };
    let g1 = image(lat.gamma1());
    let g2 = image(lat.gamma2());
    let same = |a: &[usize], b: &[usize]| {
        a.iter().collect::<HashSet<_>>() == b.iter().collect::<HashSet<_>>()
    };
    let preserved = (same(&g1, lat.gamma1()) && same(&g2, lat.gamma2()))
        || (same(&g1, lat.gamma2()) && same(&g2, lat.gamma1()));
    if !preserved {
        return Err(geometry("symmetry does not preserve the boundary patches"));
    }
    let mut out = lat.clone();
    out.set_marks(image(lat.gamma()), g1, g2);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions(lat: &Lattice, set: &[usize]) -> Vec<Vec<f64>> {
        set.iter().map(|&i| lat.position(i)).collect()
    }

    #[test]
    fn unit_square_at_n2() {
        let lat = discretize(&Domain::unit_square(), 2).unwrap();
        assert_eq!(lat.num_vertices(), 9);
        assert_eq!(lat.gamma().len(), 8);
        assert!(!lat.gamma().contains(&lat.index_of(&[1, 1]).unwrap()));
        assert_eq!(
            positions(&lat, lat.gamma1()),
            vec![vec![0.0, 0.0], vec![0.0, 0.5], vec![0.0, 1.0]]
        );
        assert_eq!(
            positions(&lat, lat.gamma2()),
            vec![vec![1.0, 0.0], vec![1.0, 0.5], vec![1.0, 1.0]]
        );
        assert_eq!(lat.num_edges(), 12);
    }

    #[test]
    fn unit_square_at_n1() {
        let lat = discretize(&Domain::unit_square(), 1).unwrap();
        assert_eq!(lat.num_vertices(), 4);
        assert_eq!(lat.gamma().len(), 4);
        assert_eq!(lat.num_edges(), 4);
    }

    #[test]
    fn patch_sizes_grow_with_n() {
        for n in 2..=9 {
            let lat = discretize(&Domain::unit_square(), n).unwrap();
            assert_eq!(lat.gamma1().len(), n as usize + 1);
            assert_eq!(lat.gamma2().len(), n as usize + 1);
        }
    }

    #[test]
    fn deterministic_ordering() {
        let a = discretize(&Domain::l_shape(), 4).unwrap();
        let b = discretize(&Domain::l_shape(), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.edges().windows(2).all(|w| (w[0].u, w[0].axis) < (w[1].u, w[1].axis)));
        assert!(a.is_connected());
    }

    #[test]
    fn zero_mesh_rejected() {
        assert!(matches!(discretize(&Domain::unit_square(), 0), Err(crate::Error::Mesh(_))));
    }

    #[test]
    fn vanishing_patch_is_an_error() {
        use crate::geometry::{halfspace, BoundaryPatch, ConvexPolytope};
        // both patches on the left edge, 0.2 apart: at n = 1 every candidate
        // vertex is within 1/n of both and gets excluded
        let mut d = Domain::unit_square();
        d.gamma1 = vec![BoundaryPatch::restricted(
            0,
            0,
            ConvexPolytope::new(vec![halfspace(&[0.0, 1.0], 0.4)]),
        )];
        d.gamma2 = vec![BoundaryPatch::restricted(
            0,
            0,
            ConvexPolytope::new(vec![halfspace(&[0.0, -1.0], -0.6)]),
        )];
        d.validate().unwrap();
        assert!(matches!(discretize(&d, 1), Err(crate::Error::Mesh(_))));
        assert!(discretize(&d, 20).is_ok());
    }

    #[test]
    fn mirror_swaps_patches() {
        let lat = discretize(&Domain::unit_square(), 4).unwrap();
        let img = automorphism_apply(&lat, &SignedPermutation::reflection(2, 0, 0.5)).unwrap();
        assert_eq!(img.gamma1(), lat.gamma2());
        assert_eq!(img.gamma2(), lat.gamma1());
        assert_eq!(img.edges(), lat.edges());
    }

    #[test]
    fn identity_is_identity() {
        let lat = discretize(&Domain::unit_square(), 3).unwrap();
        assert_eq!(automorphism_apply(&lat, &SignedPermutation::identity(2)).unwrap(), lat);
    }

    #[test]
    fn quarter_turn_breaks_patches() {
        let lat = discretize(&Domain::unit_square(), 4).unwrap();
        let rot = SignedPermutation::quarter_turn(2, 0, 1, &[0.5, 0.5]);
        // the vertex set is preserved, the patches are not
        relabeling(&lat, &rot).unwrap();
        assert!(automorphism_apply(&lat, &rot).is_err());
    }

    #[test]
    fn non_lattice_symmetry_rejected() {
        let lat = discretize(&Domain::unit_square(), 4).unwrap();
        assert!(automorphism_apply(&lat, &SignedPermutation::reflection(2, 0, 0.3)).is_err());
    }

    #[test]
    fn hyperoctahedral_group_size() {
        assert_eq!(SignedPermutation::linear_group(2).len(), 8);
        assert_eq!(SignedPermutation::linear_group(3).len(), 48);
    }
}
