//! Flows through a cylinder `cyl(A, h)`: `τ` between the two lateral
//! half-boundaries and `φ` from bottom to top, and Monte-Carlo estimation of
//! the asymptotic capacity per unit area `ν(v)`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{fixed_to_f64, sample, CapacityAssignment, CapacityLaw, Fixed};
use crate::error::{geometry, mesh, Error, Result};
use crate::flow::max_flow;
use crate::geometry::linalg::norm;
use crate::geometry::{CylinderSpec, Face, GEOM_TOL};
use crate::lattice::Lattice;
use crate::stats::summarize;

/// The graph `cyl(A, h) ∩ Z^d/n` with its four marked vertex sets.
///
/// `lattice.gamma1()` is `A_1^h` (below `hyp(A)`, opposite to `v`) and
/// `lattice.gamma2()` is `A_2^h` (above).
#[derive(Clone, Debug)]
pub struct CylinderInstance {
    pub spec: CylinderSpec,
    pub n: u32,
    pub lattice: Lattice,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl CylinderInstance {
    pub fn lower(&self) -> &[usize] {
        self.lattice.gamma1()
    }

    pub fn upper(&self) -> &[usize] {
        self.lattice.gamma2()
    }

    /// Signed height of vertex `i` above `hyp(A)`.
    pub fn height(&self, i: usize) -> f64 {
        self.spec.height_of(&self.lattice.position(i))
    }
}

pub fn build_cylinder_instance(spec: &CylinderSpec, n: u32) -> Result<CylinderInstance> {
    if n == 0 {
        return Err(mesh("mesh parameter n must be at least 1"));
    }
    let d = spec.dim();
    let nf = n as f64;
    let corners = spec.vertices();
    let kmin: Vec<i64> = (0..d)
        .map(|i| {
            let lo = corners.iter().map(|c| c[i]).fold(f64::INFINITY, f64::min);
            (lo * nf - 1e-6).floor() as i64
        })
        .collect();
    let kmax: Vec<i64> = (0..d)
        .map(|i| {
            let hi = corners.iter().map(|c| c[i]).fold(f64::NEG_INFINITY, f64::max);
            (hi * nf + 1e-6).ceil() as i64
        })
        .collect();

    let to_pos = |k: &[i64]| -> Vec<f64> { k.iter().map(|&c| c as f64 / nf).collect() };
    let mut points = Vec::new();
    let mut k = kmin.clone();
    'scan: loop {
        if spec.contains(&to_pos(&k)) {
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
    let too_thin = || mesh("cylinder too thin for mesh");
    if points.is_empty() {
        return Err(too_thin());
    }
    let mut lattice = Lattice::from_vertices(d, n, points);

    let mut gamma = Vec::new();
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    let (mut top, mut bottom) = (Vec::new(), Vec::new());
    for i in 0..lattice.num_vertices() {
        let k = lattice.vertex(i).to_vec();
        let x = to_pos(&k);
        let mut outside = false;
        let (mut hits_top, mut hits_bottom) = (false, false);
        let mut probe = k.clone();
        for axis in 0..d {
            for step in [-1i64, 1] {
                probe[axis] += step;
                let y = to_pos(&probe);
                if !spec.contains(&y) {
                    outside = true;
                    hits_top |= spec.segment_meets_face(&x, &y, Face::Top);
                    hits_bottom |= spec.segment_meets_face(&x, &y, Face::Bottom);
                }
                probe[axis] -= step;
            }
        }
        if !outside {
            continue;
        }
        gamma.push(i);
        let h = spec.height_of(&x);
        if h < -GEOM_TOL {
            lower.push(i);
        } else if h > GEOM_TOL {
            upper.push(i);
        }
        if hits_top {
            top.push(i);
        }
        if hits_bottom {
            bottom.push(i);
        }
    }
    if lower.is_empty() || upper.is_empty() || top.is_empty() || bottom.is_empty() {
        return Err(too_thin());
    }
    if top.iter().any(|v| bottom.binary_search(v).is_ok()) {
        return Err(too_thin());
    }
    lattice.set_marks(gamma, lower, upper);
    Ok(CylinderInstance {
        spec: spec.clone(),
        n,
        lattice,
        top,
        bottom,
    })
}

/// `τ(A, h) = φ(A_1^h → A_2^h in cyl(A, h))`.
pub fn tau(inst: &CylinderInstance, caps: &CapacityAssignment) -> Result<Fixed> {
    Ok(max_flow(&inst.lattice, caps, inst.lower(), inst.upper())?.value)
}

/// `φ(A, h) = φ(B(A, h) → T(A, h) in cyl(A, h))`.
pub fn phi_cyl(inst: &CylinderInstance, caps: &CapacityAssignment) -> Result<Fixed> {
    Ok(max_flow(&inst.lattice, caps, &inst.bottom, &inst.top)?.value)
}

/// Edges joining a vertex strictly below `hyp(A)` to one on or above it.
pub fn flat_cut_edges(inst: &CylinderInstance) -> Vec<usize> {
    let below: Vec<bool> = (0..inst.lattice.num_vertices())
        .map(|i| inst.height(i) < -GEOM_TOL)
        .collect();
    inst.lattice
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| below[e.u] != below[e.v])
        .map(|(i, _)| i)
        .collect()
}

/// Monte-Carlo estimate of `ν(v)` from `τ` on cylinders of growing mesh.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuEstimate {
    pub direction: Vec<f64>,
    pub base_size: f64,
    pub half_height: f64,
    pub n_values: Vec<u32>,
    /// Per-mesh mean of `τ_n / (n^{d−1} H^{d−1}(A))`.
    pub estimates: Vec<f64>,
    pub std: Vec<f64>,
    pub ci95: Vec<f64>,
    pub seconds: Vec<f64>,
    pub trials: usize,
    pub law: CapacityLaw,
}

impl NuEstimate {
    /// The estimate at the finest mesh.
    pub fn point(&self) -> f64 {
        *self.estimates.last().expect("at least one mesh")
    }

    pub fn point_ci95(&self) -> f64 {
        *self.ci95.last().expect("at least one mesh")
    }

    pub fn point_std(&self) -> f64 {
        *self.std.last().expect("at least one mesh")
    }
}

/// Parameters of [`estimate_nu`]; `half_height` defaults to `base_size / 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuRequest {
    pub direction: Vec<f64>,
    pub law: CapacityLaw,
    pub base_size: f64,
    pub half_height: Option<f64>,
    pub n_values: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
}

/// Cylinder over a cube of side `base_size` centred at the origin.
pub fn nu_cylinder(direction: &[f64], base_size: f64, half_height: f64) -> Result<CylinderSpec> {
    let len = norm(direction);
    if !(len > GEOM_TOL) || direction.iter().any(|c| !c.is_finite()) {
        return Err(geometry("direction must be a nonzero finite vector"));
    }
    let v: Vec<f64> = direction.iter().map(|c| c / len).collect();
    CylinderSpec::centered(&v, base_size, half_height)
}

/// `τ` for `trials` independent capacity fields; trial `t` uses seed `seed ⊕ t`.
pub fn tau_samples(
    inst: &CylinderInstance,
    law: &CapacityLaw,
    trials: usize,
    seed: u64,
) -> Result<Vec<Fixed>> {
    (0..trials)
        .into_par_iter()
        .map(|t| tau(inst, &sample(law, &inst.lattice, seed ^ t as u64)))
        .collect()
}

pub fn estimate_nu(req: &NuRequest) -> Result<NuEstimate> {
    if req.trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if req.n_values.is_empty() || req.n_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("mesh list must be nonempty and nondecreasing".into()));
    }
    req.law.validate()?;
    let h = req.half_height.unwrap_or(req.base_size / 4.0);
    let spec = nu_cylinder(&req.direction, req.base_size, h)?;
    let d = spec.dim();
    let area = spec.base_measure();
    let mut out = NuEstimate {
        direction: spec.normal.clone(),
        base_size: req.base_size,
        half_height: h,
        n_values: req.n_values.clone(),
        estimates: Vec::new(),
        std: Vec::new(),
        ci95: Vec::new(),
        seconds: Vec::new(),
        trials: req.trials,
        law: req.law.clone(),
    };
    for &n in &req.n_values {
        let start = Instant::now();
        let inst = build_cylinder_instance(&spec, n)?;
        let norm_factor = (n as f64).powi(d as i32 - 1) * area;
        let values: Vec<f64> = tau_samples(&inst, &req.law, req.trials, req.seed)?
            .into_iter()
            .map(|t| fixed_to_f64(t) / norm_factor)
            .collect();
        let s = summarize(&values);
        out.estimates.push(s.mean);
        out.std.push(s.std);
        out.ci95.push(s.ci95);
        out.seconds.push(start.elapsed().as_secs_f64());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{sample_edges, CAP_SCALE};
    use crate::geometry::make_cylinder;

    fn flat_unit() -> CylinderSpec {
        make_cylinder(&[0.5, 0.0], &[vec![1.0, 0.0]], 1.0, &[0.0, 1.0]).unwrap()
    }

    fn positions(inst: &CylinderInstance, set: &[usize]) -> Vec<Vec<i64>> {
        set.iter().map(|&i| inst.lattice.vertex(i).to_vec()).collect()
    }

    #[test]
    fn top_and_bottom_at_n1() {
        let inst = build_cylinder_instance(&flat_unit(), 1).unwrap();
        assert_eq!(inst.lattice.num_vertices(), 6);
        assert_eq!(positions(&inst, &inst.bottom), vec![vec![0, -1], vec![1, -1]]);
        assert_eq!(positions(&inst, &inst.top), vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn half_boundaries_split_by_the_base_hyperplane() {
        let inst = build_cylinder_instance(&flat_unit(), 4).unwrap();
        for &i in inst.lower() {
            assert!(inst.height(i) < 0.0);
        }
        for &i in inst.upper() {
            assert!(inst.height(i) > 0.0);
        }
        let on_plane = inst
            .lattice
            .gamma()
            .iter()
            .filter(|&&i| inst.height(i).abs() < 1e-12)
            .count();
        assert_eq!(on_plane + inst.lower().len() + inst.upper().len(), inst.lattice.gamma().len());
        assert_eq!(inst.lower().len(), 11);
        assert_eq!(inst.upper().len(), 11);
    }

    #[test]
    fn thin_tilted_cylinder_is_rejected() {
        let s = 0.5f64.sqrt();
        let spec = make_cylinder(&[0.0, 0.0], &[vec![4.0, 4.0]], 0.1, &[-s, s]).unwrap();
        let err = build_cylinder_instance(&spec, 1).unwrap_err();
        assert!(err.to_string().contains("cylinder too thin for mesh"));
    }

    #[test]
    fn zero_and_scaled_capacities() {
        let inst = build_cylinder_instance(&flat_unit(), 4).unwrap();
        let m = inst.lattice.num_edges();
        let zero = CapacityAssignment::from_values(vec![0; m]);
        assert_eq!(tau(&inst, &zero).unwrap(), 0);
        assert_eq!(phi_cyl(&inst, &zero).unwrap(), 0);
        let one = CapacityAssignment::from_values(vec![CAP_SCALE; m]);
        let two = CapacityAssignment::from_values(vec![2 * CAP_SCALE; m]);
        assert_eq!(2 * tau(&inst, &one).unwrap(), tau(&inst, &two).unwrap());
        assert_eq!(2 * phi_cyl(&inst, &one).unwrap(), phi_cyl(&inst, &two).unwrap());
    }

    #[test]
    fn phi_below_flat_cut() {
        let inst = build_cylinder_instance(&flat_unit(), 6).unwrap();
        let flat = flat_cut_edges(&inst);
        assert!(crate::flow::min_cut_is_cutset(&inst.lattice, &flat, &inst.bottom, &inst.top));
        for seed in 0..5 {
            let caps = sample_edges(&CapacityLaw::Exponential { rate: 1.0 }, inst.lattice.num_edges(), seed);
            let bound = crate::flow::cut_capacity(&flat, &caps).unwrap();
            assert!(phi_cyl(&inst, &caps).unwrap() <= bound);
        }
    }

    #[test]
    fn reversing_the_normal_keeps_tau() {
        let up = flat_unit();
        let down = make_cylinder(&[0.5, 0.0], &[vec![1.0, 0.0]], 1.0, &[0.0, -1.0]).unwrap();
        let a = build_cylinder_instance(&up, 4).unwrap();
        let b = build_cylinder_instance(&down, 4).unwrap();
        let caps = CapacityAssignment::from_values(vec![CAP_SCALE; a.lattice.num_edges()]);
        assert_eq!(tau(&a, &caps).unwrap(), tau(&b, &caps).unwrap());
    }

    #[test]
    fn constant_law_estimates() {
        let req = NuRequest {
            direction: vec![0.0, 1.0],
            law: CapacityLaw::Constant { c: 1.0 },
            base_size: 4.0,
            half_height: None,
            n_values: vec![2, 4],
            trials: 3,
            seed: 9,
        };
        let est = estimate_nu(&req).unwrap();
        for (i, &n) in est.n_values.iter().enumerate() {
            let exact = (4.0 * n as f64 + 1.0) / (4.0 * n as f64);
            assert_eq!(est.estimates[i], exact);
            assert_eq!(est.std[i], 0.0);
        }
        assert_eq!(est.half_height, 1.0);
    }
}
