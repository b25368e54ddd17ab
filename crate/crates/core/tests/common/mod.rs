#![allow(dead_code)]

use percoflow::capacity::Fixed;
use percoflow::lattice::Lattice;

/// Minimum over every source side `S` with `F1 ⊆ S` and `S ∩ F2 = ∅` of the
/// capacity of the edges leaving `S`. Walks the free vertices in Gray-code
/// order so each step flips one vertex.
pub fn brute_force_min_cut(lat: &Lattice, caps: &[Fixed], f1: &[usize], f2: &[usize]) -> Fixed {
    let nv = lat.num_vertices();
    let mut side = vec![false; nv];
    let mut fixed = vec![false; nv];
    for &v in f1 {
        side[v] = true;
        fixed[v] = true;
    }
    for &v in f2 {
        fixed[v] = true;
    }
    let free: Vec<usize> = (0..nv).filter(|&v| !fixed[v]).collect();
    assert!(free.len() <= 30, "too many free vertices for enumeration");
    let adj = lat.adjacency();
    let mut value: Fixed = lat
        .edges()
        .iter()
        .zip(caps)
        .filter(|(e, _)| side[e.u] != side[e.v])
        .map(|(_, &t)| t)
        .sum();
    let mut best = value;
    for i in 1u64..(1u64 << free.len()) {
        let v = free[i.trailing_zeros() as usize];
        for &(w, e) in &adj[v] {
            if side[w] == side[v] {
                value += caps[e];
            } else {
                value -= caps[e];
            }
        }
        side[v] = !side[v];
        best = best.min(value);
    }
    best
}

/// `cols × rows` unit grid at mesh 1.
pub fn grid(cols: i64, rows: i64) -> Lattice {
    let pts = (0..cols)
        .flat_map(|x| (0..rows).map(move |y| vec![x, y]))
        .collect();
    Lattice::from_vertices(2, 1, pts)
}

pub fn column(lat: &Lattice, x: i64, rows: i64) -> Vec<usize> {
    (0..rows).map(|y| lat.index_of(&[x, y]).unwrap()).collect()
}
