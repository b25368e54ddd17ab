//! Small dense linear algebra used by the polytope routines.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Solves the square system `rows · x = rhs`, rejecting ill-conditioned systems.
///
/// Rows are expected to be roughly unit length; the determinant is compared
/// against the Hadamard bound to detect near-singular combinations.
pub fn solve_square(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    let hadamard: f64 = rows.iter().map(|r| norm(r)).product();
    if hadamard == 0.0 {
        return None;
    }
    let lu = m.lu();
    if lu.determinant().abs() < 1e-10 * hadamard {
        return None;
    }
    let b = DVector::from_column_slice(rhs);
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

/// Least-norm correction projecting `x` onto `{y : rows · y = rhs}`.
pub fn project_affine(x: &[f64], rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return Some(x.to_vec());
    }
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|ri| rows.iter().map(|rj| dot(ri, rj)).collect())
        .collect();
    let resid: Vec<f64> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| dot(r, x) - b)
        .collect();
    let gram_refs: Vec<&[f64]> = gram.iter().map(|r| r.as_slice()).collect();
    let lambda = solve_square(&gram_refs, &resid)?;
    let mut y = x.to_vec();
    for (r, l) in rows.iter().zip(&lambda) {
        for (yi, ri) in y.iter_mut().zip(r.iter()) {
            *yi -= l * ri;
        }
    }
    Some(y)
}

/// Orthonormal basis of the orthogonal complement of `span(rows)` in R^dim.
pub fn orthonormal_complement(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut span: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        if let Some(q) = orthogonalize(r, &span) {
            span.push(q);
        }
    }
    let mut complement = Vec::new();
    for j in 0..dim {
        if span.len() + complement.len() == dim {
            break;
        }
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let mut basis = span.clone();
        basis.extend(complement.iter().cloned());
        if let Some(q) = orthogonalize(&e, &basis) {
            complement.push(q);
        }
    }
    complement
}

fn orthogonalize(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(&w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    let nw = norm(&w);
    if nw < 1e-6 * norm(v).max(1.0) {
        return None;
    }
    Some(scale(&w, 1.0 / nw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_diagonal_in_plane() {
        let c = orthonormal_complement(&[vec![1.0, 1.0]], 2);
        assert_eq!(c.len(), 1);
        assert!(dot(&c[0], &[1.0, 1.0]).abs() < 1e-12);
        assert!((norm(&c[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_rejected() {
        let r1 = [1.0, 0.0];
        let r2 = [1.0, 0.0];
        assert!(solve_square(&[&r1, &r2], &[1.0, 2.0]).is_none());
        let r3 = [0.0, 1.0];
        assert_eq!(solve_square(&[&r1, &r3], &[2.0, 3.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn projection_onto_line() {
        let r = [0.0, 1.0];
        let y = project_affine(&[0.3, 2.0], &[&r], &[1.0]).unwrap();
        assert!((y[0] - 0.3).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
    }
}
