//! Exact Gaussian elimination over a [`ScalarField`].
//!
//! All solvers operate on dense row-major matrices of [`Scalar`] values and
//! never approximate: pivots are exact field inverses. Free variables are
//! always resolved to zero in column order, so particular solutions are
//! deterministic and lexicographically minimal in the variable order chosen
//! by the caller.

use crate::scalars::{Scalar, ScalarField};

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns in ascending order.
pub fn rref(field: &ScalarField, rows: &mut [Vec<Scalar>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(&rows[r][c]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = field.mul(&inv, x);
        }
        for i in 0..nrows {
            if i != r && !field.is_zero(&rows[i][c]) {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let t = field.mul(&f, &rows[r][j]);
                    rows[i][j] = field.sub(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &ScalarField, mut rows: Vec<Vec<Scalar>>) -> usize {
    rref(field, &mut rows).len()
}

/// Outcome of an affine solve `A x = b`.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    /// Particular solution with all free variables set to zero.
    pub particular: Vec<Scalar>,
    /// Dimension of the homogeneous solution space.
    pub kernel_dim: usize,
}

/// Solves `A x = b`; `None` when inconsistent.
pub fn solve_affine(
    field: &ScalarField,
    a: &[Vec<Scalar>],
    b: &[Scalar],
) -> Option<AffineSolution> {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return Some(AffineSolution {
            particular: Vec::new(),
            kernel_dim: 0,
        });
    }
    let ncols = a[0].len();
    let mut rows: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(field, &mut rows);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut particular = vec![field.zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = rows[i][ncols].clone();
    }
    Some(AffineSolution {
        kernel_dim: ncols - pivots.len(),
        particular,
    })
}

/// Basis of the kernel of `A` (one vector per free column).
pub fn kernel_basis(field: &ScalarField, a: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if a.is_empty() {
        return Vec::new();
    }
    let ncols = a[0].len();
    let mut rows = a.to_vec();
    let pivots = rref(field, &mut rows);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = field.neg(&rows[i][free]);
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix given as rows; `None` when singular.
pub fn invert(field: &ScalarField, a: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = a.len();
    let mut rows: Vec<Vec<Scalar>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "invert expects a square matrix");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { field.one() } else { field.zero() });
            }
            r
        })
        .collect();
    let pivots = rref(field, &mut rows);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}
