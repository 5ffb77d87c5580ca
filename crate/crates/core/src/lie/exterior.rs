//! Bases of `Λ^p` indexed by strictly increasing multi-indices in lexicographic order.

use std::collections::HashMap;

use itertools::Itertools;

use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn multi_indices(n: usize, p: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(p).collect()
}

pub fn index_map(n: usize, p: usize) -> HashMap<Vec<usize>, usize> {
    multi_indices(n, p)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect()
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// `Λ^p(a)`: entry `(I, J)` is the minor of `a` on rows `I`, columns `J`.
pub fn compound<S: Scalar>(a: &Matrix<S>, p: usize) -> Matrix<S> {
    let rows = multi_indices(a.rows(), p);
    let cols = multi_indices(a.cols(), p);
    Matrix::from_fn(rows.len(), cols.len(), |i, j| {
        if p == 0 {
            S::one()
        } else {
            linalg::det(&a.select_rows(&rows[i]).select_cols(&cols[j])).expect("square minor")
        }
    })
}

/// Interior product `i_v : Λ^p → Λ^{p−1}` in the dual basis.
pub fn interior<S: Scalar>(v: &[S], p: usize) -> Matrix<S> {
    let n = v.len();
    if p == 0 {
        return Matrix::zeros(0, 1);
    }
    let src = multi_indices(n, p);
    let dst = index_map(n, p - 1);
    let mut m = Matrix::<S>::zeros(binomial(n, p - 1), src.len());
    for (col, idx) in src.iter().enumerate() {
        for s in 0..p {
            let k = idx[s];
            if v[k].is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(s);
            let row = dst[&rest];
            let term = if s % 2 == 0 {
                v[k].clone()
            } else {
                -v[k].clone()
            };
            m[(row, col)] = m[(row, col)].clone() + term;
        }
    }
    m
}

/// Weight of each multi-index of degree `p` given per-vector weights.
pub fn weights(per_vector: &[u64], p: usize) -> Vec<u64> {
    multi_indices(per_vector.len(), p)
        .iter()
        .map(|idx| idx.iter().map(|&i| per_vector[i]).sum())
        .collect()
}
