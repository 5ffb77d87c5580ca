use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::algebra::{center, lower_central_series, NilpotentLieAlgebra};
use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;

/// Filtration `𝔫_[k] = 𝔫'_[k] + 𝔠(𝔫)` with an adapted orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedGrading<S> {
    /// Columns: adapted basis in the original coordinates, grouped by level.
    pub basis: Matrix<S>,
    /// Level `k(i)` of each adapted basis vector; nondecreasing.
    pub levels: Vec<usize>,
    /// `dim 𝔯_[k]` for `k = 0..=S`.
    pub pieces: Vec<usize>,
    /// Number-operator weight `3^k` per piece.
    pub weights: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradingSummary {
    pub pieces: Vec<usize>,
    pub weights: Vec<u64>,
    pub levels: Vec<usize>,
}

impl<S: Scalar> AdaptedGrading<S> {
    pub fn step(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Weight `3^{k(i)}` of each adapted basis vector.
    pub fn vector_weights(&self) -> Vec<u64> {
        self.levels.iter().map(|&k| self.weights[k]).collect()
    }

    pub fn is_standard_basis(&self) -> bool {
        self.basis == Matrix::identity(self.basis.rows())
    }

    pub fn summary(&self) -> GradingSummary {
        GradingSummary {
            pieces: self.pieces.clone(),
            weights: self.weights.clone(),
            levels: self.levels.clone(),
        }
    }
}

fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter()
        .zip(y)
        .fold(S::zero(), |a, (p, q)| a + p.conj() * q.clone())
}

/// Extend the orthonormal set `ortho` to span the rows of `space`, preferring
/// standard basis vectors so coordinate filtrations give the identity basis.
fn extend_orthonormal<S: Scalar>(
    ortho: &mut Vec<Vec<S>>,
    space: &Matrix<S>,
    tol: f64,
) -> Result<usize> {
    let n = space.cols();
    let target = space.rows();
    let mut added = 0;
    let in_space = |v: &[S]| {
        let stacked = Matrix::vstack(&[space, &Matrix::from_rows(&[v.to_vec()]).expect("row")], n)
            .expect("cols");
        linalg::rank(&stacked, tol) == target
    };
    let mut candidates: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); n];
            e[i] = S::one();
            e
        })
        .filter(|e| in_space(e))
        .collect();
    candidates.extend((0..space.rows()).map(|r| space.row(r).to_vec()));
    for cand in candidates {
        if ortho.len() >= target {
            break;
        }
        let mut v = cand;
        for u in ortho.iter() {
            let c = dot(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x = x.clone() - c.clone() * y.clone();
            }
        }
        let norm2 = dot(&v, &v);
        if norm2.is_negligible(tol) {
            continue;
        }
        let norm = norm2.sqrt_exact().ok_or_else(|| {
            Error::InvalidInput(
                "adapted orthonormal basis needs an irrational square root; use floating point"
                    .into(),
            )
        })?;
        ortho.push(v.into_iter().map(|x| x / norm.clone()).collect());
        added += 1;
    }
    Ok(added)
}

pub fn lower_central_grading<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    tol: f64,
) -> Result<AdaptedGrading<S>> {
    let n = alg.dim();
    let (series, nilpotent) = lower_central_series(alg, tol);
    if !nilpotent {
        return Err(Error::NotNilpotent);
    }
    // series = [𝔫'_0, …, 𝔫'_S, 0]
    let s = series.len() - 2;
    let z = center(alg, tol);
    let filtration: Vec<Matrix<S>> = series[..=s]
        .iter()
        .map(|l| linalg::row_basis(&Matrix::vstack(&[l, &z], n).expect("cols"), tol))
        .collect();
    let mut ortho: Vec<Vec<S>> = Vec::new();
    let mut counts = vec![0; s + 1];
    for k in (0..=s).rev() {
        counts[k] = extend_orthonormal(&mut ortho, &filtration[k], tol)?;
    }
    if ortho.len() != n {
        return Err(Error::InternalConsistency(
            "adapted basis is incomplete".into(),
        ));
    }
    // ortho is ordered deepest level first; reorder to level 0 first
    let mut cols: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut levels = Vec::with_capacity(n);
    // start index in `ortho` of level k
    let mut start = vec![0; s + 1];
    let mut acc = 0;
    for k in (0..=s).rev() {
        start[k] = acc;
        acc += counts[k];
    }
    for k in 0..=s {
        for v in &ortho[start[k]..start[k] + counts[k]] {
            cols.push(v.clone());
            levels.push(k);
        }
    }
    let basis = Matrix::from_rows(&cols)?.transpose();
    let weights = (0..=s as u32).map(|k| 3u64.pow(k)).collect();
    Ok(AdaptedGrading {
        basis,
        levels,
        pieces: counts,
        weights,
    })
}
