use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::eigen::{self, Real};
use crate::numerics::linalg;
use crate::numerics::matrix::Matrix;
use crate::scalar::Scalar;

/// Row-compressed sparse matrix with sorted column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    ncols: usize,
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); nrows];
        for (i, j, v) in entries {
            assert!(
                i < nrows && j < ncols,
                "triplet ({i},{j}) outside {nrows}x{ncols}"
            );
            let slot = acc[i].entry(j).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        SparseMatrix {
            ncols,
            rows: acc
                .into_iter()
                .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn from_dense(m: &Matrix<S>) -> Self {
        Self::from_triplets(
            m.rows(),
            m.cols(),
            (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, m[(i, j)].clone())),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.nrows(), self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v.clone();
        }
        m
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(
            self.nrows(),
            self.ncols,
            self.triplets().map(|(i, j, v)| (i, j, f(v))),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows(),
            self.triplets().map(|(i, j, v)| (j, i, v.clone())),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows(),
            self.triplets().map(|(i, j, v)| (j, i, v.conj())),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_triplets(
            self.nrows(),
            self.ncols,
            self.triplets()
                .map(|(i, j, v)| (i, j, v.clone() * s.clone())),
        )
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.nrows() != other.nrows() || self.ncols != other.ncols {
            return Err(Error::mismatch(
                format!("{}x{}", self.nrows(), self.ncols),
                format!("{}x{}", other.nrows(), other.ncols),
            ));
        }
        Ok(Self::from_triplets(
            self.nrows(),
            self.ncols,
            self.triplets()
                .chain(other.triplets())
                .map(|(i, j, v)| (i, j, v.clone())),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-S::one()))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows() {
            return Err(Error::mismatch(
                format!("{} rows", self.ncols),
                format!("{} rows", other.nrows()),
            ));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.rows[*k] {
                        let slot = acc.entry(*j).or_insert_with(S::zero);
                        *slot = slot.clone() + a.clone() * b.clone();
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(SparseMatrix {
            ncols: other.ncols,
            rows,
        })
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .fold(S::zero(), |acc, (j, a)| acc + a.clone() * v[*j].clone())
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets()
            .map(|(_, _, v)| v.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Dense `AᴴA`.
    pub fn gram(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.ncols, self.ncols);
        self.add_gram_into(&mut out);
        out
    }

    pub fn add_gram_into(&self, out: &mut Matrix<S>) {
        for r in &self.rows {
            for (i, a) in r {
                let ca = a.conj();
                for (j, b) in r {
                    out[(*i, *j)] = out[(*i, *j)].clone() + ca.clone() * b.clone();
                }
            }
        }
    }
}

/// Block-diagonal matrix, used for mass matrices with one small block per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonal<S> {
    pub blocks: Vec<Matrix<S>>,
}

impl<S: Scalar> BlockDiagonal<S> {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Matrix::rows).sum()
    }

    pub fn concat(parts: Vec<Self>) -> Self {
        BlockDiagonal {
            blocks: parts.into_iter().flat_map(|p| p.blocks).collect(),
        }
    }

    pub fn to_sparse(&self) -> SparseMatrix<S> {
        let n = self.dim();
        let mut trip = Vec::new();
        let mut off = 0;
        for b in &self.blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    trip.push((off + i, off + j, b[(i, j)].clone()));
                }
            }
            off += b.rows();
        }
        SparseMatrix::from_triplets(n, n, trip)
    }

    pub fn to_dense(&self) -> Matrix<S> {
        Matrix::block_diag(&self.blocks)
    }

    pub fn map_blocks(&self, f: impl Fn(&Matrix<S>) -> Result<Matrix<S>>) -> Result<Self> {
        Ok(BlockDiagonal {
            blocks: self.blocks.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.map_blocks(|b| linalg::inverse(b, 1e-14))
    }

    pub fn transpose(&self) -> Self {
        BlockDiagonal {
            blocks: self.blocks.iter().map(Matrix::transpose).collect(),
        }
    }
}

impl<T: Real> BlockDiagonal<T> {
    /// Blockwise Cholesky factor `L` with `L Lᵀ = self`.
    pub fn cholesky(&self) -> Result<Self> {
        self.map_blocks(eigen::cholesky)
    }
}
