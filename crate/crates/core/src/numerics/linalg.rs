//! Gaussian elimination over any `Scalar` field. Exact types ignore `tol`.

use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub rref: Matrix<S>,
    pub pivots: Vec<usize>,
}

pub fn rref<S: Scalar>(a: &Matrix<S>, tol: f64) -> Echelon<S> {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let thresh = tol * m.max_abs().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if S::EXACT {
            (r..rows).find(|&i| !m[(i, c)].is_zero())
        } else {
            (r..rows)
                .map(|i| (i, m[(i, c)].abs_f64()))
                .filter(|&(_, v)| v > thresh)
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(i, _)| i)
        };
        let Some(p) = pick else { continue };
        if p != r {
            for j in 0..cols {
                let t = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = t;
            }
        }
        let inv = S::one() / m[(r, c)].clone();
        for j in c..cols {
            m[(r, j)] = m[(r, j)].clone() * inv.clone();
        }
        let prow: Vec<S> = m.row(r).to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[(i, c)].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                if !prow[j].is_zero() {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * prow[j].clone();
                }
            }
            if !S::EXACT {
                m[(i, c)] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rref: m, pivots }
}

pub fn rank<S: Scalar>(a: &Matrix<S>, tol: f64) -> usize {
    rref(a, tol).pivots.len()
}

/// Columns form a basis of the right kernel.
pub fn nullspace<S: Scalar>(a: &Matrix<S>, tol: f64) -> Matrix<S> {
    let cols = a.cols();
    let e = rref(a, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !e.pivots.contains(c)).collect();
    let mut basis = Matrix::zeros(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = S::one();
        for (r, &p) in e.pivots.iter().enumerate() {
            basis[(p, k)] = -e.rref[(r, f)].clone();
        }
    }
    basis
}

/// Rows form a basis of the row space.
pub fn row_basis<S: Scalar>(a: &Matrix<S>, tol: f64) -> Matrix<S> {
    let e = rref(a, tol);
    e.rref.select_rows(&(0..e.pivots.len()).collect::<Vec<_>>())
}

/// Solve `a x = b` for square nonsingular `a`.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::mismatch(
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, b.cols()));
    }
    let aug = Matrix::hstack(&[a, b], n)?;
    let e = rref(&aug, tol);
    if e.pivots.len() < n || e.pivots[n - 1] >= n {
        return Err(Error::InvalidInput("singular matrix".into()));
    }
    Ok(e.rref.submatrix(0..n, n..n + b.cols()))
}

pub fn inverse<S: Scalar>(a: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
    solve(a, &Matrix::identity(a.rows()), tol)
}

pub fn det<S: Scalar>(a: &Matrix<S>) -> Result<S> {
    if !a.is_square() {
        return Err(Error::InvalidInput(
            "determinant of a non-square matrix".into(),
        ));
    }
    let mut m = a.clone();
    let n = m.rows();
    let mut d = S::one();
    for c in 0..n {
        let p = if S::EXACT {
            (c..n).find(|&i| !m[(i, c)].is_zero())
        } else {
            (c..n).max_by(|&x, &y| m[(x, c)].abs_f64().total_cmp(&m[(y, c)].abs_f64()))
        };
        let Some(p) = p.filter(|&p| !m[(p, c)].is_zero()) else {
            return Ok(S::zero());
        };
        if p != c {
            for j in 0..n {
                let t = m[(p, j)].clone();
                m[(p, j)] = m[(c, j)].clone();
                m[(c, j)] = t;
            }
            d = -d;
        }
        let piv = m[(c, c)].clone();
        d = d * piv.clone();
        for i in c + 1..n {
            let f = m[(i, c)].clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
            }
        }
    }
    Ok(d)
}

/// Express the columns of `x` in the column basis `basis` (least-squares free: exact
/// membership is assumed). Returns coefficients, one column per column of `x`.
pub fn coordinates<S: Scalar>(basis: &Matrix<S>, x: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
    let g = basis.adjoint().matmul(basis)?;
    let rhs = basis.adjoint().matmul(x)?;
    solve(&g, &rhs, tol)
}
