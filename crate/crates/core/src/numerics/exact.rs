use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::linalg;
use crate::numerics::matrix::Matrix;

pub type RationalMatrix = Matrix<BigRational>;

/// Clear denominators row by row.
fn integer_rows(a: &RationalMatrix) -> Vec<Vec<BigInt>> {
    (0..a.rows())
        .map(|i| {
            let row = a.row(i);
            let l = row.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
        })
        .filter(|r: &Vec<BigInt>| r.iter().any(|v| !v.is_zero()))
        .collect()
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rank_exact(a: &RationalMatrix) -> usize {
    let mut m = integer_rows(a);
    let rows = m.len();
    let cols = a.cols();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

pub fn nullspace_exact(a: &RationalMatrix) -> RationalMatrix {
    linalg::nullspace(a, 0.0)
}

/// dim(ker N) − dim(ker N ∩ rowspace G); the rows of `generators` span the
/// subspace being quotiented out.
pub fn quotient_dim(constraints: &RationalMatrix, generators: &RationalMatrix) -> Result<usize> {
    if constraints.cols() != generators.cols() {
        return Err(Error::mismatch(
            format!("{} columns", constraints.cols()),
            format!("{} columns", generators.cols()),
        ));
    }
    let ker = constraints.cols() - rank_exact(constraints);
    let rg = rank_exact(generators);
    let inter = rg - rank_exact(&constraints.matmul(&generators.transpose())?);
    Ok(ker - inter)
}
