use crate::error::{Error, Result};
use crate::lie::algebra::NilpotentLieAlgebra;
use crate::lie::exterior::{binomial, index_map, multi_indices, sort_with_sign};
use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;

/// Matrix of `d : Λ^p(𝔫*) → Λ^{p+1}(𝔫*)` from `dτ^k = −Σ_{i<j} c^k_ij τ^i∧τ^j`.
pub fn ce_differential<S: Scalar>(alg: &NilpotentLieAlgebra<S>, p: usize) -> Result<Matrix<S>> {
    let n = alg.dim();
    if p > n {
        return Err(Error::InvalidInput(format!(
            "degree {p} exceeds dimension {n}"
        )));
    }
    let src = multi_indices(n, p);
    let dst = index_map(n, p + 1);
    let mut d = Matrix::<S>::zeros(binomial(n, p + 1), src.len());
    for (col, idx) in src.iter().enumerate() {
        for s in 0..p {
            let k = idx[s];
            for i in 0..n {
                for j in i + 1..n {
                    let c = alg.c(i, j, k);
                    if c.is_zero() {
                        continue;
                    }
                    let mut seq = Vec::with_capacity(p + 1);
                    seq.extend_from_slice(&idx[..s]);
                    seq.push(i);
                    seq.push(j);
                    seq.extend_from_slice(&idx[s + 1..]);
                    let Some(sign) = sort_with_sign(&mut seq) else {
                        continue;
                    };
                    let sign = if s % 2 == 0 { -sign } else { sign };
                    let row = dst[&seq];
                    d[(row, col)] = d[(row, col)].clone() + S::from_i64(sign) * c.clone();
                }
            }
        }
    }
    Ok(d)
}

/// All differentials `d_0 .. d_n`; `d_n` maps into the zero space.
pub fn ce_complex<S: Scalar>(alg: &NilpotentLieAlgebra<S>) -> Vec<Matrix<S>> {
    (0..=alg.dim())
        .map(|p| ce_differential(alg, p).expect("degree in range"))
        .collect()
}

/// Betti numbers of a cochain complex given its differentials `d_p : C^p → C^{p+1}`.
pub fn complex_betti<S: Scalar>(ds: &[Matrix<S>], tol: f64) -> Vec<usize> {
    let ranks: Vec<usize> = ds.iter().map(|d| linalg::rank(d, tol)).collect();
    (0..ds.len())
        .map(|p| {
            let prev = if p == 0 { 0 } else { ranks[p - 1] };
            ds[p].cols() - ranks[p] - prev
        })
        .collect()
}

/// `b_p` of Chevalley–Eilenberg cohomology.
pub fn betti<S: Scalar>(alg: &NilpotentLieAlgebra<S>, tol: f64) -> Vec<usize> {
    complex_betti(&ce_complex(alg), tol)
}
