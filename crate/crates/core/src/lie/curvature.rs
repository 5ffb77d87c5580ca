use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::algebra::NilpotentLieAlgebra;
use crate::scalar::Scalar;

/// Dense `n×n×…` array indexed by a fixed number of axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    n: usize,
    rank: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    fn zeros(n: usize, rank: usize) -> Self {
        Tensor {
            n,
            rank,
            data: vec![S::zero(); n.pow(rank as u32)],
        }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
}

/// `ω^i_jk = −½(c^i_jk − c^j_ik − c^k_ij)`, indexed `[i, j, k]`.
pub fn connection_coeffs<S: Scalar>(alg: &NilpotentLieAlgebra<S>) -> Tensor<S> {
    let n = alg.dim();
    let half = S::one() / S::from_i64(2);
    let mut w = Tensor::zeros(n, 3);
    for (i, j, k) in alg.triples() {
        // c^i_jk is the coefficient of e_i in [e_j, e_k]
        let v = alg.c(j, k, i).clone() - alg.c(i, k, j).clone() - alg.c(i, j, k).clone();
        w.set(&[i, j, k], -(half.clone() * v));
    }
    w
}

/// `R^i_jkl` for constant connection coefficients, indexed `[i, j, k, l]`.
pub fn riemann_tensor<S: Scalar>(alg: &NilpotentLieAlgebra<S>) -> Tensor<S> {
    let n = alg.dim();
    let w = connection_coeffs(alg);
    let mut r = Tensor::zeros(n, 4);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = S::zero();
                    for m in 0..n {
                        s = s - w.get(&[i, j, m]).clone() * w.get(&[m, l, k]).clone()
                            + w.get(&[i, j, m]).clone() * w.get(&[m, k, l]).clone()
                            + w.get(&[i, m, k]).clone() * w.get(&[m, j, l]).clone()
                            - w.get(&[i, m, l]).clone() * w.get(&[m, j, k]).clone();
                    }
                    r.set(&[i, j, k, l], s);
                }
            }
        }
    }
    r
}

/// Sectional curvature of the coordinate plane `(i, j)`: `R^i_jij`.
pub fn sectional_curvature<S: Scalar>(r: &Tensor<S>, i: usize, j: usize) -> S {
    r.get(&[i, j, i, j]).clone()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarCurvature {
    pub from_tensor: f64,
    pub from_structure_constants: f64,
}

impl ScalarCurvature {
    pub fn value(&self) -> f64 {
        self.from_tensor
    }
}

/// Exact scalar curvature by both routes: trace of `R`, and `−¼ Σ (c^i_jk)²`.
pub fn scalar_curvature_exact<S: Scalar>(alg: &NilpotentLieAlgebra<S>) -> (S, S) {
    let n = alg.dim();
    let r = riemann_tensor(alg);
    let mut kappa = S::zero();
    for i in 0..n {
        for j in 0..n {
            kappa = kappa + r.get(&[i, j, i, j]).clone();
        }
    }
    let quarter = S::one() / S::from_i64(4);
    (kappa, -(quarter * alg.structure_norm_sq()))
}

pub fn scalar_curvature<S: Scalar>(alg: &NilpotentLieAlgebra<S>) -> Result<ScalarCurvature> {
    let (a, b) = scalar_curvature_exact(alg);
    let out = ScalarCurvature {
        from_tensor: a.as_f64(),
        from_structure_constants: b.as_f64(),
    };
    if (out.from_tensor - out.from_structure_constants).abs() > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "scalar curvature routes disagree: {} vs {}",
            out.from_tensor, out.from_structure_constants
        )));
    }
    Ok(out)
}
