use crate::error::{Error, Result};
use crate::lie::algebra::NilpotentLieAlgebra;
use crate::lie::exterior::compound;
use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;

/// Finite group of orthogonal automorphisms acting on `𝔫` (matrices act on coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSymmetryGroup<S> {
    pub elements: Vec<Matrix<S>>,
}

fn close_enough<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: f64) -> bool {
    a.shape() == b.shape()
        && a.data()
            .iter()
            .zip(b.data())
            .all(|(x, y)| (x.clone() - y.clone()).is_negligible(tol))
}

impl<S: Scalar> FiniteSymmetryGroup<S> {
    pub fn trivial(n: usize) -> Self {
        FiniteSymmetryGroup {
            elements: vec![Matrix::identity(n)],
        }
    }

    /// Closure of `generators` under multiplication.
    pub fn generated_by(n: usize, generators: &[Matrix<S>], tol: f64) -> Result<Self> {
        let mut elements = vec![Matrix::identity(n)];
        let mut frontier = elements.clone();
        while let Some(g) = frontier.pop() {
            for h in generators {
                let gh = g.matmul(h)?;
                if !elements.iter().any(|e| close_enough(e, &gh, tol)) {
                    if elements.len() > 10_000 {
                        return Err(Error::InvalidInput("generated group is not finite".into()));
                    }
                    elements.push(gh.clone());
                    frontier.push(gh);
                }
            }
        }
        Ok(FiniteSymmetryGroup { elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Checks identity, closure, inverses, orthogonality, and that every element preserves the bracket.
    pub fn validate(&self, alg: &NilpotentLieAlgebra<S>, tol: f64) -> Result<()> {
        let n = alg.dim();
        let id = Matrix::identity(n);
        if self.elements.iter().any(|g| g.shape() != (n, n)) {
            return Err(Error::InvalidInput(format!(
                "group elements must be {n}x{n}"
            )));
        }
        if !self.elements.iter().any(|g| close_enough(g, &id, tol)) {
            return Err(Error::InvalidInput("group lacks the identity".into()));
        }
        for (idx, g) in self.elements.iter().enumerate() {
            if !close_enough(&g.transpose().matmul(g)?, &id, tol) {
                return Err(Error::InvalidInput(format!(
                    "element {idx} is not orthogonal"
                )));
            }
            if !self
                .elements
                .iter()
                .any(|h| close_enough(h, &g.transpose(), tol))
            {
                return Err(Error::InvalidInput(format!(
                    "inverse of element {idx} is missing"
                )));
            }
            for h in &self.elements {
                let gh = g.matmul(h)?;
                if !self.elements.iter().any(|e| close_enough(e, &gh, tol)) {
                    return Err(Error::InvalidInput(
                        "group is not closed under products".into(),
                    ));
                }
            }
            if !is_automorphism(alg, g, tol)? {
                return Err(Error::InvalidInput(format!(
                    "element {idx} is not a Lie algebra automorphism"
                )));
            }
        }
        Ok(())
    }

    /// Group average of the induced action `Λ^p(gᵀ)` on `Λ^p(𝔫*)`.
    pub fn averaging_projector(&self, p: usize) -> Matrix<S> {
        let mut acc: Option<Matrix<S>> = None;
        for g in &self.elements {
            let c = compound(&g.transpose(), p);
            acc = Some(match acc {
                None => c,
                Some(a) => &a + &c,
            });
        }
        let acc = acc.expect("group is nonempty");
        acc.scale(&(S::one() / S::from_i64(self.order() as i64)))
    }

    /// Orthonormal basis (columns) of the invariant subspace of `Λ^p(𝔫*)`.
    pub fn invariant_basis(&self, p: usize, tol: f64) -> Result<Matrix<S>> {
        let proj = self.averaging_projector(p);
        let n = proj.rows();
        let fixed = linalg::nullspace(&(&proj - &Matrix::identity(n)), tol);
        orthonormalize_columns(&fixed, tol)
    }
}

/// `[g x, g y] = g [x, y]` on basis vectors.
pub fn is_automorphism<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    g: &Matrix<S>,
    tol: f64,
) -> Result<bool> {
    let n = alg.dim();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = alg.bracket(&g.col(i), &g.col(j));
            let mut e = vec![S::zero(); n];
            for (k, slot) in e.iter_mut().enumerate() {
                *slot = alg.c(i, j, k).clone();
            }
            let rhs = g.matvec(&e);
            if lhs
                .iter()
                .zip(&rhs)
                .any(|(a, b)| !(a.clone() - b.clone()).is_negligible(tol))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Gram–Schmidt on columns; exact types require rational norms.
pub fn orthonormalize_columns<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
    let mut cols: Vec<Vec<S>> = Vec::new();
    for j in 0..m.cols() {
        let mut v = m.col(j);
        for u in &cols {
            let c = u
                .iter()
                .zip(&v)
                .fold(S::zero(), |a, (x, y)| a + x.conj() * y.clone());
            for (x, y) in v.iter_mut().zip(u) {
                *x = x.clone() - c.clone() * y.clone();
            }
        }
        let n2 = v.iter().fold(S::zero(), |a, x| a + x.conj() * x.clone());
        if n2.is_negligible(tol) {
            continue;
        }
        let norm = n2.sqrt_exact().ok_or_else(|| {
            Error::InvalidInput(
                "orthonormal basis needs an irrational square root; use floating point".into(),
            )
        })?;
        cols.push(v.into_iter().map(|x| x / norm.clone()).collect());
    }
    if cols.is_empty() {
        return Ok(Matrix::zeros(m.rows(), 0));
    }
    Ok(Matrix::from_rows(&cols)?.transpose())
}
