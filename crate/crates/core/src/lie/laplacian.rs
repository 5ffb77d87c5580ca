use crate::error::{Error, Result};
use crate::lie::algebra::NilpotentLieAlgebra;
use crate::lie::ce::ce_differential;
use crate::lie::exterior::{multi_indices, weights};
use crate::lie::grading::AdaptedGrading;
use crate::lie::symmetry::FiniteSymmetryGroup;
use crate::numerics::{sym_eig, Matrix};
use crate::scalar::Scalar;
use crate::spectrum::{SmallEigenvalueRule, SpectrumReport};

/// `d*d + dd*` on `Λ^p(𝔫*)` from differentials in an orthonormal basis.
pub fn hodge_laplacian<S: Scalar>(d_prev: Option<&Matrix<S>>, d_next: &Matrix<S>) -> Matrix<S> {
    let mut lap = d_next.adjoint().matmul(d_next).expect("shapes");
    if let Some(d) = d_prev {
        lap = &lap + &d.matmul(&d.adjoint()).expect("shapes");
    }
    lap
}

fn restrict<S: Scalar>(op: &Matrix<S>, basis: &Matrix<S>) -> Matrix<S> {
    &(&basis.adjoint() * op) * basis
}

/// `Δ^inv_p` on the `F`-invariant subspace, in its orthonormal basis.
pub fn invariant_laplacian<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    group: &FiniteSymmetryGroup<S>,
    p: usize,
    tol: f64,
) -> Result<Matrix<S>> {
    group.validate(alg, tol)?;
    let d_next = ce_differential(alg, p)?;
    let d_prev = if p == 0 {
        None
    } else {
        Some(ce_differential(alg, p - 1)?)
    };
    let lap = hodge_laplacian(d_prev.as_ref(), &d_next);
    Ok(restrict(&lap, &group.invariant_basis(p, tol)?))
}

/// Per-degree matrices `ε^{−N/2} d ε^{N/2}` in the adapted basis.
pub fn rescaled_differential<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    grading: &AdaptedGrading<S>,
    eps: f64,
) -> Result<Vec<Matrix<f64>>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ε must be positive, got {eps}"
        )));
    }
    let adapted = if grading.is_standard_basis() {
        alg.clone()
    } else {
        alg.change_basis(&grading.basis, 1e-12)?
    };
    let w = grading.vector_weights();
    let n = alg.dim();
    (0..=n)
        .map(|p| {
            let d = ce_differential(&adapted, p)?.to_f64();
            let wi = weights(&w, p);
            let wj = weights(&w, p + 1);
            Ok(Matrix::from_fn(d.rows(), d.cols(), |r, c| {
                let v = d[(r, c)];
                if v == 0.0 {
                    0.0
                } else {
                    v * eps.powf((wi[c] as f64 - wj[r] as f64) / 2.0)
                }
            }))
        })
        .collect()
}

/// Spectrum of the Laplacian of the rescaled differential on the `F`-invariant subspace.
pub fn rescaled_spectrum<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    grading: &AdaptedGrading<S>,
    group: &FiniteSymmetryGroup<S>,
    p: usize,
    eps: f64,
    rule: &SmallEigenvalueRule,
) -> Result<SpectrumReport> {
    let n = alg.dim();
    if p > n {
        return Err(Error::InvalidInput(format!(
            "degree {p} exceeds dimension {n}"
        )));
    }
    let ds = rescaled_differential(alg, grading, eps)?;
    let lap = hodge_laplacian(if p == 0 { None } else { Some(&ds[p - 1]) }, &ds[p]);
    // the group acts in the original basis; move it to the adapted one
    let f64_group = FiniteSymmetryGroup {
        elements: group
            .elements
            .iter()
            .map(|g| {
                let b = grading.basis.to_f64();
                &(&b.transpose() * &g.to_f64()) * &b
            })
            .collect(),
    };
    let basis = f64_group.invariant_basis(p, 1e-10)?;
    let lap = restrict(&lap, &basis);
    let vals = if lap.rows() == 0 {
        Vec::new()
    } else {
        sym_eig(&lap, 1e-10)?.eigenvalues
    };
    Ok(SpectrumReport::new(p, vals, true, rule))
}

/// Dimension of `Λ^p(𝔫*)^F`.
pub fn invariant_dim<S: Scalar>(
    group: &FiniteSymmetryGroup<S>,
    n: usize,
    p: usize,
    tol: f64,
) -> Result<usize> {
    if group.order() == 1 {
        return Ok(multi_indices(n, p).len());
    }
    Ok(group.invariant_basis(p, tol)?.cols())
}
