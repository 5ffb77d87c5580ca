use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigen, BlockDiagonal, Matrix, SparseMatrix};
use crate::scalar::Scalar;
use crate::spectrum::{SmallEigenvalueRule, SpectrumReport};
use crate::superconnection::base::{BaseKind, Grid};
use crate::superconnection::bundle::Superconnection;
use crate::superconnection::cochain::{total_differentials, CochainLayout};
use crate::superconnection::metric::{MetricField, PreparedMetric};

/// Dense Jacobi is used up to this size; larger problems go through tridiagonal QL.
pub const JACOBI_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    /// Full reduced operator on the fine grid.
    Dense,
    /// One-cell symbols over all discrete wave vectors (translation-invariant data only).
    Bloch,
}

/// Galerkin form `K v = λ M v` of `Δ^E_p` and its Cholesky-reduced symmetric form.
#[derive(Clone, Debug)]
pub struct GalerkinLaplacian {
    pub degree: usize,
    pub stiffness: Matrix<f64>,
    pub mass: BlockDiagonal<f64>,
    pub reduced: Matrix<f64>,
}

/// Mass matrix on `C^p`: cell weight times `h_b` at the cell center, one block per cell.
pub fn mass_matrix(
    layout: &CochainLayout,
    metric: &PreparedMetric,
    p: usize,
) -> BlockDiagonal<f64> {
    let grid = &layout.grid;
    let mut blocks = Vec::new();
    for (a, b, _) in layout.parts(p) {
        for c in 0..grid.cells(a) {
            let (s, t) = grid.location(a, c);
            blocks.push(metric.block(b, s, t).scale(&grid.weight(a, c)));
        }
    }
    BlockDiagonal { blocks }
}

fn lift<S: Scalar>(m: &SparseMatrix<f64>) -> SparseMatrix<S> {
    m.map(|v| S::from_f64(*v))
}

/// `D̃_p = L_{p+1}ᵀ D_p L_p^{-ᵀ}` for `M_p = L_p L_pᵀ`: the differentials in
/// metric-orthonormal coordinates.
pub fn reduce_differentials<S: Scalar>(
    d: &[SparseMatrix<S>],
    masses: &[BlockDiagonal<f64>],
) -> Result<Vec<SparseMatrix<S>>> {
    let chol: Vec<BlockDiagonal<f64>> = masses
        .iter()
        .map(BlockDiagonal::cholesky)
        .collect::<Result<_>>()?;
    let lt: Vec<SparseMatrix<S>> = chol
        .iter()
        .map(|l| lift(&l.transpose().to_sparse()))
        .collect();
    let linv_t: Vec<SparseMatrix<S>> = chol
        .iter()
        .map(|l| Ok(lift(&l.inverse()?.transpose().to_sparse())))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (p, dp) in d.iter().enumerate() {
        let left = if p + 1 < lt.len() {
            lt[p + 1].matmul(dp)?
        } else {
            dp.clone()
        };
        out.push(left.matmul(&linv_t[p])?);
    }
    Ok(out)
}

/// `C_p = D̃_pᴴ D̃_p + D̃_{p-1} D̃_{p-1}ᴴ`.
pub fn reduced_operator<S: Scalar>(reduced: &[SparseMatrix<S>], p: usize) -> Matrix<S> {
    let n = reduced[p].ncols();
    let mut out = Matrix::zeros(n, n);
    reduced[p].add_gram_into(&mut out);
    if p > 0 {
        reduced[p - 1].adjoint().add_gram_into(&mut out);
    }
    out
}

fn check_degree(sc: &Superconnection<f64>, p: usize) -> Result<()> {
    let top = sc.base.dim() + sc.top_degree();
    if p > top {
        return Err(Error::InvalidInput(format!(
            "degree {p} exceeds the top total degree {top}"
        )));
    }
    Ok(())
}

fn layout_for(sc: &Superconnection<f64>, grid: Grid) -> CochainLayout {
    CochainLayout::new(grid, sc.ranks.clone())
}

/// Reduced differentials on the fine grid of the base.
pub fn reduced_differentials(
    sc: &Superconnection<f64>,
    metric: &PreparedMetric,
) -> Result<Vec<SparseMatrix<f64>>> {
    let grid = sc.base.grid();
    let layout = layout_for(sc, grid.clone());
    let d = total_differentials(sc, &grid, &sc.monodromy)?;
    let masses: Vec<_> = (0..d.len())
        .map(|p| mass_matrix(&layout, metric, p))
        .collect();
    reduce_differentials(&d, &masses)
}

/// Galerkin matrices of `Δ^E_p`; `K` is symmetric and `M`-self-adjointness of `Δ` follows.
pub fn laplacian(
    sc: &Superconnection<f64>,
    metric: &MetricField,
    p: usize,
) -> Result<GalerkinLaplacian> {
    check_degree(sc, p)?;
    let prepared = metric.prepare(sc)?;
    let grid = sc.base.grid();
    let layout = layout_for(sc, grid.clone());
    let d = total_differentials(sc, &grid, &sc.monodromy)?;
    let masses: Vec<_> = (0..d.len())
        .map(|q| mass_matrix(&layout, &prepared, q))
        .collect();
    let mut stiffness = Matrix::zeros(layout.degree_dim(p), layout.degree_dim(p));
    // Dᵀ M_{p+1} D
    if p + 1 < masses.len() {
        let l = masses[p + 1].cholesky()?.transpose().to_sparse();
        l.matmul(&d[p])?.add_gram_into(&mut stiffness);
    }
    // M_p D' M_{p-1}⁻¹ D'ᵀ M_p
    if p > 0 {
        let linv = masses[p - 1].cholesky()?.inverse()?.to_sparse();
        let m = masses[p].to_sparse();
        linv.matmul(&d[p - 1].transpose())?
            .matmul(&m)?
            .add_gram_into(&mut stiffness);
    }
    let reduced = reduced_operator(&reduce_differentials(&d, &masses)?, p);
    Ok(GalerkinLaplacian {
        degree: p,
        stiffness,
        mass: masses[p].clone(),
        reduced,
    })
}

fn symmetric_eigenvalues(c: &Matrix<f64>) -> Result<Vec<f64>> {
    let tol = 1e-9;
    if c.rows() <= JACOBI_LIMIT {
        Ok(eigen::sym_eig(c, tol)?.eigenvalues)
    } else {
        eigen::sym_eigvals(c, tol)
    }
}

/// Eigenvalues of a Hermitian matrix through its real form `[[A, -B], [B, A]]`.
pub fn hermitian_eigenvalues(c: &Matrix<Complex64>) -> Result<Vec<f64>> {
    let n = c.rows();
    let real = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = c[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let doubled = symmetric_eigenvalues(&real)?;
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Path chosen when none is requested.
pub fn default_path(sc: &Superconnection<f64>, metric: &MetricField) -> SolverPath {
    let translation_invariant = sc.base.kind != BaseKind::Point && metric.is_constant(sc);
    let grid = sc.base.grid();
    let large = (0..=sc.base.dim() + sc.top_degree())
        .map(|p| layout_for(sc, grid.clone()).degree_dim(p))
        .max()
        .unwrap_or(0)
        > 2 * JACOBI_LIMIT;
    if translation_invariant && large {
        SolverPath::Bloch
    } else {
        SolverPath::Dense
    }
}

fn dense_eigenvalues(
    sc: &Superconnection<f64>,
    metric: &PreparedMetric,
    p: usize,
) -> Result<Vec<f64>> {
    let reduced = reduced_differentials(sc, metric)?;
    symmetric_eigenvalues(&reduced_operator(&reduced, p))
}

fn bloch_eigenvalues(
    sc: &Superconnection<f64>,
    metric: &MetricField,
    prepared: &PreparedMetric,
    p: usize,
) -> Result<Vec<f64>> {
    if !metric.is_constant(sc) {
        return Err(Error::InvalidInput(
            "Bloch path needs trivial monodromy and a constant metric".into(),
        ));
    }
    let fine = sc.base.grid();
    let cell = Grid::with_cells(fine.dim, [1, 1], fine.h);
    let layout = layout_for(sc, cell.clone());
    let masses: Vec<_> = (0..=layout.top_degree())
        .map(|q| mass_matrix(&layout, prepared, q))
        .collect();
    let csc = sc.map(|v| Complex64::new(*v, 0.0));
    let n = sc.fiber_dim();
    let waves_y = if fine.dim == 2 { fine.n[1] } else { 1 };
    let mut all = Vec::new();
    for ky in 0..waves_y {
        for kx in 0..fine.n[0] {
            let phases = [
                2.0 * PI * kx as f64 / fine.n[0] as f64,
                2.0 * PI * ky as f64 / waves_y as f64,
            ];
            let transport: Vec<Matrix<Complex64>> = (0..fine.dim)
                .map(|g| {
                    Matrix::<Complex64>::identity(n).scale(&Complex64::from_polar(1.0, phases[g]))
                })
                .collect();
            let d = total_differentials(&csc, &cell, &transport)?;
            let reduced = reduce_differentials(&d, &masses)?;
            all.extend(hermitian_eigenvalues(&reduced_operator(&reduced, p))?);
        }
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Sorted eigenvalues of `Δ^E_p` on the discretized base.
pub fn eigenvalues(
    sc: &Superconnection<f64>,
    metric: &MetricField,
    p: usize,
    path: Option<SolverPath>,
) -> Result<Vec<f64>> {
    check_degree(sc, p)?;
    let prepared = metric.prepare(sc)?;
    match path.unwrap_or_else(|| default_path(sc, metric)) {
        SolverPath::Dense => dense_eigenvalues(sc, &prepared, p),
        SolverPath::Bloch => bloch_eigenvalues(sc, metric, &prepared, p),
    }
}

/// Lowest `count` eigenvalues of `Δ^E_p` (all when `count` is `None`) with the gap rule applied.
pub fn spectrum(
    sc: &Superconnection<f64>,
    metric: &MetricField,
    p: usize,
    count: Option<usize>,
    rule: &SmallEigenvalueRule,
) -> Result<SpectrumReport> {
    let mut eigs = eigenvalues(sc, metric, p, None)?;
    let full = eigs.len();
    if let Some(c) = count {
        eigs.truncate(c);
    }
    let complete = sc.base.kind == BaseKind::Point && eigs.len() == full;
    Ok(SpectrumReport::new(p, eigs, complete, rule))
}
