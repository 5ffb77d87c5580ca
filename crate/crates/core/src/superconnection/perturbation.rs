use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::eigen;
use crate::spectrum::SpectrumReport;
use crate::superconnection::bundle::Superconnection;
use crate::superconnection::laplacian::{self, reduced_differentials};
use crate::superconnection::metric::MetricField;

/// Constant in the square-root eigenvalue perturbation bound.
pub const PERTURBATION_CONSTANT: f64 = 2.0 + std::f64::consts::SQRT_2;

/// `e^{-ε} λ₂ⱼ ≤ λ₁ⱼ ≤ e^{ε} λ₂ⱼ` for every index.
pub fn epsilon_close(s1: &[f64], s2: &[f64], eps: f64) -> Result<bool> {
    if s1.len() != s2.len() {
        return Err(Error::mismatch(s1.len(), s2.len()));
    }
    Ok(s1
        .iter()
        .zip(s2)
        .all(|(&a, &b)| match (a == 0.0, b == 0.0) {
            (true, true) => true,
            (false, false) => (-eps).exp() * b <= a && a <= eps.exp() * b,
            _ => false,
        }))
}

pub fn reports_epsilon_close(s1: &SpectrumReport, s2: &SpectrumReport, eps: f64) -> Result<bool> {
    epsilon_close(&s1.eigenvalues, &s2.eigenvalues, eps)
}

/// Smallest `ε` for which the lists are ε-close; entries below `zero_tol` count as zero.
/// Infinite when a zero faces a nonzero entry.
pub fn spectral_distance(s1: &[f64], s2: &[f64], zero_tol: f64) -> Result<f64> {
    if s1.len() != s2.len() {
        return Err(Error::mismatch(s1.len(), s2.len()));
    }
    let mut eps: f64 = 0.0;
    for (&a, &b) in s1.iter().zip(s2) {
        match (a.abs() <= zero_tol, b.abs() <= zero_tol) {
            (true, true) => {}
            (false, false) if a > 0.0 && b > 0.0 => eps = eps.max((a / b).ln().abs()),
            _ => return Ok(f64::INFINITY),
        }
    }
    Ok(eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub degree: usize,
    /// Operator norm of `A′₁ − A′₂` in metric-orthonormal coordinates.
    pub difference_norm: f64,
    pub max_sqrt_gap: f64,
    /// `max_j |√λ₁ⱼ − √λ₂ⱼ| / ((2+√2)‖A′₁ − A′₂‖)`; zero when both sides vanish.
    pub max_ratio: f64,
    pub holds: bool,
}

fn operator_norm(m: &crate::numerics::SparseMatrix<f64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 || m.is_zero() {
        return Ok(0.0);
    }
    let g = m.gram();
    let top = eigen::sym_eigvals(&g, 1e-9)?.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Checks the square-root eigenvalue bound for two superconnections on the same
/// bundle and metric. Only `a0`, `a2` and `tau` may differ.
pub fn perturbation_check(
    a1: &Superconnection<f64>,
    a2: &Superconnection<f64>,
    metric: &MetricField,
    p: usize,
    count: Option<usize>,
) -> Result<PerturbationReport> {
    if a1.base != a2.base || a1.ranks != a2.ranks || a1.monodromy != a2.monodromy {
        return Err(Error::InvalidInput(
            "perturbation check needs the same base, grading and monodromy".into(),
        ));
    }
    let prepared = metric.prepare(a1)?;
    let r1 = reduced_differentials(a1, &prepared)?;
    let r2 = reduced_differentials(a2, &prepared)?;
    let mut difference_norm: f64 = 0.0;
    for (x, y) in r1.iter().zip(&r2) {
        difference_norm = difference_norm.max(operator_norm(&x.try_sub(y)?)?);
    }
    let mut l1 = laplacian::eigenvalues(a1, metric, p, Some(laplacian::SolverPath::Dense))?;
    let mut l2 = laplacian::eigenvalues(a2, metric, p, Some(laplacian::SolverPath::Dense))?;
    if let Some(c) = count {
        l1.truncate(c);
        l2.truncate(c);
    }
    let max_sqrt_gap = l1
        .iter()
        .zip(&l2)
        .map(|(a, b)| (a.max(0.0).sqrt() - b.max(0.0).sqrt()).abs())
        .fold(0.0, f64::max);
    let bound = PERTURBATION_CONSTANT * difference_norm;
    // roundoff in the eigensolver is far below this floor
    let slack = 1e-9
        * l1.iter()
            .chain(&l2)
            .fold(1.0_f64, |m, v| m.max(v.abs()))
            .sqrt();
    let max_ratio = if bound > 0.0 {
        max_sqrt_gap / bound
    } else if max_sqrt_gap <= slack {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(PerturbationReport {
        degree: p,
        difference_norm,
        max_sqrt_gap,
        max_ratio,
        holds: max_sqrt_gap <= bound + slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub degree: usize,
    /// Measured metric closeness `ε` with `e^{-ε} h₁ ≤ h₂ ≤ e^{ε} h₁`.
    pub metric_eps: f64,
    /// Smallest `ε′` for which the two spectra are ε′-close.
    pub spectral_eps: f64,
}

/// Compares the lowest `count` eigenvalues of `Δ^E_p` under two metrics.
pub fn metric_continuity_check(
    sc: &Superconnection<f64>,
    h1: &MetricField,
    h2: &MetricField,
    p: usize,
    count: usize,
    zero_tol: f64,
) -> Result<ContinuityReport> {
    let m1 = h1.prepare(sc)?;
    let m2 = h2.prepare(sc)?;
    let grid = sc.base.grid();
    let mut points = Vec::new();
    for a in 0..=grid.dim {
        for c in 0..grid.cells(a) {
            points.push(grid.location(a, c));
        }
    }
    let metric_eps = m1.closeness(&m2, &points)?;
    let mut e1 = laplacian::eigenvalues(sc, h1, p, None)?;
    let mut e2 = laplacian::eigenvalues(sc, h2, p, None)?;
    e1.truncate(count);
    e2.truncate(count);
    Ok(ContinuityReport {
        degree: p,
        metric_eps,
        spectral_eps: spectral_distance(&e1, &e2, zero_tol)?,
    })
}

/// True when the measured spectral distances decrease along the sequence.
pub fn is_decreasing_trend(reports: &[ContinuityReport]) -> bool {
    reports
        .windows(2)
        .all(|w| w[1].spectral_eps < w[0].spectral_eps || w[1].spectral_eps == 0.0)
}
