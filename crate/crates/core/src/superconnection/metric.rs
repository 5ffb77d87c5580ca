use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigen, Matrix};
use crate::superconnection::bundle::Superconnection;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `h(s,t) = Pᵀ h0 P` with `P = Φ₁^{-s} Φ₂^{-t}`.
    #[default]
    Harmonic,
    /// Constant `h0`; equivariant only for isometric monodromy.
    Reference,
}

/// Periodic conformal factor `exp(a cos(2π(kx s + ky t) + phase))` on one degree
/// (or all degrees when `degree` is absent). `kx = ky = 0, phase = 0` is a global scale `e^a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalMode {
    #[serde(default)]
    pub degree: Option<usize>,
    pub amplitude: f64,
    #[serde(default)]
    pub kx: i64,
    #[serde(default)]
    pub ky: i64,
    #[serde(default)]
    pub phase: f64,
}

impl ConformalMode {
    pub fn scale(amplitude: f64) -> Self {
        ConformalMode {
            degree: None,
            amplitude,
            kx: 0,
            ky: 0,
            phase: 0.0,
        }
    }

    fn log_factor(&self, b: usize, s: f64, t: f64) -> f64 {
        if self.degree.is_some_and(|d| d != b) {
            return 0.0;
        }
        self.amplitude * (2.0 * PI * (self.kx as f64 * s + self.ky as f64 * t) + self.phase).cos()
    }
}

/// Graded Euclidean metric on `E` as a function on the universal cover of the base.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricField {
    #[serde(default)]
    pub kind: MetricKind,
    /// Per-degree blocks of `h0`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ConformalMode>,
}

impl MetricField {
    pub fn harmonic() -> Self {
        MetricField::default()
    }

    pub fn reference() -> Self {
        MetricField {
            kind: MetricKind::Reference,
            ..Default::default()
        }
    }

    pub fn with_modes(mut self, modes: impl IntoIterator<Item = ConformalMode>) -> Self {
        self.modes.extend(modes);
        self
    }

    /// `e^a · h`.
    pub fn scaled(self, a: f64) -> Self {
        self.with_modes([ConformalMode::scale(a)])
    }

    /// True when `h` does not depend on the base point for this bundle.
    pub fn is_constant(&self, sc: &Superconnection<f64>) -> bool {
        let trivial = sc
            .monodromy
            .iter()
            .all(|g| (g - &Matrix::identity(g.rows())).max_abs() == 0.0);
        (self.kind == MetricKind::Reference || trivial)
            && self.modes.iter().all(|m| m.kx == 0 && m.ky == 0)
    }

    pub fn prepare(&self, sc: &Superconnection<f64>) -> Result<PreparedMetric> {
        let ranks = sc.ranks.clone();
        let h0: Vec<Matrix<f64>> = match &self.h0 {
            None => ranks.iter().map(|&r| Matrix::identity(r)).collect(),
            Some(blocks) => {
                if blocks.len() != ranks.len() {
                    return Err(Error::mismatch(ranks.len(), blocks.len()));
                }
                let mut out = Vec::new();
                for (b, rows) in blocks.iter().enumerate() {
                    let m = if rows.is_empty() {
                        Matrix::zeros(0, 0)
                    } else {
                        Matrix::from_rows(rows)?
                    };
                    if m.shape() != (ranks[b], ranks[b]) {
                        return Err(Error::mismatch(
                            format!("{0}x{0} block for degree {b}", ranks[b]),
                            format!("{:?}", m.shape()),
                        ));
                    }
                    if m.asymmetry() > 1e-12 * m.max_abs().max(1.0) {
                        return Err(Error::InvalidInput(format!(
                            "h0 block {b} is not symmetric"
                        )));
                    }
                    eigen::cholesky(&m)?;
                    out.push(m);
                }
                out
            }
        };
        let mut powers = Vec::new();
        for g in &sc.monodromy {
            let mut per = Vec::new();
            for (b, h) in h0.iter().enumerate() {
                let phi = sc.block(g, b, b);
                per.push(match self.kind {
                    MetricKind::Reference => Power::Identity,
                    MetricKind::Harmonic => Power::of(&phi, h)?,
                });
            }
            powers.push(per);
        }
        let prepared = PreparedMetric {
            h0,
            powers,
            modes: self.modes.clone(),
        };
        prepared.check_equivariance(sc)?;
        Ok(prepared)
    }
}

/// Real powers `Φ^{-s}` for the monodromy classes that carry a harmonic metric.
#[derive(Clone, Debug)]
enum Power {
    Identity,
    /// `Φ = exp(L)` with `L` nilpotent.
    Unipotent(Matrix<f64>),
    /// `Φ = V diag(μ) Vᵀ` with `μ > 0`.
    Positive {
        vecs: Matrix<f64>,
        logs: Vec<f64>,
    },
}

impl Power {
    fn of(phi: &Matrix<f64>, h0: &Matrix<f64>) -> Result<Power> {
        let n = phi.rows();
        let id = Matrix::identity(n);
        if n == 0 || (phi - &id).max_abs() < 1e-14 {
            return Ok(Power::Identity);
        }
        let pulled = &(&phi.transpose() * h0) * phi;
        if (&pulled - h0).max_abs() < 1e-12 * h0.max_abs() {
            return Ok(Power::Identity);
        }
        let nil = phi - &id;
        if nil.pow(n as u32).max_abs() < 1e-12 {
            let mut log = Matrix::zeros(n, n);
            let mut term = id.clone();
            for k in 1..=n {
                term = &term * &nil;
                let c = (if k % 2 == 1 { 1.0 } else { -1.0 }) / k as f64;
                log = &log + &term.scale(&c);
            }
            return Ok(Power::Unipotent(log));
        }
        if phi.asymmetry() < 1e-12 * phi.max_abs() {
            let e = eigen::sym_eig(phi, 1e-12)?;
            if e.eigenvalues.iter().all(|&m| m > 0.0) {
                return Ok(Power::Positive {
                    vecs: e.eigenvectors,
                    logs: e.eigenvalues.iter().map(|m| m.ln()).collect(),
                });
            }
        }
        Err(Error::InvalidInput(
            "harmonic metric needs monodromy blocks that are isometric, unipotent, or symmetric positive definite".into(),
        ))
    }

    /// `Φ^{-s}`.
    fn neg_pow(&self, n: usize, s: f64) -> Matrix<f64> {
        match self {
            Power::Identity => Matrix::identity(n),
            Power::Unipotent(log) => {
                let step = log.scale(&-s);
                let mut out = Matrix::identity(n);
                let mut term = Matrix::identity(n);
                for k in 1..=n {
                    term = (&term * &step).scale(&(1.0 / k as f64));
                    out = &out + &term;
                }
                out
            }
            Power::Positive { vecs, logs } => {
                let d: Vec<f64> = logs.iter().map(|l| (-s * l).exp()).collect();
                &(vecs * &Matrix::from_diagonal(&d)) * &vecs.transpose()
            }
        }
    }
}

/// Metric ready for evaluation on a specific bundle.
#[derive(Clone, Debug)]
pub struct PreparedMetric {
    h0: Vec<Matrix<f64>>,
    powers: Vec<Vec<Power>>,
    modes: Vec<ConformalMode>,
}

impl PreparedMetric {
    /// `h_b` at `(s,t)` in units of the circumferences.
    pub fn block(&self, b: usize, s: f64, t: f64) -> Matrix<f64> {
        let r = self.h0[b].rows();
        let mut p = Matrix::identity(r);
        for (g, x) in self.powers.iter().zip([s, t]) {
            p = &p * &g[b].neg_pow(r, x);
        }
        let conformal: f64 = self.modes.iter().map(|m| m.log_factor(b, s, t)).sum();
        (&(&p.transpose() * &self.h0[b]) * &p).scale(&conformal.exp())
    }

    pub fn degrees(&self) -> usize {
        self.h0.len()
    }

    /// Largest relative defect of `Φᵀ h(x + e_g) Φ = h(x)` over sample points.
    pub fn equivariance_defect(&self, sc: &Superconnection<f64>) -> f64 {
        let samples = [0.0, 0.3, 0.71];
        let mut worst: f64 = 0.0;
        for (g, phi) in sc.monodromy.iter().enumerate() {
            for &s in &samples {
                for &t in &samples {
                    for b in 0..self.degrees() {
                        let f = sc.block(phi, b, b);
                        let here = self.block(b, s, t);
                        let (s1, t1) = if g == 0 { (s + 1.0, t) } else { (s, t + 1.0) };
                        let there = &(&f.transpose() * &self.block(b, s1, t1)) * &f;
                        worst = worst.max((&there - &here).max_abs() / here.max_abs().max(1e-300));
                    }
                }
            }
        }
        worst
    }

    fn check_equivariance(&self, sc: &Superconnection<f64>) -> Result<()> {
        let defect = self.equivariance_defect(sc);
        if defect > 1e-9 {
            return Err(Error::MetricNotEquivariant(defect));
        }
        Ok(())
    }

    /// Smallest `ε` with `e^{-ε} h1 ≤ h2 ≤ e^{ε} h1` at the given points.
    pub fn closeness(&self, other: &PreparedMetric, points: &[(f64, f64)]) -> Result<f64> {
        let mut eps: f64 = 0.0;
        for &(s, t) in points {
            for b in 0..self.degrees() {
                let h1 = self.block(b, s, t);
                if h1.rows() == 0 {
                    continue;
                }
                let l = eigen::cholesky(&h1)?;
                let c = eigen::cholesky_reduce(&other.block(b, s, t), &l);
                for v in eigen::sym_eig(&c, 1e-12)?.eigenvalues {
                    eps = eps.max(v.ln().abs());
                }
            }
        }
        Ok(eps)
    }
}
