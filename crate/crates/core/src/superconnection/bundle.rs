use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::ce::ce_differential;
use crate::lie::exterior::{compound, interior};
use crate::lie::symmetry::FiniteSymmetryGroup;
use crate::lie::NilpotentLieAlgebra;
use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;
use crate::superconnection::base::{BaseKind, BaseModel};

/// Flat degree-1 superconnection with constant fiber fields on a flat base:
/// `a0` raises the bundle degree, the connection is flat with monodromy per base
/// loop and zero local potential, and `tau · a2` is the degree-lowering part
/// paired with the area form `T = tau dx∧dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superconnection<S> {
    pub base: BaseModel,
    pub ranks: Vec<usize>,
    /// One grading-preserving matrix on `E = ⊕ E^b` per base loop.
    pub monodromy: Vec<Matrix<S>>,
    pub a0: Matrix<S>,
    pub a2: Matrix<S>,
    pub tau: S,
}

/// Maximum violation of each flatness identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    /// 1: `(A'_[0])² = 0`.
    pub a0_squared: f64,
    /// 2: `∇A'_[0] = 0`, i.e. `a0` commutes with every monodromy.
    pub a0_parallel: f64,
    /// 3: `∇A'_[2] = 0`.
    pub a2_parallel: f64,
    /// 4: `∇² + A'_[0]A'_[2] + A'_[2]A'_[0] = 0`.
    pub curvature_balance: f64,
    /// Holonomy commutator, the curvature of the zero-potential connection.
    pub connection_curvature: f64,
    /// `‖τ(a0 a2 + a2 a0)‖`.
    pub anticommutator: f64,
}

impl FlatnessReport {
    pub fn violations(&self) -> [f64; 4] {
        [
            self.a0_squared,
            self.a0_parallel,
            self.a2_parallel,
            self.curvature_balance,
        ]
    }

    /// First identity (1-based) exceeding `tol`.
    pub fn first_failure(&self, tol: f64) -> Option<(usize, f64)> {
        self.violations()
            .iter()
            .enumerate()
            .find(|(_, v)| **v > tol)
            .map(|(i, v)| (i + 1, *v))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.first_failure(tol).is_none()
    }
}

impl<S: Scalar> Superconnection<S> {
    pub fn fiber_dim(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn offset(&self, b: usize) -> usize {
        self.ranks[..b].iter().sum()
    }

    /// Block of `m` from `E^b_in` to `E^b_out` (empty when out of range).
    pub fn block(&self, m: &Matrix<S>, b_out: usize, b_in: usize) -> Matrix<S> {
        if b_out >= self.ranks.len() || b_in >= self.ranks.len() {
            return Matrix::zeros(0, 0);
        }
        let (r0, c0) = (self.offset(b_out), self.offset(b_in));
        m.submatrix(r0..r0 + self.ranks[b_out], c0..c0 + self.ranks[b_in])
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Superconnection<T> {
        Superconnection {
            base: self.base.clone(),
            ranks: self.ranks.clone(),
            monodromy: self.monodromy.iter().map(|m| m.map(f)).collect(),
            a0: self.a0.map(f),
            a2: self.a2.map(f),
            tau: f(&self.tau),
        }
    }

    pub fn to_f64(&self) -> Superconnection<f64> {
        self.map(|v| v.as_f64())
    }

    /// Shape and grading checks that do not involve flatness.
    pub fn validate_structure(&self) -> Result<()> {
        self.base.validate()?;
        let n = self.fiber_dim();
        if self.ranks.is_empty() || self.ranks[0] == 0 {
            return Err(Error::InvalidInput("E^0 must have positive rank".into()));
        }
        if self.monodromy.len() != self.base.generators() {
            return Err(Error::InvalidInput(format!(
                "{:?} base needs {} monodromy matrices, got {}",
                self.base.kind,
                self.base.generators(),
                self.monodromy.len()
            )));
        }
        for m in self.monodromy.iter().chain([&self.a0, &self.a2]) {
            if m.shape() != (n, n) {
                return Err(Error::mismatch(
                    format!("{n}x{n}"),
                    format!("{:?}", m.shape()),
                ));
            }
        }
        let m = self.ranks.len();
        for bo in 0..m {
            for bi in 0..m {
                let mono_ok = bo == bi
                    || self
                        .monodromy
                        .iter()
                        .all(|g| self.block(g, bo, bi).is_zero());
                if !mono_ok {
                    return Err(Error::InvalidInput(
                        "monodromy must preserve the grading".into(),
                    ));
                }
                if bo != bi + 1 && !self.block(&self.a0, bo, bi).is_zero() {
                    return Err(Error::InvalidInput(
                        "A'_[0] must raise the degree by one".into(),
                    ));
                }
                if bo + 1 != bi && !self.block(&self.a2, bo, bi).is_zero() {
                    return Err(Error::InvalidInput(
                        "A'_[2] must lower the degree by one".into(),
                    ));
                }
            }
        }
        for g in &self.monodromy {
            if linalg::det(g)?.is_negligible(1e-14) {
                return Err(Error::InvalidInput("monodromy must be invertible".into()));
            }
        }
        if self.base.kind != BaseKind::Torus2 && !self.tau.is_zero() && !self.a2.is_zero() {
            return Err(Error::InvalidInput(
                "A'_[2] needs a two-dimensional base".into(),
            ));
        }
        Ok(())
    }

    pub fn check_flatness(&self) -> FlatnessReport {
        let a0sq = self.a0.matmul(&self.a0).expect("square").max_abs();
        let par = |x: &Matrix<S>| {
            self.monodromy
                .iter()
                .map(|g| g.commutator(x).expect("square").max_abs())
                .fold(0.0, f64::max)
        };
        let a0_parallel = par(&self.a0);
        let t_active = !self.tau.is_zero();
        let a2_parallel = if t_active { par(&self.a2) } else { 0.0 };
        let connection_curvature = if self.monodromy.len() == 2 {
            self.monodromy[0]
                .commutator(&self.monodromy[1])
                .expect("square")
                .max_abs()
        } else {
            0.0
        };
        let anti = (&self.a0.matmul(&self.a2).expect("square")
            + &self.a2.matmul(&self.a0).expect("square"))
            .scale(&self.tau)
            .max_abs();
        FlatnessReport {
            a0_squared: a0sq,
            a0_parallel,
            a2_parallel,
            curvature_balance: connection_curvature + anti,
            connection_curvature,
            anticommutator: anti,
        }
    }

    /// Structure checks plus all four flatness identities within `tol`.
    pub fn validate(&self, tol: f64) -> Result<FlatnessReport> {
        self.validate_structure()?;
        let r = self.check_flatness();
        if let Some((identity, violation)) = r.first_failure(tol) {
            return Err(Error::FlatnessViolation {
                identity,
                violation,
            });
        }
        Ok(r)
    }
}

/// Vertical part `T = tau · dx∧dy ⊗ v` of the curvature of an affine bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureForm<S> {
    pub tau: S,
    pub vector: Vec<S>,
}

/// Superconnection `d^𝔫 + ∇ + i_T` on `Λ*(𝔫*)^F` over a flat base.
/// `fiber_actions` act on `𝔫*` (the degree-one forms) and are extended to `Λ^b`.
pub fn from_affine_bundle<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    group: &FiniteSymmetryGroup<S>,
    base: &BaseModel,
    fiber_actions: &[Matrix<S>],
    curvature: Option<&CurvatureForm<S>>,
    tol: f64,
) -> Result<Superconnection<S>> {
    let n = alg.dim();
    group.validate(alg, tol)?;
    let bases: Vec<Matrix<S>> = (0..=n)
        .map(|b| group.invariant_basis(b, tol))
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let total: usize = ranks.iter().sum();
    let offsets: Vec<usize> = (0..=n).map(|b| ranks[..b].iter().sum()).collect();
    let restrict = |op: &Matrix<S>, out: usize, inn: usize| -> Matrix<S> {
        &(&bases[out].adjoint() * op) * &bases[inn]
    };

    let mut a0 = Matrix::zeros(total, total);
    for b in 0..n {
        a0.set_block(
            offsets[b + 1],
            offsets[b],
            &restrict(&ce_differential(alg, b)?, b + 1, b),
        );
    }

    let mut monodromy = Vec::new();
    for act in fiber_actions {
        if act.shape() != (n, n) {
            return Err(Error::mismatch(
                format!("{n}x{n} fiber action"),
                format!("{:?}", act.shape()),
            ));
        }
        let mut g = Matrix::zeros(total, total);
        for b in 0..=n {
            let full = compound(act, b);
            let image = &full * &bases[b];
            let r = &bases[b].adjoint() * &image;
            if !(&(&bases[b] * &r) - &image)
                .data()
                .iter()
                .all(|v| v.is_negligible(tol))
            {
                return Err(Error::InvalidInput(
                    "monodromy does not preserve the F-invariant forms".into(),
                ));
            }
            g.set_block(offsets[b], offsets[b], &r);
        }
        monodromy.push(g);
    }

    let (tau, a2) = match curvature {
        None => (S::zero(), Matrix::zeros(total, total)),
        Some(c) => {
            if c.vector.len() != n {
                return Err(Error::mismatch(n, c.vector.len()));
            }
            for f in &group.elements {
                let fv = f.matvec(&c.vector);
                if fv
                    .iter()
                    .zip(&c.vector)
                    .any(|(a, b)| !(a.clone() - b.clone()).is_negligible(tol))
                {
                    return Err(Error::InvalidInput(
                        "T must take values in F-invariant vertical fields".into(),
                    ));
                }
            }
            let mut a2 = Matrix::zeros(total, total);
            for b in 1..=n {
                a2.set_block(
                    offsets[b - 1],
                    offsets[b],
                    &restrict(&interior(&c.vector, b), b - 1, b),
                );
            }
            (c.tau.clone(), a2)
        }
    };
    let sc = Superconnection {
        base: base.clone(),
        ranks,
        monodromy,
        a0,
        a2,
        tau,
    };
    sc.validate(tol.max(1e-12))?;
    Ok(sc)
}
