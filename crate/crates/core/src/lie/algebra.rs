use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{linalg, Matrix};
use crate::scalar::{parse_rational, rational_to_string, Scalar};
use crate::Rational;

/// Structure constants `c^k_ij` of a Lie algebra in a basis that is declared orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentLieAlgebra<S> {
    n: usize,
    c: Vec<S>,
}

/// One bracket entry `[e_i, e_j] = c e_k`, 1-based, as stored in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Preset {
        preset: String,
    },
    Explicit {
        dim: usize,
        brackets: Vec<BracketEntry>,
    },
}

impl<S: Scalar> NilpotentLieAlgebra<S> {
    pub fn abelian(n: usize) -> Self {
        NilpotentLieAlgebra {
            n,
            c: vec![S::zero(); n * n * n],
        }
    }

    /// Builds from `[e_i, e_j] = c e_k` entries (0-based) and fills in `[e_j, e_i] = −c e_k`.
    pub fn from_brackets(n: usize, brackets: &[(usize, usize, usize, S)]) -> Result<Self> {
        let mut a = Self::abelian(n);
        for (i, j, k, v) in brackets {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidInput(format!(
                    "bracket index ({i},{j},{k}) outside dimension {n}"
                )));
            }
            if i == j {
                if !v.is_zero() {
                    return Err(Error::InvalidInput(format!("[e{i}, e{i}] must vanish")));
                }
                continue;
            }
            let cur = a.c(i, j, k).clone();
            if !cur.is_zero() && cur != *v {
                return Err(Error::InvalidInput(format!(
                    "conflicting entries for [e{i}, e{j}]"
                )));
            }
            a.set(i, j, k, v.clone());
            a.set(j, i, k, -v.clone());
        }
        Ok(a)
    }

    /// Raw constants without antisymmetrization; `validate` reports any defects.
    pub fn from_raw(n: usize, c: Vec<S>) -> Result<Self> {
        if c.len() != n * n * n {
            return Err(Error::mismatch(n * n * n, c.len()));
        }
        Ok(NilpotentLieAlgebra { n, c })
    }

    /// `dim = 2m + 1`, `[e_i, e_{m+i}] = e_{2m+1}`.
    pub fn heisenberg(dim: usize) -> Result<Self> {
        if dim < 3 || dim % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "Heisenberg algebras have odd dimension ≥ 3, got {dim}"
            )));
        }
        let m = (dim - 1) / 2;
        let b: Vec<_> = (0..m).map(|i| (i, m + i, dim - 1, S::one())).collect();
        Self::from_brackets(dim, &b)
    }

    /// Standard filiform algebra `[e_1, e_i] = e_{i+1}`, `2 ≤ i < n`.
    pub fn filiform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "filiform algebras need dimension ≥ 3, got {n}"
            )));
        }
        let b: Vec<_> = (1..n - 1).map(|i| (0, i, i + 1, S::one())).collect();
        Self::from_brackets(n, &b)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut a = Self::abelian(n);
        for (i, j, k) in self.triples() {
            a.set(i, j, k, self.c(i, j, k).clone());
        }
        let o = self.n;
        for (i, j, k) in other.triples() {
            a.set(i + o, j + o, k + o, other.c(i, j, k).clone());
        }
        a
    }

    /// Parses `abelian:n`, `heisenberg:n`, `filiform:n`, joined by `+` for direct sums.
    /// The colon may be omitted (`heisenberg3`).
    pub fn preset(name: &str) -> Result<Self> {
        let mut acc: Option<Self> = None;
        for part in name.split('+') {
            let part = part.trim();
            let split = part
                .find(|ch: char| ch.is_ascii_digit())
                .unwrap_or(part.len());
            let (kind, num) = part.split_at(split);
            let kind = kind.trim_end_matches(':');
            let n: usize = num
                .parse()
                .map_err(|_| Error::InvalidInput(format!("preset `{part}` needs a dimension")))?;
            let a = match kind {
                "abelian" => Self::abelian(n),
                "heisenberg" => Self::heisenberg(n)?,
                "filiform" => Self::filiform(n)?,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "unknown algebra preset `{kind}`"
                    )))
                }
            };
            acc = Some(match acc {
                None => a,
                Some(x) => x.direct_sum(&a),
            });
        }
        acc.ok_or_else(|| Error::InvalidInput("empty preset".into()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Coefficient of `e_k` in `[e_i, e_j]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[(i * self.n + j) * self.n + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: S) {
        let n = self.n;
        self.c[(i * n + j) * n + k] = v;
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> NilpotentLieAlgebra<T> {
        NilpotentLieAlgebra {
            n: self.n,
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> NilpotentLieAlgebra<f64> {
        self.map(|v| v.as_f64())
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + xy.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(e_i)`: column j is `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> Matrix<S> {
        Matrix::from_fn(self.n, self.n, |k, j| self.c(i, j, k).clone())
    }

    /// Structure constants in the basis `f_a = Σ_i q_{ia} e_i` (columns of `q`).
    pub fn change_basis(&self, q: &Matrix<S>, tol: f64) -> Result<Self> {
        let n = self.n;
        if q.shape() != (n, n) {
            return Err(Error::mismatch(
                format!("{n}x{n}"),
                format!("{:?}", q.shape()),
            ));
        }
        let qinv = linalg::inverse(q, tol)?;
        let mut out = Self::abelian(n);
        for a in 0..n {
            for b in 0..n {
                let v = self.bracket(&q.col(a), &q.col(b));
                let coords = qinv.matvec(&v);
                for (cidx, val) in coords.into_iter().enumerate() {
                    out.set(a, b, cidx, val);
                }
            }
        }
        Ok(out)
    }

    /// Σ (c^i_jk)² over all ordered index triples.
    pub fn structure_norm_sq(&self) -> S {
        self.c
            .iter()
            .fold(S::zero(), |acc, v| acc + v.clone() * v.conj())
    }
}

impl NilpotentLieAlgebra<Rational> {
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        match spec {
            AlgebraSpec::Preset { preset } => Self::preset(preset),
            AlgebraSpec::Explicit { dim, brackets } => {
                let mut b = Vec::new();
                for e in brackets {
                    if e.i == 0 || e.j == 0 || e.k == 0 {
                        return Err(Error::InvalidInput("bracket indices are 1-based".into()));
                    }
                    let v = parse_rational(&e.c)
                        .ok_or_else(|| Error::InvalidInput(format!("bad rational `{}`", e.c)))?;
                    b.push((e.i - 1, e.j - 1, e.k - 1, v));
                }
                Self::from_brackets(*dim, &b)
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(s)?)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let brackets = self
            .triples()
            .filter(|&(i, j, k)| i < j && !self.c(i, j, k).is_zero())
            .map(|(i, j, k)| BracketEntry {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                c: rational_to_string(self.c(i, j, k)),
            })
            .collect();
        AlgebraSpec::Explicit {
            dim: self.n,
            brackets,
        }
    }
}

/// Result of one invariant check; `first_violation` holds 0-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub first_violation: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub antisymmetry: Check,
    pub jacobi: Check,
    pub nilpotency: Check,
    /// Dimensions of the lower central series until it stabilizes.
    pub lower_central_dims: Vec<usize>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.antisymmetry.pass && self.jacobi.pass && self.nilpotency.pass
    }
}

fn check(first: Option<Vec<usize>>) -> Check {
    Check {
        pass: first.is_none(),
        first_violation: first,
    }
}

/// Rows spanning `[g, V]` where the rows of `v` span `V`.
pub(crate) fn bracket_with_all<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    v: &Matrix<S>,
    tol: f64,
) -> Matrix<S> {
    let n = alg.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        let mut e = vec![S::zero(); n];
        e[i] = S::one();
        for r in 0..v.rows() {
            rows.push(alg.bracket(&e, v.row(r)));
        }
    }
    if rows.is_empty() {
        return Matrix::zeros(0, n);
    }
    linalg::row_basis(&Matrix::from_rows(&rows).expect("uniform rows"), tol)
}

/// Lower central series as row-basis matrices, ending with the first zero space
/// or with a repeated nonzero space when the algebra is not nilpotent.
pub fn lower_central_series<S: Scalar>(
    alg: &NilpotentLieAlgebra<S>,
    tol: f64,
) -> (Vec<Matrix<S>>, bool) {
    let n = alg.dim();
    let mut series = vec![Matrix::identity(n)];
    loop {
        let last = series.last().expect("nonempty");
        if last.rows() == 0 {
            return (series, true);
        }
        let next = bracket_with_all(alg, last, tol);
        if next.rows() == last.rows() {
            series.push(next);
            return (series, false);
        }
        series.push(next);
    }
}

pub fn validate<S: Scalar>(alg: &NilpotentLieAlgebra<S>, tol: f64) -> ValidationReport {
    let n = alg.dim();
    let antisym = alg
        .triples()
        .find(|&(i, j, k)| !(alg.c(i, j, k).clone() + alg.c(j, i, k).clone()).is_negligible(tol))
        .map(|(i, j, k)| vec![i, j, k]);
    let mut jac = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = S::zero();
                    for m in 0..n {
                        s = s
                            + alg.c(i, j, m).clone() * alg.c(m, k, l).clone()
                            + alg.c(j, k, m).clone() * alg.c(m, i, l).clone()
                            + alg.c(k, i, m).clone() * alg.c(m, j, l).clone();
                    }
                    if !s.is_negligible(tol) {
                        jac = Some(vec![i, j, k, l]);
                        break 'outer;
                    }
                }
            }
        }
    }
    let (series, nilpotent) = lower_central_series(alg, tol);
    let dims: Vec<usize> = series.iter().map(Matrix::rows).collect();
    ValidationReport {
        antisymmetry: check(antisym),
        jacobi: check(jac),
        nilpotency: check((!nilpotent).then(|| vec![dims.len() - 1])),
        lower_central_dims: dims,
    }
}

/// Row basis of the center.
pub fn center<S: Scalar>(alg: &NilpotentLieAlgebra<S>, tol: f64) -> Matrix<S> {
    let n = alg.dim();
    // constraints: Σ_i x_i c^k_ij = 0 for every (j, k)
    let cons = Matrix::from_fn(n * n, n, |r, i| alg.c(i, r / n, r % n).clone());
    linalg::nullspace(&cons, tol).transpose()
}
