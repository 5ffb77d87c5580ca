use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{rank_exact, Matrix, RationalMatrix};
use crate::scalar::rational_to_string;
use crate::superconnection::base::Grid;
use crate::superconnection::bundle::Superconnection;
use crate::superconnection::cochain::bigraded_blocks;
use crate::superconnection::spec::Entry;
use crate::Rational;

/// Finite-dimensional bigraded spaces `C^{a,b}` with components
/// `D_[i] : C^{a,b} → C^{a+i, b+1-i}` of a degree-one differential.
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedComplex {
    dims: Vec<Vec<usize>>,
    maps: BTreeMap<(usize, usize, usize), RationalMatrix>,
}

impl BigradedComplex {
    /// `dims[a][b]`; rows must have equal length.
    pub fn new(dims: Vec<Vec<usize>>) -> Result<Self> {
        let b = dims.first().map_or(0, Vec::len);
        if dims.is_empty() || b == 0 || dims.iter().any(|r| r.len() != b) {
            return Err(Error::InvalidInput(
                "dims must be a nonempty rectangular grid".into(),
            ));
        }
        Ok(BigradedComplex {
            dims,
            maps: BTreeMap::new(),
        })
    }

    pub fn a_extent(&self) -> usize {
        self.dims.len()
    }

    pub fn b_extent(&self) -> usize {
        self.dims[0].len()
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    pub fn dim(&self, a: usize, b: usize) -> usize {
        self.dims
            .get(a)
            .and_then(|r| r.get(b))
            .copied()
            .unwrap_or(0)
    }

    pub fn top_degree(&self) -> usize {
        self.a_extent() + self.b_extent() - 2
    }

    pub fn set(&mut self, i: usize, a: usize, b: usize, m: RationalMatrix) -> Result<()> {
        if b + 1 < i {
            return Err(Error::InvalidInput(format!(
                "D_[{i}] cannot leave bidegree ({a},{b})"
            )));
        }
        let want = (self.dim(a + i, b + 1 - i), self.dim(a, b));
        if m.shape() != want {
            return Err(Error::mismatch(
                format!("D_[{i}] at ({a},{b}) of shape {want:?}"),
                format!("{:?}", m.shape()),
            ));
        }
        if m.is_zero() {
            self.maps.remove(&(i, a, b));
        } else {
            self.maps.insert((i, a, b), m);
        }
        Ok(())
    }

    /// `D_[i]` out of `(a, b)`, zero when absent.
    pub fn component(&self, i: usize, a: usize, b: usize) -> RationalMatrix {
        match self.maps.get(&(i, a, b)) {
            Some(m) => m.clone(),
            None if b + 1 < i => Matrix::zeros(0, self.dim(a, b)),
            None => Matrix::zeros(self.dim(a + i, b + 1 - i), self.dim(a, b)),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize, usize), &RationalMatrix)> {
        self.maps.iter()
    }

    /// Bidegrees of total degree `p` in increasing `a`, with offsets into `C^p`.
    pub fn parts(&self, p: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for a in 0..self.a_extent().min(p + 1) {
            let b = p - a;
            if b < self.b_extent() {
                out.push((a, b, off));
                off += self.dim(a, b);
            }
        }
        out
    }

    pub fn degree_dim(&self, p: usize) -> usize {
        self.parts(p).iter().map(|&(a, b, _)| self.dim(a, b)).sum()
    }

    /// Total differential `C^p → C^{p+1}`.
    pub fn total_differential(&self, p: usize) -> RationalMatrix {
        let src = self.parts(p);
        let dst = self.parts(p + 1);
        let mut d = Matrix::zeros(self.degree_dim(p + 1), self.degree_dim(p));
        for &(a, b, c0) in &src {
            for &(ta, tb, r0) in &dst {
                if ta < a {
                    continue;
                }
                let i = ta - a;
                if tb + i != b + 1 {
                    continue;
                }
                if let Some(m) = self.maps.get(&(i, a, b)) {
                    d.set_block(r0, c0, m);
                }
            }
        }
        d
    }

    /// Exact check of `D² = 0`; the error names the first failing total degree.
    pub fn validate(&self) -> Result<()> {
        for p in 0..self.top_degree() {
            let dd = self
                .total_differential(p + 1)
                .matmul(&self.total_differential(p))?;
            if !dd.is_zero() {
                return Err(Error::InvalidInput(format!("D² ≠ 0 from total degree {p}")));
            }
        }
        Ok(())
    }

    /// `dim H^p` of the total complex.
    pub fn total_cohomology(&self, p: usize) -> Result<usize> {
        self.validate()?;
        Ok(self.total_cohomology_unchecked(p))
    }

    pub(crate) fn total_cohomology_unchecked(&self, p: usize) -> usize {
        let out = rank_exact(&self.total_differential(p));
        let inc = if p > 0 {
            rank_exact(&self.total_differential(p - 1))
        } else {
            0
        };
        self.degree_dim(p) - out - inc
    }

    pub fn betti(&self) -> Result<Vec<usize>> {
        self.validate()?;
        Ok((0..=self.top_degree())
            .map(|p| self.total_cohomology_unchecked(p))
            .collect())
    }

    /// Cochains of `grid` with values in the bundle, filtered by base degree.
    pub fn from_superconnection(sc: &Superconnection<Rational>, grid: &Grid) -> Result<Self> {
        let dims = (0..=grid.dim)
            .map(|a| sc.ranks.iter().map(|r| grid.cells(a) * r).collect())
            .collect();
        let mut c = Self::new(dims)?;
        for ((i, a, b), m) in bigraded_blocks(sc, grid, &sc.monodromy)? {
            c.set(i, a, b, m.to_dense())?;
        }
        Ok(c)
    }

    /// The model on the base's minimal cell structure.
    pub fn minimal_model(sc: &Superconnection<Rational>) -> Result<Self> {
        Self::from_superconnection(sc, &sc.base.minimal_grid())
    }

    /// A single column `C^{0,b}` carrying the given differentials `d_b : C^b → C^{b+1}`.
    pub fn from_cochain_complex(ds: &[RationalMatrix]) -> Result<Self> {
        let mut dims: Vec<usize> = ds.iter().map(Matrix::cols).collect();
        // a trailing map into the zero space adds nothing
        let maps = match ds.last() {
            Some(last) if last.rows() == 0 => &ds[..ds.len() - 1],
            Some(last) => {
                dims.push(last.rows());
                ds
            }
            None => ds,
        };
        let mut c = Self::new(vec![dims])?;
        for (b, d) in maps.iter().enumerate() {
            c.set(0, 0, b, d.clone())?;
        }
        Ok(c)
    }

    pub fn to_spec(&self) -> ComplexSpec {
        let maps = self
            .maps
            .iter()
            .map(|(&(i, a, b), m)| MapSpec {
                i,
                a,
                b,
                entries: (0..m.rows())
                    .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
                    .filter(|&(r, c)| !num_traits::Zero::is_zero(&m[(r, c)]))
                    .map(|(r, c)| (r, c, Entry::Text(rational_to_string(&m[(r, c)]))))
                    .collect(),
            })
            .collect();
        ComplexSpec {
            dims: self.dims.clone(),
            maps,
        }
    }

    pub fn from_spec(spec: &ComplexSpec) -> Result<Self> {
        let mut c = Self::new(spec.dims.clone())?;
        for m in &spec.maps {
            if m.b + 1 < m.i {
                return Err(Error::InvalidInput(format!(
                    "D_[{}] cannot leave bidegree ({},{})",
                    m.i, m.a, m.b
                )));
            }
            let (rows, cols) = (c.dim(m.a + m.i, m.b + 1 - m.i), c.dim(m.a, m.b));
            let mut mat: RationalMatrix = Matrix::zeros(rows, cols);
            for (r, col, v) in &m.entries {
                if *r >= rows || *col >= cols {
                    return Err(Error::InvalidInput(format!(
                        "entry ({r},{col}) outside D_[{}] at ({},{}) of shape {rows}x{cols}",
                        m.i, m.a, m.b
                    )));
                }
                mat[(*r, *col)] = mat[(*r, *col)].clone() + v.to_rational()?;
            }
            c.set(m.i, m.a, m.b, mat)?;
        }
        Ok(c)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(s)?)
    }
}

/// JSON form: `dims[a][b]` plus sparse 0-based entries for each nonzero `D_[i]` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub dims: Vec<Vec<usize>>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub i: usize,
    pub a: usize,
    pub b: usize,
    pub entries: Vec<(usize, usize, Entry)>,
}
