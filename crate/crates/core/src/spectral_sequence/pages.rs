use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{nullspace_exact, quotient_dim, rank_exact, Matrix, RationalMatrix};
use crate::spectral_sequence::complex::BigradedComplex;

/// One page: `dims[a][b] = dim E_r^{a,b}`, `d_ranks[a][b] = rank d_r` out of `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub r: usize,
    pub dims: Vec<Vec<usize>>,
    pub d_ranks: Vec<Vec<usize>>,
}

impl Page {
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.dims
            .get(a)
            .and_then(|r| r.get(b))
            .copied()
            .unwrap_or(0)
    }

    /// `Σ_{a+b=p} dim E_r^{a,b}`.
    pub fn total(&self, p: usize) -> usize {
        (0..=p).map(|a| self.get(a, p - a)).sum()
    }
}

/// Constraint rows cutting out `Z_r^a ⊂ C^p`: `x ∈ F^a` and `Dx ∈ F^{a+r}`.
/// Negative filtration indices mean the whole complex.
fn z_constraints(c: &BigradedComplex, p: usize, a: isize, r: isize) -> RationalMatrix {
    let n = c.degree_dim(p);
    let mut rows: Vec<Vec<crate::Rational>> = Vec::new();
    for (pa, pb, off) in c.parts(p) {
        if (pa as isize) < a {
            for k in 0..c.dim(pa, pb) {
                let mut e = vec![num_traits::Zero::zero(); n];
                e[off + k] = num_traits::One::one();
                rows.push(e);
            }
        }
    }
    let mut out = if rows.is_empty() {
        Matrix::zeros(0, n)
    } else {
        Matrix::from_rows(&rows).expect("uniform rows")
    };
    // automatic when r ≤ 0, since D preserves the filtration
    let keep: Vec<usize> = c
        .parts(p + 1)
        .into_iter()
        .filter(|&(ta, _, _)| (ta as isize) < a + r)
        .flat_map(|(ta, tb, off)| off..off + c.dim(ta, tb))
        .collect();
    if !keep.is_empty() {
        let d = c.total_differential(p);
        out = Matrix::vstack(&[&out, &d.select_rows(&keep)], n).expect("same width");
    }
    out
}

/// Basis (columns) of `Z_r^a` in `C^p`.
fn z_basis(c: &BigradedComplex, p: usize, a: isize, r: isize) -> RationalMatrix {
    nullspace_exact(&z_constraints(c, p, a, r))
}

/// Generators (rows) of `Z_{r-1}^{a+1} + D Z_{r-1}^{a-r+1}` in `C^p`.
fn denominator(c: &BigradedComplex, p: usize, a: isize, r: isize) -> RationalMatrix {
    let n = c.degree_dim(p);
    let inner = z_basis(c, p, a + 1, r - 1).transpose();
    if p == 0 {
        return inner;
    }
    let boundary = c
        .total_differential(p - 1)
        .matmul(&z_basis(c, p - 1, a - r + 1, r - 1))
        .expect("shapes")
        .transpose();
    Matrix::vstack(&[&inner, &boundary], n).expect("same width")
}

fn page_dim(c: &BigradedComplex, a: usize, b: usize, r: usize) -> Result<usize> {
    let p = a + b;
    if c.dim(a, b) == 0 {
        return Ok(0);
    }
    let (a, r) = (a as isize, r as isize);
    quotient_dim(&z_constraints(c, p, a, r), &denominator(c, p, a, r))
}

/// `rank d_r : E_r^{a,b} → E_r^{a+r, b-r+1}`.
fn d_rank(c: &BigradedComplex, a: usize, b: usize, r: usize) -> usize {
    let p = a + b;
    if c.dim(a, b) == 0 || a + r >= c.a_extent() || b + 1 < r || b + 1 - r >= c.b_extent() {
        return 0;
    }
    let (ai, ri) = (a as isize, r as isize);
    let image = c
        .total_differential(p)
        .matmul(&z_basis(c, p, ai, ri))
        .expect("shapes")
        .transpose();
    let den = denominator(c, p + 1, ai + ri, ri);
    let stacked = Matrix::vstack(&[&image, &den], c.degree_dim(p + 1)).expect("same width");
    rank_exact(&stacked) - rank_exact(&den)
}

/// Page `r` from the closed quotient formula, with the ranks of `d_r`.
pub fn page(c: &BigradedComplex, r: usize) -> Result<Page> {
    c.validate()?;
    page_unchecked(c, r)
}

fn page_unchecked(c: &BigradedComplex, r: usize) -> Result<Page> {
    let (na, nb) = (c.a_extent(), c.b_extent());
    let mut dims = vec![vec![0; nb]; na];
    let mut d_ranks = vec![vec![0; nb]; na];
    for a in 0..na {
        for b in 0..nb {
            dims[a][b] = page_dim(c, a, b, r)?;
            d_ranks[a][b] = d_rank(c, a, b, r);
        }
    }
    Ok(Page { r, dims, d_ranks })
}

/// Next page as the homology of `(E_r, d_r)`.
pub fn next_page_dims(prev: &Page) -> Vec<Vec<usize>> {
    let r = prev.r;
    let na = prev.dims.len();
    let nb = prev.dims.first().map_or(0, Vec::len);
    let mut out = vec![vec![0; nb]; na];
    for a in 0..na {
        for b in 0..nb {
            let incoming = if a >= r && b + r >= 1 && b + r - 1 < nb {
                prev.d_ranks[a - r][b + r - 1]
            } else {
                0
            };
            let outgoing = prev.d_ranks[a][b];
            out[a][b] = prev.dims[a][b] - outgoing - incoming;
        }
    }
    out
}

/// Page index from which nothing changes.
pub fn stabilization_page(c: &BigradedComplex) -> usize {
    c.a_extent() + c.b_extent() + 1
}

/// Pages `0..=stabilization_page`, each cross-checked against the homology of the previous one.
pub fn pages(c: &BigradedComplex) -> Result<Vec<Page>> {
    c.validate()?;
    let last = stabilization_page(c);
    let mut out: Vec<Page> = Vec::new();
    for r in 0..=last {
        let pg = page_unchecked(c, r)?;
        if let Some(prev) = out.last() {
            let iterated = next_page_dims(prev);
            if iterated != pg.dims {
                return Err(Error::InternalConsistency(format!(
                    "page {r}: quotient formula {:?} differs from iterated homology {iterated:?}",
                    pg.dims
                )));
            }
            if pg
                .dims
                .iter()
                .flatten()
                .zip(prev.dims.iter().flatten())
                .any(|(x, y)| x > y)
            {
                return Err(Error::InternalConsistency(format!("page {r} grew")));
            }
        }
        out.push(pg);
    }
    Ok(out)
}

/// Result of running the spectral sequence to its limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSequenceReport {
    pub pages: Vec<Page>,
    pub e_infinity: Page,
    /// `dim H^p` of the total complex.
    pub total_cohomology: Vec<usize>,
    /// First page equal to `E_∞`.
    pub degenerates_at: usize,
}

impl SpectralSequenceReport {
    pub fn page(&self, r: usize) -> &Page {
        &self.pages[r.min(self.pages.len() - 1)]
    }
}

/// Runs all pages and asserts `Σ_{a+b=p} dim E_∞^{a,b} = dim H^p`.
pub fn e_infinity(c: &BigradedComplex) -> Result<SpectralSequenceReport> {
    let pages = pages(c)?;
    let e_inf = pages.last().expect("at least one page").clone();
    let total: Vec<usize> = (0..=c.top_degree())
        .map(|p| c.total_cohomology_unchecked(p))
        .collect();
    for (p, &h) in total.iter().enumerate() {
        if e_inf.total(p) != h {
            return Err(Error::InternalConsistency(format!(
                "E_∞ total {} differs from dim H^{p} = {h}",
                e_inf.total(p)
            )));
        }
    }
    let degenerates_at = pages
        .iter()
        .position(|pg| pg.dims == e_inf.dims)
        .expect("last page matches");
    Ok(SpectralSequenceReport {
        pages,
        e_infinity: e_inf,
        total_cohomology: total,
        degenerates_at,
    })
}
