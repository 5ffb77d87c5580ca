use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, SparseMatrix};
use crate::scalar::Scalar;
use crate::superconnection::base::Grid;
use crate::superconnection::bundle::Superconnection;

/// Cochains `C^{a,b} = C^a(grid) ⊗ E^b`, entry `cell · r_b + fiber`.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainLayout {
    pub grid: Grid,
    pub ranks: Vec<usize>,
}

impl CochainLayout {
    pub fn new(grid: Grid, ranks: Vec<usize>) -> Self {
        CochainLayout { grid, ranks }
    }

    pub fn dim(&self, a: usize, b: usize) -> usize {
        if b >= self.ranks.len() {
            return 0;
        }
        self.grid.cells(a) * self.ranks[b]
    }

    pub fn top_degree(&self) -> usize {
        self.grid.dim + self.ranks.len() - 1
    }

    /// Bidegrees `(a, b)` with `a + b = p`, ordered by `a`, with their offsets.
    pub fn parts(&self, p: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for a in 0..=self.grid.dim.min(p) {
            let b = p - a;
            if b < self.ranks.len() {
                out.push((a, b, off));
                off += self.dim(a, b);
            }
        }
        out
    }

    pub fn degree_dim(&self, p: usize) -> usize {
        self.parts(p).iter().map(|&(a, b, _)| self.dim(a, b)).sum()
    }
}

/// Diagonal block `b` of a grading-preserving matrix.
pub fn diag_block<S: Scalar>(ranks: &[usize], m: &Matrix<S>, b: usize) -> Matrix<S> {
    let off: usize = ranks[..b].iter().sum();
    m.submatrix(off..off + ranks[b], off..off + ranks[b])
}

fn off_block<S: Scalar>(ranks: &[usize], m: &Matrix<S>, out: usize, inn: usize) -> Matrix<S> {
    let ro: usize = ranks[..out].iter().sum();
    let ci: usize = ranks[..inn].iter().sum();
    m.submatrix(ro..ro + ranks[out], ci..ci + ranks[inn])
}

fn push_block<S: Scalar>(
    trip: &mut Vec<(usize, usize, S)>,
    row_cell: usize,
    col_cell: usize,
    m: &Matrix<S>,
) {
    let (r, c) = m.shape();
    for i in 0..r {
        for j in 0..c {
            if !m[(i, j)].is_zero() {
                trip.push((row_cell * r + i, col_cell * c + j, m[(i, j)].clone()));
            }
        }
    }
}

/// Twisted coboundary `C^a(grid; E^b) → C^{a+1}(grid; E^b)`, where crossing the
/// seam in direction `g` applies `transport[g]` (sections satisfy `f(x + L_g) = Φ_g f(x)`).
pub fn twisted_coboundary<S: Scalar>(
    grid: &Grid,
    a: usize,
    transport: &[Matrix<S>],
    r: usize,
) -> SparseMatrix<S> {
    let id = Matrix::<S>::identity(r);
    let neg = id.scale(&-S::one());
    let [nx, ny] = grid.n;
    let v = grid.vertices();
    let rows = grid.cells(a + 1) * r;
    let cols = grid.cells(a) * r;
    let mut trip = Vec::new();
    let shift = |g: usize, wraps: bool| -> Matrix<S> {
        if wraps {
            transport[g].clone()
        } else {
            id.clone()
        }
    };
    match (grid.dim, a) {
        (1, 0) => {
            for i in 0..nx {
                push_block(&mut trip, i, (i + 1) % nx, &shift(0, i + 1 == nx));
                push_block(&mut trip, i, i, &neg);
            }
        }
        (2, 0) => {
            for j in 0..ny {
                for i in 0..nx {
                    let c = i + nx * j;
                    push_block(&mut trip, c, (i + 1) % nx + nx * j, &shift(0, i + 1 == nx));
                    push_block(&mut trip, c, c, &neg);
                    push_block(
                        &mut trip,
                        v + c,
                        i + nx * ((j + 1) % ny),
                        &shift(1, j + 1 == ny),
                    );
                    push_block(&mut trip, v + c, c, &neg);
                }
            }
        }
        (2, 1) => {
            for j in 0..ny {
                for i in 0..nx {
                    let c = i + nx * j;
                    push_block(&mut trip, c, c, &id);
                    push_block(
                        &mut trip,
                        c,
                        v + (i + 1) % nx + nx * j,
                        &shift(0, i + 1 == nx),
                    );
                    push_block(
                        &mut trip,
                        c,
                        i + nx * ((j + 1) % ny),
                        &shift(1, j + 1 == ny).scale(&-S::one()),
                    );
                    push_block(&mut trip, c, v + c, &neg);
                }
            }
        }
        _ => {}
    }
    SparseMatrix::from_triplets(rows, cols, trip)
}

/// Bigraded components `D_[i] : C^{a,b} → C^{a+i, b+1-i}`, keyed by `(i, a, b)`.
/// `transport` holds one full `E` matrix per base loop.
pub fn bigraded_blocks<S: Scalar>(
    sc: &Superconnection<S>,
    grid: &Grid,
    transport: &[Matrix<S>],
) -> Result<BTreeMap<(usize, usize, usize), SparseMatrix<S>>> {
    if transport.len() != grid.dim {
        return Err(Error::mismatch(grid.dim, transport.len()));
    }
    let layout = CochainLayout::new(grid.clone(), sc.ranks.clone());
    let m = sc.ranks.len();
    let mut out = BTreeMap::new();
    for a in 0..=grid.dim {
        let cells = grid.cells(a);
        let sign = if a % 2 == 0 { S::one() } else { -S::one() };
        for b in 0..m {
            if b + 1 < m {
                let k0 = off_block(&sc.ranks, &sc.a0, b + 1, b).scale(&sign);
                let mut trip = Vec::new();
                for c in 0..cells {
                    push_block(&mut trip, c, c, &k0);
                }
                out.insert(
                    (0, a, b),
                    SparseMatrix::from_triplets(layout.dim(a, b + 1), layout.dim(a, b), trip),
                );
            }
            if a < grid.dim {
                let t: Vec<Matrix<S>> = transport
                    .iter()
                    .map(|g| diag_block(&sc.ranks, g, b))
                    .collect();
                out.insert((1, a, b), twisted_coboundary(grid, a, &t, sc.ranks[b]));
            }
            if grid.dim == 2 && a == 0 && b >= 1 && !sc.tau.is_zero() {
                let k2 = off_block(&sc.ranks, &sc.a2, b - 1, b)
                    .scale(&(sc.tau.clone() * S::from_f64(grid.cell_area())));
                let mut trip = Vec::new();
                for c in 0..cells {
                    push_block(&mut trip, c, c, &k2);
                }
                out.insert(
                    (2, 0, b),
                    SparseMatrix::from_triplets(layout.dim(2, b - 1), layout.dim(0, b), trip),
                );
            }
        }
    }
    Ok(out)
}

/// Total differential `C^p → C^{p+1}` assembled from the bigraded components.
pub fn total_differential<S: Scalar>(
    layout: &CochainLayout,
    blocks: &BTreeMap<(usize, usize, usize), SparseMatrix<S>>,
    p: usize,
) -> SparseMatrix<S> {
    let src = layout.parts(p);
    let dst = layout.parts(p + 1);
    let mut trip = Vec::new();
    for &(a, b, col_off) in &src {
        for i in 0..=2usize {
            if b + 1 < i {
                continue;
            }
            let Some(block) = blocks.get(&(i, a, b)) else {
                continue;
            };
            let (ta, tb) = (a + i, b + 1 - i);
            let Some(&(_, _, row_off)) = dst.iter().find(|&&(x, y, _)| x == ta && y == tb) else {
                continue;
            };
            trip.extend(
                block
                    .triplets()
                    .map(|(r, c, v)| (row_off + r, col_off + c, v.clone())),
            );
        }
    }
    SparseMatrix::from_triplets(layout.degree_dim(p + 1), layout.degree_dim(p), trip)
}

/// All total differentials `D_p` for `p = 0..top_degree`.
pub fn total_differentials<S: Scalar>(
    sc: &Superconnection<S>,
    grid: &Grid,
    transport: &[Matrix<S>],
) -> Result<Vec<SparseMatrix<S>>> {
    let layout = CochainLayout::new(grid.clone(), sc.ranks.clone());
    let blocks = bigraded_blocks(sc, grid, transport)?;
    Ok((0..=layout.top_degree())
        .map(|p| total_differential(&layout, &blocks, p))
        .collect())
}
