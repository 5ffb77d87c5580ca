use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{linalg, nullspace_exact, rank_exact, Matrix, RationalMatrix};
use crate::scalar::rational_to_string;
use crate::superconnection::bundle::Superconnection;
use crate::superconnection::cochain::diag_block;
use crate::Rational;

fn minus_identity(m: &RationalMatrix) -> RationalMatrix {
    m - &Matrix::identity(m.rows())
}

fn check_invertible(m: &RationalMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "monodromy must be square, got {:?}",
            m.shape()
        )));
    }
    if m.rows() > 0 && linalg::det(m)?.is_zero() {
        return Err(Error::InvalidInput("singular monodromy".into()));
    }
    Ok(())
}

/// `dim ker(Φ^p − I) + dim coker(Φ^{p-1} − I)` for the monodromies `Φ^q` on `H^q` of the fiber.
pub fn leray_circle(phi: &[RationalMatrix], p: usize) -> Result<usize> {
    for m in phi {
        check_invertible(m)?;
    }
    let kernel = |m: &RationalMatrix| m.rows() - rank_exact(&minus_identity(m));
    let mut total = 0;
    if let Some(m) = phi.get(p) {
        total += kernel(m);
    }
    if p >= 1 {
        if let Some(m) = phi.get(p - 1) {
            // square, so the cokernel has the kernel's dimension
            total += kernel(m);
        }
    }
    Ok(total)
}

/// Representatives (columns) of `ker d_b / im d_{b-1}` inside `E^b`, and a column basis of the image.
fn cohomology_representatives(
    d_out: &RationalMatrix,
    d_in: Option<&RationalMatrix>,
) -> (RationalMatrix, RationalMatrix) {
    let n = d_out.cols();
    let cycles = nullspace_exact(d_out);
    let boundaries = match d_in {
        Some(d) if d.cols() > 0 => linalg::row_basis(&d.transpose(), 0.0).transpose(),
        _ => Matrix::zeros(n, 0),
    };
    let mut chosen = boundaries.clone();
    let mut reps: Vec<usize> = Vec::new();
    for j in 0..cycles.cols() {
        let trial = Matrix::hstack(&[&chosen, &cycles.select_cols(&[j])], n).expect("same height");
        if rank_exact(&trial) > chosen.cols() {
            chosen = trial;
            reps.push(j);
        }
    }
    (cycles.select_cols(&reps), boundaries)
}

/// Matrix of the map induced by `phi[b]` on `H^b` of the complex `(E, d)`.
/// `d[b] : E^b → E^{b+1}` for `b = 0..m-1` and `phi[b]` acts on `E^b`; the maps must commute.
pub fn induced_on_cohomology(
    d: &[RationalMatrix],
    phi: &[RationalMatrix],
) -> Result<Vec<RationalMatrix>> {
    let m = phi.len();
    let mut out = Vec::new();
    for b in 0..m {
        let n = phi[b].rows();
        let d_out = if b < d.len() {
            d[b].clone()
        } else {
            Matrix::zeros(0, n)
        };
        let d_in = if b > 0 { d.get(b - 1) } else { None };
        let (reps, boundaries) = cohomology_representatives(&d_out, d_in);
        let k = reps.cols();
        if k == 0 {
            out.push(Matrix::zeros(0, 0));
            continue;
        }
        let basis = Matrix::hstack(&[&boundaries, &reps], n)?;
        let image = phi[b].matmul(&reps)?;
        let coords = linalg::coordinates(&basis, &image, 0.0)?;
        if &basis.matmul(&coords)? != &image {
            return Err(Error::InvalidInput(format!(
                "monodromy does not preserve the cocycles in degree {b}"
            )));
        }
        out.push(coords.submatrix(boundaries.cols()..basis.cols(), 0..k));
    }
    Ok(out)
}

/// Per base loop, the monodromy induced on the fiber cohomology `H^b(E, A′_[0])`.
pub fn fiber_cohomology_monodromy(
    sc: &Superconnection<Rational>,
) -> Result<Vec<Vec<RationalMatrix>>> {
    let m = sc.ranks.len();
    let d: Vec<RationalMatrix> = (0..m.saturating_sub(1))
        .map(|b| sc.block(&sc.a0, b + 1, b))
        .collect();
    sc.monodromy
        .iter()
        .map(|g| {
            let phi: Vec<RationalMatrix> = (0..m).map(|b| diag_block(&sc.ranks, g, b)).collect();
            induced_on_cohomology(&d, &phi)
        })
        .collect()
}

/// Dimensions of the fiber cohomology `H^b(E, A′_[0])`.
pub fn fiber_betti(sc: &Superconnection<Rational>) -> Vec<usize> {
    let m = sc.ranks.len();
    (0..m)
        .map(|b| {
            let out = if b + 1 < m {
                rank_exact(&sc.block(&sc.a0, b + 1, b))
            } else {
                0
            };
            let inc = if b > 0 {
                rank_exact(&sc.block(&sc.a0, b, b - 1))
            } else {
                0
            };
            sc.ranks[b] - out - inc
        })
        .collect()
}

/// Polynomial with rational coefficients, lowest degree first.
pub type Polynomial = Vec<Rational>;

fn trim(mut p: Polynomial) -> Polynomial {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
            .collect(),
    )
}

fn remainder(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut r = trim(a.clone());
    let b = trim(b.clone());
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().expect("nonempty").clone() / lead.clone();
        for (k, c) in b.iter().enumerate() {
            r[shift + k] = r[shift + k].clone() - f.clone() * c.clone();
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Monic greatest common divisor.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !y.is_empty() {
        let r = remainder(&x, &y);
        x = y;
        y = r;
    }
    match x.last().cloned() {
        Some(l) => x.into_iter().map(|c| c / l.clone()).collect(),
        None => x,
    }
}

/// Monic minimal polynomial, from the first linear dependency among `I, Φ, Φ², …`.
pub fn minimal_polynomial(phi: &RationalMatrix) -> Result<Polynomial> {
    if !phi.is_square() {
        return Err(Error::InvalidInput(
            "minimal polynomial of a non-square matrix".into(),
        ));
    }
    let n = phi.rows();
    let mut powers = vec![Matrix::identity(n)];
    loop {
        let k = powers.len();
        let cols: Vec<&[Rational]> = powers.iter().map(|m| m.data()).collect();
        let krylov = Matrix::from_fn(n * n, k, |i, j| cols[j][i].clone());
        let null = nullspace_exact(&krylov);
        if null.cols() > 0 {
            let v = null.col(0);
            let lead = v[k - 1].clone();
            return Ok(v.into_iter().map(|c| c / lead.clone()).collect());
        }
        let next = powers[k - 1].matmul(phi)?;
        powers.push(next);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanReport {
    /// A Jordan block of size > 1 at eigenvalue 1.
    pub has_unipotent_block: bool,
    /// Minimal polynomial squarefree over ℚ.
    pub semisimple: bool,
    pub minimal_polynomial: Vec<String>,
}

pub fn unipotent_factor(phi: &RationalMatrix) -> Result<JordanReport> {
    check_invertible(phi)?;
    let n = phi.rows();
    let u = minus_identity(phi);
    let k1 = n - rank_exact(&u);
    let k2 = n - rank_exact(&u.matmul(&u)?);
    let m = minimal_polynomial(phi)?;
    let g = gcd(&m, &derivative(&m));
    Ok(JordanReport {
        has_unipotent_block: k1 < k2,
        semisimple: g.len() <= 1,
        minimal_polynomial: m.iter().map(rational_to_string).collect(),
    })
}

/// True when every matrix has a squarefree minimal polynomial.
pub fn all_semisimple(phis: &[RationalMatrix]) -> Result<bool> {
    for p in phis {
        if p.rows() == 0 {
            continue;
        }
        let m = minimal_polynomial(p)?;
        if gcd(&m, &derivative(&m)).len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dimension of the joint generalized 1-eigenspace of commuting matrices.
pub fn joint_unipotent_dim(phis: &[RationalMatrix], n: usize) -> Result<usize> {
    if phis.is_empty() {
        return Ok(n);
    }
    let mut stack = Matrix::zeros(0, n);
    for p in phis {
        let u = minus_identity(p).pow(n.max(1) as u32);
        stack = Matrix::vstack(&[&stack, &u], n)?;
    }
    Ok(n - rank_exact(&stack))
}
