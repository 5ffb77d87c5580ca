use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::lie::{FiniteSymmetryGroup, NilpotentLieAlgebra};
use crate::numerics::{linalg, Matrix, RationalMatrix};
use crate::scalar::Scalar;
use crate::spectral_sequence::complex::BigradedComplex;
use crate::superconnection::base::BaseModel;
use crate::superconnection::bundle::{from_affine_bundle, Superconnection};
use crate::Rational;

fn small(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    Rational::from_i64(rng.gen_range(lo..=hi))
}

/// Random flat bigraded complex: disjoint basis pairs `x ↦ y` raising the total degree
/// (a complex with `D² = 0` by construction) conjugated by a random filtration-preserving,
/// degree-preserving invertible map, so components `D_[i]` of every length appear.
pub fn random_flat_complex(
    rng: &mut impl Rng,
    max_a: usize,
    max_b: usize,
    max_dim: usize,
) -> Result<BigradedComplex> {
    let na = rng.gen_range(1..=max_a + 1);
    let nb = rng.gen_range(1..=max_b + 1);
    let dims: Vec<Vec<usize>> = (0..na)
        .map(|_| (0..nb).map(|_| rng.gen_range(0..=max_dim)).collect())
        .collect();
    let mut skeleton = BigradedComplex::new(dims.clone())?;
    let top = na + nb - 2;

    // basis vectors of C^p as (a, b, k), in the order used by `parts`
    let basis = |p: usize| -> Vec<(usize, usize, usize)> {
        skeleton_parts(&dims, p)
            .into_iter()
            .flat_map(|(a, b)| (0..dims[a][b]).map(move |k| (a, b, k)))
            .collect()
    };
    let mut used: Vec<Vec<bool>> = (0..=top + 1).map(|p| vec![false; basis(p).len()]).collect();
    let mut d_total: Vec<RationalMatrix> = (0..=top)
        .map(|p| Matrix::zeros(basis(p + 1).len(), basis(p).len()))
        .collect();
    for p in 0..top {
        let src = basis(p);
        let dst = basis(p + 1);
        let mut order: Vec<usize> = (0..src.len()).collect();
        order.shuffle(rng);
        for s in order {
            if used[p][s] || !rng.gen_bool(0.6) {
                continue;
            }
            let (a, _, _) = src[s];
            let options: Vec<usize> = (0..dst.len())
                .filter(|&t| !used[p + 1][t] && dst[t].0 >= a)
                .collect();
            if let Some(&t) = options.choose(rng) {
                used[p][s] = true;
                used[p + 1][t] = true;
                d_total[p][(t, s)] = Rational::from_i64(rng.gen_range(1..=3));
            }
        }
    }

    // P: block lower-triangular in the filtration within each total degree
    let conj: Vec<(RationalMatrix, RationalMatrix)> = (0..=top)
        .map(|p| {
            let b = basis(p);
            let n = b.len();
            let mut m = Matrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    let (ai, aj) = (b[i].0, b[j].0);
                    let same_block = ai == aj && i != j;
                    if (ai > aj || same_block) && rng.gen_bool(0.5) {
                        m[(i, j)] = small(rng, -2, 2);
                    }
                }
            }
            // make the diagonal blocks unitriangular so P is invertible
            for i in 0..n {
                for j in i + 1..n {
                    if b[i].0 == b[j].0 {
                        m[(i, j)] = Rational::from_i64(0);
                    }
                }
            }
            let inv = linalg::inverse(&m, 0.0).expect("unitriangular blocks");
            (m, inv)
        })
        .collect();
    for p in 0..top {
        let d = conj[p + 1].0.matmul(&d_total[p])?.matmul(&conj[p].1)?;
        let src = skeleton_parts(&dims, p);
        let dst = skeleton_parts(&dims, p + 1);
        let mut c0 = 0;
        for &(a, b) in &src {
            let mut r0 = 0;
            for &(ta, tb) in &dst {
                let block = d.submatrix(r0..r0 + dims[ta][tb], c0..c0 + dims[a][b]);
                if ta >= a && tb + (ta - a) == b + 1 && !block.is_zero() {
                    skeleton.set(ta - a, a, b, block)?;
                }
                r0 += dims[ta][tb];
            }
            c0 += dims[a][b];
        }
    }
    skeleton.validate()?;
    Ok(skeleton)
}

fn skeleton_parts(dims: &[Vec<usize>], p: usize) -> Vec<(usize, usize)> {
    let nb = dims[0].len();
    (0..dims.len().min(p + 1))
        .filter(|a| p - a < nb)
        .map(|a| (a, p - a))
        .collect()
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> RationalMatrix {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| small(rng, -2, 2));
        if !num_traits::Zero::is_zero(&linalg::det(&m).expect("square")) {
            return m;
        }
    }
}

/// Random flat bundle over a circle: an abelian or Heisenberg fiber with monodromy the
/// pullback by a random automorphism. Returns a label and the rational superconnection.
pub fn random_circle_model(
    rng: &mut impl Rng,
    resolution: usize,
) -> Result<(String, Superconnection<Rational>)> {
    let kind = rng.gen_range(0..4);
    let (name, alg, g) = match kind {
        0..=2 => {
            let n = kind + 1;
            (
                format!("abelian:{n}"),
                NilpotentLieAlgebra::<Rational>::abelian(n),
                random_invertible(rng, n),
            )
        }
        _ => {
            let a = random_invertible(rng, 2);
            let det = linalg::det(&a)?;
            let mut g = Matrix::zeros(3, 3);
            g.set_block(0, 0, &a);
            g[(2, 0)] = small(rng, -2, 2);
            g[(2, 1)] = small(rng, -2, 2);
            g[(2, 2)] = det;
            (
                "heisenberg:3".to_string(),
                NilpotentLieAlgebra::<Rational>::heisenberg(3)?,
                g,
            )
        }
    };
    let n = alg.dim();
    // pullback by an automorphism acts on 𝔫* by the transpose
    let action = g.transpose();
    let sc = from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(n),
        &BaseModel::circle(resolution, 1.0),
        &[action],
        None,
        0.0,
    )?;
    Ok((name, sc))
}
