//! Random valid algebras: library presets conjugated by random rational orthogonal matrices.

use rand::Rng;

use crate::lie::algebra::NilpotentLieAlgebra;
use crate::numerics::{linalg, Matrix};
use crate::scalar::Scalar;
use crate::{Rational, RationalMatrix};

pub const PRESETS: &[&str] = &[
    "abelian:1",
    "abelian:2",
    "abelian:3",
    "abelian:5",
    "heisenberg:3",
    "heisenberg:5",
    "heisenberg:7",
    "filiform:3",
    "filiform:4",
    "filiform:5",
    "filiform:6",
    "filiform:7",
    "heisenberg:3+abelian:1",
    "heisenberg:3+abelian:2",
    "heisenberg:3+heisenberg:3",
    "filiform:4+abelian:1",
    "filiform:4+heisenberg:3",
    "heisenberg:5+abelian:2",
];

pub fn presets_up_to(max_dim: usize) -> Vec<&'static str> {
    PRESETS
        .iter()
        .copied()
        .filter(|p| {
            NilpotentLieAlgebra::<Rational>::preset(p)
                .map(|a| a.dim() <= max_dim)
                .unwrap_or(false)
        })
        .collect()
}

/// Cayley transform `(I − A)(I + A)⁻¹` of a random skew matrix with small integer entries.
pub fn cayley_orthogonal<R: Rng>(rng: &mut R, n: usize) -> RationalMatrix {
    let mut a = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = Rational::new(
                rng.gen_range(-2i64..=2).into(),
                rng.gen_range(1i64..=2).into(),
            );
            a[(i, j)] = v.clone();
            a[(j, i)] = -v;
        }
    }
    let id = Matrix::identity(n);
    let inv = linalg::inverse(&(&id + &a), 0.0).expect("I + A is invertible for skew A");
    &(&id - &a) * &inv
}

pub fn random_conjugated<R: Rng>(
    rng: &mut R,
    max_dim: usize,
) -> (String, NilpotentLieAlgebra<Rational>) {
    let names = presets_up_to(max_dim);
    let name = names[rng.gen_range(0..names.len())];
    let alg = NilpotentLieAlgebra::<Rational>::preset(name).expect("preset");
    let q = cayley_orthogonal(rng, alg.dim());
    (
        name.to_string(),
        alg.change_basis(&q, 0.0)
            .expect("orthogonal change of basis"),
    )
}

pub fn random_real_conjugated<R: Rng>(
    rng: &mut R,
    max_dim: usize,
) -> (String, NilpotentLieAlgebra<f64>) {
    let (name, a) = random_conjugated(rng, max_dim);
    (name, a.map(|v| v.as_f64()))
}
