use std::f64::consts::PI;

use collapse_core::lie::{FiniteSymmetryGroup, NilpotentLieAlgebra};
use collapse_core::numerics::{gen_sym_eig, rank_exact, Matrix};
use collapse_core::superconnection::laplacian::SolverPath;
use collapse_core::superconnection::perturbation::is_decreasing_trend;
use collapse_core::superconnection::*;
use collapse_core::{Error, Rational, Scalar, SmallEigenvalueRule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rank1_circle(n: usize, mu: f64) -> Superconnection<f64> {
    Superconnection {
        base: BaseModel::circle(n, 1.0),
        ranks: vec![1],
        monodromy: vec![Matrix::from_diagonal(&[mu])],
        a0: Matrix::zeros(1, 1),
        a2: Matrix::zeros(1, 1),
        tau: 0.0,
    }
}

fn torus_fiber_over_circle(n: usize, action: [[i64; 2]; 2]) -> Superconnection<Rational> {
    let alg = NilpotentLieAlgebra::<Rational>::abelian(2);
    let act = Matrix::from_i64_rows(&[&action[0], &action[1]]);
    from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(2),
        &BaseModel::circle(n, 1.0),
        &[act],
        None,
        0.0,
    )
    .unwrap()
}

fn heisenberg_torus(res: usize, tau: f64) -> Superconnection<f64> {
    let alg = NilpotentLieAlgebra::<f64>::abelian(1);
    let t = CurvatureForm {
        tau,
        vector: vec![1.0],
    };
    let id = Matrix::identity(1);
    from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(1),
        &BaseModel::torus2(res, 1.0, 1.0),
        &[id.clone(), id],
        Some(&t),
        1e-12,
    )
    .unwrap()
}

fn heisenberg_over_circle(n: usize) -> Superconnection<f64> {
    let alg = NilpotentLieAlgebra::<f64>::heisenberg(3).unwrap();
    from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(3),
        &BaseModel::circle(n, 1.0),
        &[Matrix::identity(3)],
        None,
        1e-12,
    )
    .unwrap()
}

#[test]
fn flat_circle_matches_discrete_fourier_symbol() {
    let n = 64;
    let sc = rank1_circle(n, 1.0);
    let eigs = eigenvalues(&sc, &MetricField::harmonic(), 0, None).unwrap();
    let mut oracle: Vec<f64> = (0..n)
        .map(|k| (2.0 * n as f64 * (PI * k as f64 / n as f64).sin()).powi(2))
        .collect();
    oracle.sort_by(f64::total_cmp);
    for (a, b) in eigs.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-8 * b.max(1.0), "{a} vs {b}");
    }
    // continuum limit (2πk)²
    assert!((eigs[1] - 4.0 * PI * PI).abs() / (4.0 * PI * PI) < 1e-3);
    let report = spectrum(
        &sc,
        &MetricField::harmonic(),
        0,
        Some(6),
        &SmallEigenvalueRule::default(),
    )
    .unwrap();
    assert_eq!(report.small_count, 1);
}

#[test]
fn twisted_line_bundle_closed_form() {
    let mu: f64 = 2.0;
    let sc = rank1_circle(256, mu);
    let eigs = eigenvalues(&sc, &MetricField::harmonic(), 0, None).unwrap();
    let l = mu.ln();
    assert!((eigs[0] - l * l).abs() < 1e-5, "{}", eigs[0]);
    for k in [1.0, 2.0] {
        let want = (2.0 * PI * k).powi(2) + l * l;
        let close = eigs
            .iter()
            .filter(|v| ((*v - want) / want).abs() < 2e-3)
            .count();
        assert_eq!(close, 2, "k = {k}");
    }
}

#[test]
fn twisted_line_error_is_second_order() {
    let mu = (3.0 + 5f64.sqrt()) / 2.0;
    let low: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| eigenvalues(&rank1_circle(n, mu), &MetricField::harmonic(), 0, None).unwrap()[0])
        .collect();
    let slope = ((low[0] - low[1]) / (low[1] - low[2])).log2();
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn sol_monodromy_has_no_small_positive_eigenvalue() {
    let sc = torus_fiber_over_circle(128, [[2, 1], [1, 1]]).to_f64();
    let report = spectrum(
        &sc,
        &MetricField::harmonic(),
        1,
        Some(8),
        &SmallEigenvalueRule::default(),
    )
    .unwrap();
    let want = ((3.0 + 5f64.sqrt()) / 2.0).ln().powi(2);
    assert!(
        (report.eigenvalues[1] - want).abs() < 1e-3,
        "{:?}",
        report.eigenvalues
    );
    assert!((report.eigenvalues[2] - want).abs() < 1e-3);
    assert_eq!(report.small_count, 1);
    assert!((want - 0.9262).abs() < 1e-4);
}

#[test]
fn unipotent_monodromy_gives_three_small_eigenvalues() {
    let sc = torus_fiber_over_circle(64, [[1, 0], [0, 1]]);
    assert_eq!(sc.ranks, vec![1, 2, 1]);
    let alg = NilpotentLieAlgebra::<f64>::abelian(2);
    let t = 1e-3;
    let act = Matrix::from_rows(&[vec![1.0, t], vec![0.0, 1.0]]).unwrap();
    let sc = from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(2),
        &BaseModel::circle(64, 1.0),
        &[act],
        None,
        1e-12,
    )
    .unwrap();
    let report = spectrum(
        &sc,
        &MetricField::harmonic(),
        1,
        Some(10),
        &SmallEigenvalueRule::default(),
    )
    .unwrap();
    let e = &report.eigenvalues;
    assert!(e[0].abs() <= 1e-10 && e[1].abs() <= 1e-10, "{e:?}");
    assert!(e[2] > 1e-12 && e[2] < 1e-4, "{e:?}");
    assert!(e[3] > 0.5);
    assert_eq!(report.small_count, 3);
    assert_eq!(report.kernel_count, 2);
}

#[test]
fn heisenberg_torus_spectrum_and_paths_agree() {
    let tau = 0.3;
    let sc = heisenberg_torus(16, tau);
    let dense = eigenvalues(&sc, &MetricField::harmonic(), 1, Some(SolverPath::Dense)).unwrap();
    let bloch = eigenvalues(&sc, &MetricField::harmonic(), 1, Some(SolverPath::Bloch)).unwrap();
    assert_eq!(dense.len(), bloch.len());
    for (a, b) in dense.iter().zip(&bloch) {
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "{a} vs {b}");
    }
    assert!(dense[0].abs() < 1e-10 && dense[1].abs() < 1e-10);
    assert!((dense[2] - tau * tau).abs() < 1e-12, "{}", dense[2]);
    assert!(dense[3] > 30.0);
}

#[test]
fn heisenberg_torus_flatness_terms_vanish_separately() {
    let sc = heisenberg_torus(8, 0.5);
    let r = sc.check_flatness();
    assert_eq!(r.connection_curvature, 0.0);
    assert_eq!(r.anticommutator, 0.0);
    assert!(sc.a0.is_zero());
    assert!(r.passes(1e-12));
}

#[test]
fn flatness_violation_names_the_identity() {
    let mut sc = heisenberg_torus(8, 0.5);
    // a2 that does not commute with the monodromy
    sc.monodromy[0] = Matrix::from_diagonal(&[1.0, 2.0]);
    let r = sc.check_flatness();
    assert_eq!(r.first_failure(1e-12).map(|f| f.0), Some(3));
    match sc.validate(1e-12) {
        Err(Error::FlatnessViolation { identity, .. }) => assert_eq!(identity, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn heisenberg_fiber_over_circle_construction() {
    let sc = heisenberg_over_circle(8);
    assert_eq!(sc.ranks, vec![1, 3, 3, 1]);
    assert!(!sc.a0.is_zero());
    assert!(sc.a2.is_zero());
    assert!(sc.check_flatness().violations().iter().all(|v| *v <= 1e-12));
}

#[test]
fn reference_metric_rejects_non_isometric_monodromy() {
    let sc = torus_fiber_over_circle(8, [[1, 1], [0, 1]]).to_f64();
    let err = MetricField::reference().prepare(&sc).unwrap_err();
    assert!(matches!(err, Error::MetricNotEquivariant(_)), "{err:?}");
    assert!(MetricField::harmonic().prepare(&sc).is_ok());
}

#[test]
fn galerkin_pair_matches_reduced_operator() {
    let sc = torus_fiber_over_circle(8, [[1, 1], [0, 1]]).to_f64();
    let metric = MetricField::harmonic().with_modes([ConformalMode {
        degree: Some(1),
        amplitude: 0.2,
        kx: 1,
        ky: 0,
        phase: 0.3,
    }]);
    for p in 0..=3 {
        let g = laplacian(&sc, &metric, p).unwrap();
        assert!(g.stiffness.asymmetry() <= 1e-10 * g.stiffness.max_abs().max(1.0));
        let direct = gen_sym_eig(&g.stiffness, &g.mass.to_dense(), 1e-9)
            .unwrap()
            .eigenvalues;
        let reduced = eigenvalues(&sc, &metric, p, None).unwrap();
        for (a, b) in direct.iter().zip(&reduced) {
            assert!(
                (a - b).abs() <= 1e-8 * a.abs().max(1.0),
                "p={p}: {a} vs {b}"
            );
        }
        assert!(reduced.iter().all(|v| *v >= -1e-9));
    }
}

/// dim H^p of the twisted cochain complex on the minimal grid, by exact ranks.
fn cohomology_oracle(sc: &Superconnection<Rational>) -> Vec<usize> {
    let grid = sc.base.minimal_grid();
    let d = total_differentials(sc, &grid, &sc.monodromy).unwrap();
    (0..d.len())
        .map(|p| {
            let rank_out = rank_exact(&d[p].to_dense());
            let rank_in = if p > 0 {
                rank_exact(&d[p - 1].to_dense())
            } else {
                0
            };
            d[p].ncols() - rank_out - rank_in
        })
        .collect()
}

#[test]
fn kernel_counts_match_cohomology() {
    let cases = [
        (
            torus_fiber_over_circle(16, [[1, 1], [0, 1]]),
            vec![1, 2, 2, 1],
        ),
        (
            torus_fiber_over_circle(16, [[2, 1], [1, 1]]),
            vec![1, 1, 1, 1],
        ),
        (
            torus_fiber_over_circle(16, [[1, 0], [0, 1]]),
            vec![1, 3, 3, 1],
        ),
    ];
    for (sc, betti) in cases {
        assert_eq!(cohomology_oracle(&sc), betti);
        let f = sc.to_f64();
        for (p, &b) in betti.iter().enumerate() {
            let eigs = eigenvalues(&f, &MetricField::harmonic(), p, None).unwrap();
            let kernel = eigs.iter().filter(|v| v.abs() < 1e-9).count();
            assert_eq!(kernel, b, "p = {p}: {:?}", &eigs[..b + 1]);
        }
    }
}

#[test]
fn heisenberg_torus_cohomology_is_heisenberg_manifold() {
    let alg = NilpotentLieAlgebra::<Rational>::abelian(1);
    let t = CurvatureForm {
        tau: Rational::from_i64(1),
        vector: vec![Rational::from_i64(1)],
    };
    let id = Matrix::identity(1);
    let sc = from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(1),
        &BaseModel::torus2(8, 1.0, 1.0),
        &[id.clone(), id],
        Some(&t),
        0.0,
    )
    .unwrap();
    assert_eq!(cohomology_oracle(&sc), vec![1, 2, 2, 1]);
}

#[test]
fn total_differential_squares_to_zero_on_fine_grids() {
    for sc in [
        torus_fiber_over_circle(8, [[1, 1], [0, 1]]),
        torus_fiber_over_circle(8, [[2, 1], [1, 1]]),
    ] {
        let d = total_differentials(&sc, &sc.base.grid(), &sc.monodromy).unwrap();
        for w in d.windows(2) {
            assert!(w[1].matmul(&w[0]).unwrap().is_zero());
        }
    }
    let sc = heisenberg_torus(8, 0.7);
    let d = total_differentials(&sc, &sc.base.grid(), &sc.monodromy).unwrap();
    for w in d.windows(2) {
        assert!(w[1].matmul(&w[0]).unwrap().max_abs() < 1e-14);
    }
}

#[test]
fn degree_blocks_have_expected_shapes() {
    let sc = torus_fiber_over_circle(8, [[1, 1], [0, 1]]).to_f64();
    let layout = CochainLayout::new(sc.base.grid(), sc.ranks.clone());
    assert_eq!(layout.parts(1), vec![(0, 1, 0), (1, 0, 16)]);
    assert_eq!(
        (0..=3).map(|p| layout.degree_dim(p)).collect::<Vec<_>>(),
        vec![8, 24, 24, 8]
    );
    let d = total_differentials(&sc, &sc.base.grid(), &sc.monodromy).unwrap();
    assert_eq!(
        d.iter().map(|m| (m.nrows(), m.ncols())).collect::<Vec<_>>(),
        vec![(24, 8), (24, 24), (8, 24), (0, 8)]
    );
}

#[test]
fn epsilon_closeness_examples() {
    let e = std::f64::consts::E;
    assert!(epsilon_close(&[1.0, 2.0], &[1.0, 2.0], 0.0).unwrap());
    assert!(epsilon_close(&[e, 2.0 * e], &[1.0, 2.0], 1.0 + 1e-12).unwrap());
    assert!(!epsilon_close(&[e, 2.0 * e], &[1.0, 2.0], 0.5).unwrap());
    assert!(!epsilon_close(&[0.0], &[1.0], 1e6).unwrap());
    assert!(epsilon_close(&[0.0], &[0.0], 0.0).unwrap());
    assert!(epsilon_close(&[1.0], &[1.0, 2.0], 1.0).is_err());
    assert_eq!(
        spectral_distance(&[0.0, 1.0], &[0.0, 1.0], 1e-12).unwrap(),
        0.0
    );
    assert_eq!(
        spectral_distance(&[0.0, 1.0], &[0.5, 1.0], 1e-12).unwrap(),
        f64::INFINITY
    );
}

#[test]
fn perturbation_identical_and_heisenberg_torus() {
    let sc = heisenberg_torus(8, 0.4);
    let r = perturbation_check(&sc, &sc, &MetricField::harmonic(), 1, None).unwrap();
    assert_eq!(r.max_sqrt_gap, 0.0);
    assert!(r.holds);
    let other = heisenberg_torus(8, 0.1);
    let r = perturbation_check(&sc, &other, &MetricField::harmonic(), 1, None).unwrap();
    assert!(r.holds && r.max_ratio <= 1.0, "{r:?}");
    assert!((r.difference_norm - 0.3).abs() < 1e-9, "{r:?}");
}

#[test]
fn perturbation_bound_random_a0() {
    let base = heisenberg_over_circle(8);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let mut other = base.clone();
        for b in 0..3 {
            let (r0, c0) = (other.offset(b + 1), other.offset(b));
            for i in 0..other.ranks[b + 1] {
                for j in 0..other.ranks[b] {
                    other.a0[(r0 + i, c0 + j)] += rng.gen_range(-0.5..0.5);
                }
            }
        }
        for p in 0..=4 {
            let r = perturbation_check(&base, &other, &MetricField::harmonic(), p, None).unwrap();
            assert!(r.holds, "p = {p}: {r:?}");
        }
    }
}

#[test]
fn metric_continuity_trend() {
    let sc = torus_fiber_over_circle(16, [[1, 1], [0, 1]]).to_f64();
    let h = MetricField::harmonic();
    let same = metric_continuity_check(&sc, &h, &h, 1, 6, 1e-9).unwrap();
    assert_eq!(same.spectral_eps, 0.0);
    let scaled = metric_continuity_check(&sc, &h, &h.clone().scaled(0.1), 1, 6, 1e-9).unwrap();
    assert!((scaled.metric_eps - 0.1).abs() < 1e-12);
    assert!(scaled.spectral_eps.is_finite());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape: Vec<ConformalMode> = (0..3)
        .map(|b| ConformalMode {
            degree: Some(b),
            amplitude: rng.gen_range(-1.0..1.0),
            kx: rng.gen_range(0..3),
            ky: 0,
            phase: rng.gen_range(0.0..6.0),
        })
        .collect();
    let reports: Vec<_> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let modes = shape.iter().map(|m| ConformalMode {
                amplitude: m.amplitude * eps,
                ..m.clone()
            });
            metric_continuity_check(&sc, &h, &h.clone().with_modes(modes), 1, 6, 1e-9).unwrap()
        })
        .collect();
    assert!(is_decreasing_trend(&reports), "{reports:?}");
}

#[test]
fn bundle_json_builds_and_round_trips() {
    let text = r#"{
        "base": {"kind": "torus2", "resolution": 8, "circumferences": [1.0, 1.0]},
        "algebra": {"preset": "abelian:1"},
        "a2": "interior:T", "T": ["1"], "tau": "1/2"
    }"#;
    let spec = BundleSpec::from_json(text).unwrap();
    let sc = spec.build().unwrap();
    assert_eq!(sc.ranks, vec![1, 1]);
    assert_eq!(sc.tau, Rational::new(1.into(), 2.into()));
    let again = BundleSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(again, spec);

    let explicit = r#"{
        "base": {"kind": "circle", "resolution": 16, "circumferences": [1]},
        "ranks": [1, 2],
        "monodromy": [[["1","0","0"],["0","1","1"],["0","0","1"]]]
    }"#;
    let sc = BundleSpec::from_json(explicit).unwrap().build().unwrap();
    assert_eq!(sc.fiber_dim(), 3);

    let bad =
        r#"{"base": {"kind": "circle", "resolution": 4, "circumferences": [1]}, "ranks": [1]}"#;
    assert!(BundleSpec::from_json(bad)
        .unwrap()
        .build()
        .unwrap_err()
        .is_validation());
}

#[test]
fn point_base_matches_invariant_laplacian() {
    let alg = NilpotentLieAlgebra::<f64>::heisenberg(3).unwrap();
    let sc = from_affine_bundle(
        &alg,
        &FiniteSymmetryGroup::trivial(3),
        &BaseModel::point(),
        &[],
        None,
        1e-12,
    )
    .unwrap();
    let r = spectrum(
        &sc,
        &MetricField::harmonic(),
        1,
        None,
        &SmallEigenvalueRule::default(),
    )
    .unwrap();
    assert_eq!(r.eigenvalues.len(), 3);
    assert!((r.eigenvalues[2] - 1.0).abs() < 1e-12);
    assert_eq!(r.small_count, 3);
    assert!(r.complete);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn laplacian_is_psd_and_symmetric(a in -2i64..=2, b in -2i64..=2, amp in 0.0f64..0.3) {
        let alg = NilpotentLieAlgebra::<f64>::abelian(2);
        let act = Matrix::from_rows(&[vec![1.0, a as f64], vec![0.0, 1.0]]).unwrap();
        let sc = from_affine_bundle(&alg, &FiniteSymmetryGroup::trivial(2), &BaseModel::circle(8, 1.0 + b as f64 * 0.1 + 0.3), &[act], None, 1e-12).unwrap();
        let metric = MetricField::harmonic().with_modes([ConformalMode { degree: None, amplitude: amp, kx: 1, ky: 0, phase: 0.0 }]);
        for p in 0..=3 {
            let g = laplacian(&sc, &metric, p).unwrap();
            prop_assert!(g.reduced.asymmetry() <= 1e-10 * g.reduced.max_abs().max(1.0));
            let e = eigenvalues(&sc, &metric, p, None).unwrap();
            prop_assert!(e.iter().all(|v| *v >= -1e-9 * e.last().unwrap().max(1.0)));
        }
    }

    #[test]
    fn spectrum_is_gauge_invariant(scale in 0.5f64..2.0) {
        // conjugating the monodromy by a diagonal gauge and pulling back h0 leaves the spectrum fixed
        let phi = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let g = Matrix::from_diagonal(&[1.0, scale]);
        let ginv = Matrix::from_diagonal(&[1.0, 1.0 / scale]);
        let build = |m: Matrix<f64>| Superconnection {
            base: BaseModel::circle(16, 1.0),
            ranks: vec![1, 2],
            monodromy: vec![Matrix::block_diag(&[Matrix::identity(1), m])],
            a0: Matrix::zeros(3, 3),
            a2: Matrix::zeros(3, 3),
            tau: 0.0,
        };
        let a = build(phi.clone());
        let b = build(&(&g * &phi) * &ginv);
        let h0 = &ginv.transpose() * &ginv;
        let pulled = MetricField {
            h0: Some(vec![vec![vec![1.0]], (0..2).map(|i| h0.row(i).to_vec()).collect()]),
            ..MetricField::harmonic()
        };
        let ea = eigenvalues(&a, &MetricField::harmonic(), 1, None).unwrap();
        let eb = eigenvalues(&b, &pulled, 1, None).unwrap();
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }
}
