//! Acceptance suite: one line per criterion, nonzero exit when any fails.
//!
//! Run with `cargo test -p collapse-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use collapse_core::lab::log_log_fit;
use collapse_core::lie::curvature::scalar_curvature_exact;
use collapse_core::lie::random::{presets_up_to, random_real_conjugated};
use collapse_core::lie::{
    invariant_laplacian, lower_central_grading, rescaled_spectrum, FiniteSymmetryGroup,
    NilpotentLieAlgebra,
};
use collapse_core::numerics::{nullspace_exact, rank_exact, sym_eig, Matrix};
use collapse_core::spectral_sequence::random::{random_circle_model, random_flat_complex};
use collapse_core::spectral_sequence::{
    e_infinity, fiber_cohomology_monodromy, leray_circle, next_page_dims, page,
    predict_small_count, stabilization_page, BigradedComplex,
};
use collapse_core::superconnection::{
    eigenvalues, from_affine_bundle, perturbation_check, spectrum, BaseModel, CurvatureForm,
    MetricField, Superconnection,
};
use collapse_core::{lab, Rational, RationalMatrix, SmallEigenvalueRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() <= limit, || {
        format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64())
    })
}

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn scalar_curvature_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let trials = 120;
    for _ in 0..trials {
        let (name, alg) = random_real_conjugated(&mut rng, 7);
        ensure(alg.dim() <= 7, || {
            format!("{name} has dimension {}", alg.dim())
        })?;
        let (from_tensor, from_constants) = scalar_curvature_exact(&alg);
        worst = worst.max((from_tensor - from_constants).abs());
    }
    ensure(worst <= 1e-10, || format!("max error {worst:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "{trials} algebras, max error {worst:.1e}, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn heisenberg_kernel_dims() -> Outcome {
    let h3 = NilpotentLieAlgebra::<Rational>::heisenberg(3).map_err(err)?;
    let group = FiniteSymmetryGroup::trivial(3);
    let mut dims = Vec::new();
    for p in 0..=3 {
        let l = invariant_laplacian(&h3, &group, p, 0.0)
            .map_err(err)?
            .to_f64();
        let e = sym_eig(&l, 1e-14).map_err(err)?.eigenvalues;
        dims.push(e.iter().filter(|v| v.abs() < 1e-12).count());
    }
    ensure(dims == [1, 2, 2, 1], || format!("kernel dims {dims:?}"))?;
    Ok(format!("kernel dims {dims:?}"))
}

fn heisenberg_point_rescaling() -> Outcome {
    let h3 = NilpotentLieAlgebra::<Rational>::heisenberg(3).map_err(err)?;
    let group = FiniteSymmetryGroup::trivial(3);
    let grading = lower_central_grading(&h3, 0.0).map_err(err)?;
    let rule = SmallEigenvalueRule::default();
    let point =
        from_affine_bundle(&h3, &group, &BaseModel::point(), &[], None, 0.0).map_err(err)?;
    let predicted = predict_small_count(&point, 1)
        .map_err(err)?
        .predicted_small_count;
    ensure(predicted == 3, || format!("predicted {predicted}"))?;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let s = rescaled_spectrum(&h3, &grading, &group, 1, eps, &rule).map_err(err)?;
        let e = &s.eigenvalues;
        ensure(
            e.len() == 3 && e[0].abs() <= 1e-12 && e[1].abs() <= 1e-12,
            || format!("ε = {eps}: {e:?}"),
        )?;
        ensure((e[2] - eps).abs() <= 1e-12, || {
            format!("ε = {eps}: positive eigenvalue {}", e[2])
        })?;
        ensure(s.small_count == predicted, || {
            format!("ε = {eps}: small_count {}", s.small_count)
        })?;
    }
    Ok("spectrum (0, 0, ε) for all ε, small_count 3 = predicted".into())
}

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

fn twisted_circle_closed_form() -> Outcome {
    let start = Instant::now();
    let mu = (3.0 + 5f64.sqrt()) / 2.0;
    let want = mu.ln().powi(2);
    let mut low = Vec::new();
    for n in [256, 512, 1024] {
        let e =
            eigenvalues(&rank1_circle(n, mu), &MetricField::harmonic(), 0, None).map_err(err)?;
        low.push(e[0]);
    }
    let error = (low[2] - want).abs();
    ensure(error <= 1e-4, || format!("λ₀ = {} vs {want}", low[2]))?;
    let slope = ((low[0] - low[1]) / (low[1] - low[2])).log2();
    ensure((slope - 2.0).abs() <= 0.2, || {
        format!("Richardson slope {slope}")
    })?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "λ₀ = {:.8} (error {error:.1e}), slope {slope:.3}, {:.2} s",
        low[2],
        start.elapsed().as_secs_f64()
    ))
}

fn unipotent_degeneration() -> Outcome {
    let start = Instant::now();
    let alg = NilpotentLieAlgebra::<f64>::abelian(2);
    let rule = SmallEigenvalueRule::default();
    let mut third = Vec::new();
    let mut last = None;
    for t in [1.0, 1e-1, 1e-2, 1e-3] {
        let act = Matrix::from_rows(&[vec![1.0, t], vec![0.0, 1.0]]).map_err(err)?;
        let sc = from_affine_bundle(
            &alg,
            &FiniteSymmetryGroup::trivial(2),
            &BaseModel::circle(64, 1.0),
            &[act],
            None,
            1e-12,
        )
        .map_err(err)?;
        let s = spectrum(&sc, &MetricField::harmonic(), 1, Some(8), &rule).map_err(err)?;
        let e = &s.eigenvalues;
        ensure(e[3] >= 0.5, || {
            format!("t = {t}: fourth eigenvalue {}", e[3])
        })?;
        third.push(e[2]);
        last = Some(s);
    }
    let s = last.expect("sweep is nonempty");
    let e = &s.eigenvalues;
    ensure(e[0].abs() <= 1e-10 && e[1].abs() <= 1e-10, || {
        format!("t = 1e-3: {:?}", &e[..4])
    })?;
    ensure(s.small_count == 3, || {
        format!("t = 1e-3: small_count {}", s.small_count)
    })?;
    ensure(third.windows(2).all(|w| w[1] < w[0]), || {
        format!("third eigenvalue not decreasing: {third:?}")
    })?;
    within(start.elapsed(), 30.0)?;
    let third: Vec<String> = third.iter().map(|v| format!("{v:.2e}")).collect();
    Ok(format!(
        "small_count 3 at t = 1e-3, third eigenvalue [{}], {:.2} s",
        third.join(", "),
        start.elapsed().as_secs_f64()
    ))
}

/// `dim E_∞^{a,p-a}` from the filtration it grades: images of `H^p(F^a)` in `H^p`.
fn e_infinity_from_filtration(c: &BigradedComplex, p: usize) -> Vec<usize> {
    let d = c.total_differential(p);
    let n = d.cols();
    let boundaries = if p == 0 {
        Matrix::zeros(0, n)
    } else {
        c.total_differential(p - 1).transpose()
    };
    let parts = c.parts(p);
    let image_dim = |a: usize| -> usize {
        let Some(&(_, _, off)) = parts.iter().find(|&&(pa, _, _)| pa >= a) else {
            return 0;
        };
        let sub = d.submatrix(0..d.rows(), off..n);
        let null = nullspace_exact(&sub);
        let cycles = Matrix::vstack(&[&Matrix::zeros(off, null.cols()), &null], null.cols())
            .expect("same width")
            .transpose();
        let stacked = Matrix::vstack(&[&cycles, &boundaries], n).expect("same width");
        rank_exact(&stacked) - rank_exact(&boundaries)
    };
    (0..c.a_extent())
        .filter(|&a| a <= p && p - a < c.b_extent())
        .map(|a| image_dim(a) - image_dim(a + 1))
        .collect()
}

/// `dim E_1^{a,b}`: cohomology of `D_[0]` in column `a`.
fn e1_from_columns(c: &BigradedComplex, a: usize, b: usize) -> usize {
    let out = rank_exact(&c.component(0, a, b));
    let inc = if b > 0 {
        rank_exact(&c.component(0, a, b - 1))
    } else {
        0
    };
    c.dim(a, b) - out - inc
}

fn spectral_sequence_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pages_checked = 0;
    for k in 0..100 {
        let c = random_flat_complex(&mut rng, 3, 3, 3).map_err(err)?;
        let report = e_infinity(&c).map_err(err)?;
        for p in 0..=c.top_degree() {
            let h = c.total_cohomology(p).map_err(err)?;
            let inf = report.e_infinity.total(p);
            ensure(inf == h, || {
                format!("complex {k}: E_∞ total {inf} vs H^{p} = {h}")
            })?;
            let graded: Vec<usize> = (0..c.a_extent())
                .filter(|&a| a <= p && p - a < c.b_extent())
                .map(|a| report.e_infinity.get(a, p - a))
                .collect();
            let oracle = e_infinity_from_filtration(&c, p);
            ensure(graded == oracle, || {
                format!("complex {k}, p = {p}: E_∞ {graded:?} vs filtration {oracle:?}")
            })?;
        }
        let mut prev = page(&c, 0).map_err(err)?;
        let e1 = page(&c, 1).map_err(err)?;
        for a in 0..c.a_extent() {
            for b in 0..c.b_extent() {
                ensure(e1.get(a, b) == e1_from_columns(&c, a, b), || {
                    format!("complex {k}: E_1 at ({a},{b})")
                })?;
            }
        }
        for r in 1..=stabilization_page(&c) {
            let next = page(&c, r).map_err(err)?;
            let iterated = next_page_dims(&prev);
            ensure(next.dims == iterated, || {
                format!(
                    "complex {k}, r = {r}: formula {:?} vs iterated {iterated:?}",
                    next.dims
                )
            })?;
            pages_checked += 1;
            prev = next;
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "100 complexes, {pages_checked} pages, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn int_matrix(rows: &[&[i64]]) -> RationalMatrix {
    Matrix::from_fn(rows.len(), rows[0].len(), |i, j| q(rows[i][j]))
}

fn leray_over_circle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..50 {
        let (name, sc) = random_circle_model(&mut rng, 8).map_err(err)?;
        let phis = fiber_cohomology_monodromy(&sc).map_err(err)?.remove(0);
        let c = BigradedComplex::minimal_model(&sc).map_err(err)?;
        let report = e_infinity(&c).map_err(err)?;
        for p in 0..=c.top_degree() {
            let l = leray_circle(&phis, p).map_err(err)?;
            let inf = report.e_infinity.total(p);
            ensure(l == inf, || {
                format!("model {k} ({name}), p = {p}: Leray {l} vs E_∞ {inf}")
            })?;
        }
    }
    let sc = from_affine_bundle(
        &NilpotentLieAlgebra::<Rational>::abelian(2),
        &FiniteSymmetryGroup::trivial(2),
        &BaseModel::circle(8, 1.0),
        &[int_matrix(&[&[1, 1], &[0, 1]])],
        None,
        0.0,
    )
    .map_err(err)?;
    let phis = fiber_cohomology_monodromy(&sc).map_err(err)?.remove(0);
    let b: Vec<usize> = (0..=3)
        .map(|p| leray_circle(&phis, p))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(b == [1, 2, 2, 1], || {
        format!("unipotent T² fiber gives {b:?}")
    })?;
    Ok(format!(
        "50 random models agree; unipotent T² fiber gives {b:?}"
    ))
}

fn heisenberg_torus<S: collapse_core::Scalar>(
    res: usize,
    tau: S,
) -> Result<Superconnection<S>, String> {
    let id = Matrix::identity(1);
    from_affine_bundle(
        &NilpotentLieAlgebra::<S>::abelian(1),
        &FiniteSymmetryGroup::trivial(1),
        &BaseModel::torus2(res, 1.0, 1.0),
        &[id.clone(), id],
        Some(&CurvatureForm {
            tau,
            vector: vec![S::one()],
        }),
        1e-12,
    )
    .map_err(err)
}

fn adiabatic_count() -> Outcome {
    let start = Instant::now();
    let deltas = [1.0, 0.3, 0.1, 0.03];
    let mut third = Vec::new();
    for &d in &deltas {
        let sc = heisenberg_torus(64, d)?;
        let e = eigenvalues(&sc, &MetricField::harmonic(), 1, None).map_err(err)?;
        ensure(e[0].abs() <= 1e-10 && e[1].abs() <= 1e-10, || {
            format!("δ = {d}: {:?}", &e[..4])
        })?;
        ensure(e[3] >= 1.0, || {
            format!("δ = {d}: fourth eigenvalue {} also small", e[3])
        })?;
        third.push(e[2]);
    }
    let (slope, rms) = log_log_fit(&deltas, &third).ok_or("third eigenvalue not positive")?;
    ensure((slope - 2.0).abs() <= 0.1, || {
        format!("slope {slope} (rms {rms:.1e})")
    })?;

    let exact = heisenberg_torus(8, q(1))?;
    let ss = e_infinity(&BigradedComplex::minimal_model(&exact).map_err(err)?).map_err(err)?;
    let e2 = ss.page(2);
    let d2: usize = e2.d_ranks.iter().flatten().sum();
    let (e2_total, inf_total) = (e2.total(1), ss.e_infinity.total(1));
    ensure(e2_total == 3 && inf_total == 2, || {
        format!("E_2 total {e2_total}, E_∞ total {inf_total}")
    })?;
    ensure(d2 > 0, || "d_2 vanishes".into())?;
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "2 zeros + slope {slope:.4}; E_2 total 3, E_∞ total 2, rank d_2 = {d2}; {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn perturbed(rng: &mut ChaCha8Rng, sc: &Superconnection<f64>) -> Superconnection<f64> {
    let mut other = sc.clone();
    let top = sc.ranks.len();
    for b in 0..top.saturating_sub(1) {
        let (r0, c0) = (sc.offset(b + 1), sc.offset(b));
        for i in 0..sc.ranks[b + 1] {
            for j in 0..sc.ranks[b] {
                other.a0[(r0 + i, c0 + j)] += rng.gen_range(-0.5..0.5);
            }
        }
    }
    if sc.tau != 0.0 {
        other.tau = rng.gen_range(0.0..2.0);
    }
    other
}

fn perturbation_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h3 = NilpotentLieAlgebra::<f64>::heisenberg(3).map_err(err)?;
    let over_circle = |alg: &NilpotentLieAlgebra<f64>, act: Matrix<f64>| {
        from_affine_bundle(
            alg,
            &FiniteSymmetryGroup::trivial(alg.dim()),
            &BaseModel::circle(8, 1.0),
            &[act],
            None,
            1e-12,
        )
    };
    let presets = [
        over_circle(&h3, Matrix::identity(3)).map_err(err)?,
        over_circle(
            &NilpotentLieAlgebra::abelian(2),
            Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).map_err(err)?,
        )
        .map_err(err)?,
        heisenberg_torus(8, 0.7)?,
    ];
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let sc = &presets[k % presets.len()];
        let other = perturbed(&mut rng, sc);
        for p in 0..=sc.base.dim() + sc.top_degree() {
            let r =
                perturbation_check(sc, &other, &MetricField::harmonic(), p, None).map_err(err)?;
            ensure(r.holds, || format!("pair {k}, p = {p}: {r:?}"))?;
            worst = worst.max(r.max_ratio);
        }
    }
    Ok(format!(
        "50 pairs, max gap / bound = {worst:.3}, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn flatness_invariants() -> Outcome {
    let tol = 1e-12;
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut check = |label: &str, sc: &Superconnection<Rational>| -> Result<(), String> {
        let r = sc.to_f64().check_flatness();
        let v = r.violations().into_iter().fold(0.0, f64::max);
        ensure(v <= tol, || format!("{label}: {r:?}"))?;
        worst = worst.max(v);
        count += 1;
        Ok(())
    };
    for name in presets_up_to(7) {
        let alg = NilpotentLieAlgebra::<Rational>::preset(name).map_err(err)?;
        let group = FiniteSymmetryGroup::trivial(alg.dim());
        let sc =
            from_affine_bundle(&alg, &group, &BaseModel::point(), &[], None, 0.0).map_err(err)?;
        check(name, &sc)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..30 {
        let (name, sc) = random_circle_model(&mut rng, 8).map_err(err)?;
        check(&name, &sc)?;
    }
    for tau in [1, 3] {
        check("heisenberg over T²", &heisenberg_torus(8, q(tau))?)?;
    }
    // central curvature on a Heisenberg fiber
    let h3 = NilpotentLieAlgebra::<Rational>::heisenberg(3).map_err(err)?;
    let id = Matrix::identity(3);
    let sc = from_affine_bundle(
        &h3,
        &FiniteSymmetryGroup::trivial(3),
        &BaseModel::torus2(8, 1.0, 1.0),
        &[id.clone(), id],
        Some(&CurvatureForm {
            tau: q(1),
            vector: vec![q(0), q(0), q(1)],
        }),
        0.0,
    )
    .map_err(err)?;
    check("heisenberg:3 over T² with central T", &sc)?;
    for name in lab::PRESETS {
        let cfg = lab::ScenarioConfig::preset(name).map_err(err)?;
        if let lab::ModelRef::Bundle(spec) = &cfg.model {
            check(name, &spec.build().map_err(err)?)?;
        }
    }
    let balance = heisenberg_torus(64, q(1))?
        .to_f64()
        .check_flatness()
        .curvature_balance;
    ensure(balance <= tol, || format!("curvature balance {balance:e}"))?;
    Ok(format!("{count} constructions, max violation {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("scalar curvature identity", scalar_curvature_identity),
        ("heisenberg3 invariant kernel dims", heisenberg_kernel_dims),
        (
            "heisenberg3 rescaled spectrum over a point",
            heisenberg_point_rescaling,
        ),
        ("twisted circle closed form", twisted_circle_closed_form),
        ("unipotent monodromy degeneration", unipotent_degeneration),
        ("spectral sequence soundness", spectral_sequence_soundness),
        ("Leray over the circle", leray_over_circle),
        ("adiabatic count over T²", adiabatic_count),
        ("perturbation bound", perturbation_bound),
        ("flatness invariants", flatness_invariants),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
