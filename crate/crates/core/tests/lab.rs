use collapse_core::lab::*;
use collapse_core::spectral_sequence::CollapseCase;

fn degree(report: &ScenarioReport, p: usize) -> &DegreeSummary {
    report.degrees.iter().find(|d| d.p == p).unwrap()
}

#[test]
fn heisenberg_point_rescaling() {
    let report = run(&ScenarioConfig::preset("example1_heisenberg_point").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    for pt in &report.points {
        let s = &pt.spectra[1];
        assert_eq!(s.eigenvalues.len(), 3);
        assert!(s.eigenvalues[0].abs() < 1e-12 && s.eigenvalues[1].abs() < 1e-12);
        assert!(
            (s.eigenvalues[2] - pt.value).abs() < 1e-12,
            "{} vs {}",
            s.eigenvalues[2],
            pt.value
        );
        assert_eq!(s.small_count, 3);
    }
    let d1 = degree(&report, 1);
    assert_eq!(d1.predicted_small_count, Some(3));
    assert_eq!(d1.case, Some(CollapseCase::FiberCohomologyDeficit { q: 1 }));
    let slope = &d1.slopes[0];
    assert_eq!(slope.j, 2);
    assert!((slope.slope.unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(slope.status, "ok");
}

#[test]
fn unipotent_degeneration() {
    let report = run(&ScenarioConfig::preset("example7_heisenberg_circle").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let d1 = degree(&report, 1);
    assert_eq!(d1.observed_small_count, Some(3));
    assert_eq!(d1.kernel_counts, vec![2; 4]);
    let k = report.degrees.iter().position(|d| d.p == 1).unwrap();
    let third: Vec<f64> = report
        .points
        .iter()
        .map(|pt| pt.spectra[k].eigenvalues[2])
        .collect();
    assert!(third.windows(2).all(|w| w[1] < w[0]), "{third:?}");
    for pt in &report.points {
        assert!(pt.spectra[k].eigenvalues[3] >= 0.5);
    }
}

#[test]
fn sol_fiber_collapse_has_no_small_positive_eigenvalues() {
    let report = run(&ScenarioConfig::preset("example9_sol_circle").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let k = report.degrees.iter().position(|d| d.p == 1).unwrap();
    let first: Vec<f64> = report
        .points
        .iter()
        .map(|pt| pt.spectra[k].eigenvalues[1])
        .collect();
    for v in &first {
        assert!((v - first[0]).abs() < 1e-8, "{first:?}");
    }
    assert_eq!(degree(&report, 1).predicted_small_count, Some(1));
}

#[test]
fn circle_bundle_presets() {
    let report = run(&ScenarioConfig::preset("example3_circle_bundle").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let d1 = degree(&report, 1);
    assert_eq!(d1.case, Some(CollapseCase::NonDegenerateE2));
    assert!((d1.slopes[0].slope.unwrap() - 2.0).abs() < 0.1);
}

#[test]
fn spectral_sequence_report_kind() {
    let text = r#"{
        "name": "ss",
        "kind": "spectral_sequence_report",
        "model": {"bundle": {
            "base": {"kind": "torus2", "resolution": 8, "circumferences": [1, 1]},
            "algebra": {"preset": "abelian:1"}, "a2": "interior:T", "T": ["1"]
        }}
    }"#;
    let report = run(&ScenarioConfig::from_json(text).unwrap()).unwrap();
    let ss = report.spectral_sequence.as_ref().unwrap();
    assert_eq!(ss.total_cohomology, vec![1, 2, 2, 1]);
    assert_eq!(report.predictions.len(), 4);
    assert!(report.points.is_empty());
    assert_eq!(
        to_csv(&report).unwrap(),
        "scenario,sweep_param,sweep_value,p,j,lambda\n"
    );
}

#[test]
fn csv_rows_and_json_round_trip() {
    let cfg = ScenarioConfig::preset("example1_heisenberg_point").unwrap();
    let report = run(&cfg).unwrap();
    let csv = to_csv(&report).unwrap();
    let eigs: usize = report
        .points
        .iter()
        .flat_map(|p| &p.spectra)
        .map(|s| s.len())
        .sum();
    assert_eq!(csv.lines().count(), 1 + eigs);
    // (#sweep points)·(#degrees)·(eigenvalues per degree) with dim Λ^p = 1, 3, 3, 1
    assert_eq!(eigs, 4 * (1 + 3 + 3 + 1));
    let json = report.to_json().unwrap();
    let back = ScenarioReport::from_json(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json().unwrap(), json);
    let dat = to_plotdata(&report);
    assert_eq!(
        dat.lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .count(),
        eigs
    );

    let dir = tempfile::tempdir().unwrap();
    for f in [EmitFormat::Json, EmitFormat::Csv, EmitFormat::Plotdata] {
        let path = dir.path().join(format!("out.{}", f.extension()));
        emit(&report, f, &path).unwrap();
        assert!(std::fs::metadata(&path).unwrap().len() > 0);
    }
    assert!(emit(
        &report,
        EmitFormat::Json,
        &dir.path().join("missing/out.json")
    )
    .is_err());
}

#[test]
fn runs_are_deterministic() {
    let cfg = ScenarioConfig::preset("example7_heisenberg_circle").unwrap();
    let a = run(&cfg).unwrap().to_json().unwrap();
    let b = run(&cfg).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_validation() {
    let base = ScenarioConfig::preset("example7_heisenberg_circle").unwrap();
    let mut c = base.clone();
    c.sweep.as_mut().unwrap().values = vec![1.0, 0.1, 0.5];
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.sweep.as_mut().unwrap().values = vec![1.0, -0.1];
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.resolution = Some(4);
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.degrees = vec![7];
    assert!(run(&c).is_err());
    let mut c = base.clone();
    c.sweep.as_mut().unwrap().param = "delta".into();
    assert!(c.validate().is_err());
    assert!(ScenarioConfig::preset("nope").is_err());
    for name in PRESETS {
        ScenarioConfig::preset(name).unwrap();
    }
}

#[test]
fn config_file_references() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("alg.json"), r#"{"preset": "heisenberg:3"}"#).unwrap();
    std::fs::write(
        dir.path().join("scenario.json"),
        r#"{"name": "from_file", "kind": "nil_rescale", "model": {"file": "alg.json"},
            "sweep": {"param": "eps", "values": [0.5, 0.25]}, "degrees": [1]}"#,
    )
    .unwrap();
    let cfg = ScenarioConfig::from_path(&dir.path().join("scenario.json")).unwrap();
    let report = run(&cfg).unwrap();
    assert_eq!(report.points.len(), 2);
    assert!(report.passed());
}

#[test]
fn log_log_fit_recovers_power() {
    let xs = [1.0, 0.5, 0.25];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
    let (slope, res) = log_log_fit(&xs, &ys).unwrap();
    assert!((slope - 2.0).abs() < 1e-12 && res < 1e-12);
    assert!(log_log_fit(&xs, &[1.0, 0.0, 1.0]).is_none());
}

#[test]
fn heisenberg_torus_adiabatic_preset() {
    let report = run(&ScenarioConfig::preset("cor7_heisenberg_T2").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let d1 = degree(&report, 1);
    assert_eq!(d1.observed_small_count, Some(3));
    assert!((d1.slopes[0].slope.unwrap() - 2.0).abs() < 0.1);
    for pt in &report.points {
        let e = &pt.spectra[0].eigenvalues;
        assert!(e[0].abs() <= 1e-10 && e[1].abs() <= 1e-10);
        assert!(
            (e[2] - pt.value * pt.value).abs() < 1e-8 * pt.value.max(1e-3),
            "{e:?}"
        );
    }
}
