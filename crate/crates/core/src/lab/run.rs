use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::config::{ModelRef, ScenarioConfig, ScenarioKind, SweepParam};
use crate::lie::{
    lower_central_grading, rescaled_spectrum, FiniteSymmetryGroup, NilpotentLieAlgebra,
};
use crate::numerics::Matrix;
use crate::spectral_sequence::{
    e_infinity, predict_small_count, BigradedComplex, CollapseCase, Prediction,
    SpectralSequenceReport,
};
use crate::spectrum::SpectrumReport;
use crate::superconnection::spec::{parse_matrix, BundleSpec, Entry};
use crate::superconnection::{
    from_affine_bundle, spectrum, BaseModel, ConformalMode, MetricField, Superconnection,
};
use crate::{Rational, Scalar};

/// Residual above which a fitted decay rate is not reported as determined.
pub const SLOPE_RESIDUAL_LIMIT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// One report per requested degree, in order.
    pub spectra: Vec<SpectrumReport>,
}

/// Log-log decay rate of eigenvalue `j` over the last three sweep points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySlope {
    pub j: usize,
    pub slope: Option<f64>,
    /// Root-mean-square residual of the fit in log coordinates.
    pub residual: Option<f64>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub p: usize,
    pub predicted_small_count: Option<usize>,
    pub betti: Option<usize>,
    pub case: Option<CollapseCase>,
    /// Gap-rule count at the smallest sweep value.
    pub observed_small_count: Option<usize>,
    /// Eigenvalues below the kernel tolerance, per sweep point.
    pub kernel_counts: Vec<usize>,
    pub slopes: Vec<DecaySlope>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub rule: String,
    pub degree: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub sweep_param: Option<String>,
    pub points: Vec<SweepPoint>,
    pub degrees: Vec<DegreeSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predictions: Vec<Prediction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_sequence: Option<SpectralSequenceReport>,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Least-squares line through `(ln x, ln y)`; `None` unless every value is positive.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 || xs.len() != ys.len() || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / sxx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some((slope, rms))
}

fn decay_slope(values: &[f64], lambdas: &[f64], j: usize) -> DecaySlope {
    let k = values.len().saturating_sub(3);
    match log_log_fit(&values[k..], &lambdas[k..]) {
        Some((slope, residual)) => DecaySlope {
            j,
            slope: Some(slope),
            residual: Some(residual),
            status: if residual > SLOPE_RESIDUAL_LIMIT {
                "rate undetermined"
            } else {
                "ok"
            }
            .into(),
        },
        None => DecaySlope {
            j,
            slope: None,
            residual: None,
            status: "rate undetermined".into(),
        },
    }
}

fn truncated(
    p: usize,
    mut eigs: Vec<f64>,
    complete: bool,
    count: Option<usize>,
    cfg: &ScenarioConfig,
) -> SpectrumReport {
    let full = eigs.len();
    if let Some(c) = count {
        eigs.sort_by(f64::total_cmp);
        eigs.truncate(c);
    }
    SpectrumReport::new(p, eigs.clone(), complete && eigs.len() == full, &cfg.rule)
}

/// Evaluates `f` on every sweep value concurrently, keeping the sweep order.
fn sweep_points<F>(values: &[f64], f: F) -> Result<Vec<SweepPoint>>
where
    F: Fn(f64) -> Result<Vec<SpectrumReport>> + Sync,
{
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = values
            .iter()
            .map(|&v| s.spawn(move || f(v).map(|spectra| SweepPoint { value: v, spectra })))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| {
                    Err(Error::InternalConsistency("sweep worker panicked".into()))
                })
            })
            .collect()
    })
}

fn check_degrees(degrees: &[usize], top: usize) -> Result<()> {
    match degrees.iter().find(|&&p| p > top) {
        Some(p) => Err(Error::InvalidInput(format!(
            "degree {p} exceeds the top degree {top}"
        ))),
        None => Ok(()),
    }
}

fn gauge_conjugate(m: &Matrix<Rational>, weights: &[i32], t: f64) -> Result<Vec<Vec<Entry>>> {
    if weights.len() != m.rows() {
        return Err(Error::mismatch(
            format!("{} gauge weights", m.rows()),
            weights.len(),
        ));
    }
    Ok((0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| Entry::Real(m[(i, j)].as_f64() * t.powi(weights[i] - weights[j])))
                .collect()
        })
        .collect())
}

/// Bundle for one sweep value, with its metric.
fn bundle_at(
    spec: &BundleSpec,
    param: SweepParam,
    weights: &[i32],
    v: f64,
) -> Result<(Superconnection<f64>, MetricField)> {
    let mut spec = spec.clone();
    let mut metric = spec.metric();
    match param {
        SweepParam::Gauge => {
            let conj = spec
                .monodromy
                .iter()
                .map(|m| gauge_conjugate(&parse_matrix(m)?, weights, v))
                .collect::<Result<Vec<_>>>()?;
            spec.monodromy = conj;
        }
        SweepParam::Curvature => spec.tau = Some(Entry::Real(v)),
        SweepParam::Epsilon => {}
    }
    let sc = spec.build()?.to_f64();
    if param == SweepParam::Epsilon {
        for b in 1..sc.ranks.len() {
            metric.modes.push(ConformalMode {
                degree: Some(b),
                ..ConformalMode::scale(-(b as f64) * v.ln())
            });
        }
    }
    Ok((sc, metric))
}

fn summarize(
    cfg: &ScenarioConfig,
    points: &[SweepPoint],
    predictions: &[Prediction],
) -> (Vec<DegreeSummary>, Vec<Check>) {
    let values: Vec<f64> = points.iter().map(|pt| pt.value).collect();
    let smallest = cfg
        .sweep
        .as_ref()
        .and_then(|s| s.smallest())
        .map(|(i, _)| i);
    let mut summaries = Vec::new();
    let mut checks = Vec::new();
    for (k, &p) in cfg.degrees.iter().enumerate() {
        let pred = predictions.iter().find(|pr| pr.degree == p);
        let kernel_counts: Vec<usize> =
            points.iter().map(|pt| pt.spectra[k].kernel_count).collect();
        let observed = smallest.map(|i| points[i].spectra[k].small_count);
        let mut slopes = Vec::new();
        if let Some(i) = smallest {
            let at = &points[i].spectra[k];
            let upto = pred
                .map_or(at.small_count, |pr| pr.predicted_small_count)
                .min(at.len());
            for j in at.kernel_count..upto {
                let lambdas: Vec<f64> = points
                    .iter()
                    .map(|pt| {
                        pt.spectra[k]
                            .eigenvalues
                            .get(j)
                            .copied()
                            .unwrap_or(f64::NAN)
                    })
                    .collect();
                slopes.push(decay_slope(&values, &lambdas, j));
            }
        }
        if let (Some(pr), Some(obs)) = (pred, observed) {
            checks.push(Check {
                rule: "prediction_consistency".into(),
                degree: Some(p),
                passed: obs == pr.predicted_small_count,
                detail: format!("observed {obs}, predicted {}", pr.predicted_small_count),
            });
        }
        if let Some(pr) = pred {
            let stable = kernel_counts.iter().all(|&c| c == pr.betti);
            checks.push(Check {
                rule: "kernel_stability".into(),
                degree: Some(p),
                passed: stable,
                detail: format!("kernel counts {kernel_counts:?}, betti {}", pr.betti),
            });
        }
        summaries.push(DegreeSummary {
            p,
            predicted_small_count: pred.map(|pr| pr.predicted_small_count),
            betti: pred.map(|pr| pr.betti),
            case: pred.map(|pr| pr.case.clone()),
            observed_small_count: observed,
            kernel_counts,
            slopes,
        });
    }
    (summaries, checks)
}

fn resolved_bundle(cfg: &ScenarioConfig, spec: &BundleSpec) -> BundleSpec {
    let mut spec = spec.clone();
    if let Some(r) = cfg.resolution {
        spec.base.resolution = r;
    }
    spec
}

fn predictions(sc: &Superconnection<Rational>, degrees: &[usize]) -> Result<Vec<Prediction>> {
    degrees
        .iter()
        .map(|&p| predict_small_count(sc, p))
        .collect()
}

/// Runs a scenario. Sweep points are evaluated independently; the report is deterministic.
pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let values: Vec<f64> = cfg
        .sweep
        .as_ref()
        .map(|s| s.values.clone())
        .unwrap_or_default();
    let sweep_param = cfg.sweep.as_ref().map(|s| s.param.clone());
    let mut spectral_sequence = None;
    let (points, preds) = match (&cfg.kind, &cfg.model) {
        (_, ModelRef::File(f)) => {
            return Err(Error::InvalidInput(format!(
                "model file {} was not resolved; load the config with from_path",
                f.display()
            )))
        }
        (ScenarioKind::NilRescale, ModelRef::Algebra(spec)) => {
            let alg = NilpotentLieAlgebra::<Rational>::from_spec(spec)?;
            let n = alg.dim();
            check_degrees(&cfg.degrees, n)?;
            let gens = cfg
                .symmetry
                .iter()
                .map(parse_matrix)
                .collect::<Result<Vec<_>>>()?;
            let group = if gens.is_empty() {
                FiniteSymmetryGroup::trivial(n)
            } else {
                FiniteSymmetryGroup::generated_by(n, &gens, 0.0)?
            };
            let grading = lower_central_grading(&alg, 0.0)?;
            let point = from_affine_bundle(&alg, &group, &BaseModel::point(), &[], None, 0.0)?;
            let preds = predictions(&point, &cfg.degrees)?;
            let points = sweep_points(&values, |eps| {
                cfg.degrees
                    .iter()
                    .map(|&p| {
                        let r = rescaled_spectrum(&alg, &grading, &group, p, eps, &cfg.rule)?;
                        Ok(truncated(p, r.eigenvalues, r.complete, cfg.count, cfg))
                    })
                    .collect()
            })?;
            (points, preds)
        }
        (
            ScenarioKind::MonodromyDegeneration | ScenarioKind::CircleBundleAdiabatic,
            ModelRef::Bundle(spec),
        ) => {
            let spec = resolved_bundle(cfg, spec);
            let exact = spec.build()?;
            check_degrees(&cfg.degrees, exact.base.dim() + exact.top_degree())?;
            let preds = predictions(&exact, &cfg.degrees)?;
            let sweep = cfg.sweep.as_ref().expect("validated");
            let param = sweep.kind()?;
            let points = sweep_points(&values, |v| {
                let (sc, metric) = bundle_at(&spec, param, &sweep.gauge_weights, v)?;
                cfg.degrees
                    .iter()
                    .map(|&p| spectrum(&sc, &metric, p, cfg.count, &cfg.rule))
                    .collect()
            })?;
            (points, preds)
        }
        (ScenarioKind::SpectralSequenceReport, ModelRef::Bundle(spec)) => {
            let exact = resolved_bundle(cfg, spec).build()?;
            let top = exact.base.dim() + exact.top_degree();
            check_degrees(&cfg.degrees, top)?;
            spectral_sequence = Some(e_infinity(&BigradedComplex::minimal_model(&exact)?)?);
            let degrees: Vec<usize> = if cfg.degrees.is_empty() {
                (0..=top).collect()
            } else {
                cfg.degrees.clone()
            };
            (Vec::new(), predictions(&exact, &degrees)?)
        }
        (ScenarioKind::SpectralSequenceReport, ModelRef::Complex(spec)) => {
            spectral_sequence = Some(e_infinity(&BigradedComplex::from_spec(spec)?)?);
            (Vec::new(), Vec::new())
        }
        (k, _) => {
            return Err(Error::InvalidInput(format!(
                "model type does not fit scenario kind {k:?}"
            )))
        }
    };
    let (degrees, checks) = if points.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        summarize(cfg, &points, &preds)
    };
    Ok(ScenarioReport {
        scenario: cfg.name.clone(),
        kind: cfg.kind,
        sweep_param,
        points,
        degrees,
        predictions: preds,
        spectral_sequence,
        checks,
    })
}
