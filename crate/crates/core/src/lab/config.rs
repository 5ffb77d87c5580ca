use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::AlgebraSpec;
use crate::spectral_sequence::ComplexSpec;
use crate::spectrum::SmallEigenvalueRule;
use crate::superconnection::spec::{BundleSpec, MatrixSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    NilRescale,
    MonodromyDegeneration,
    CircleBundleAdiabatic,
    SpectralSequenceReport,
}

/// Model source. `file` paths are relative to the config file once loaded through
/// [`ScenarioConfig::from_path`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelRef {
    Algebra(AlgebraSpec),
    Bundle(Box<BundleSpec>),
    Complex(ComplexSpec),
    File(PathBuf),
}

/// What the sweep parameter controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Fiber rescaling: the grading weights for `nil_rescale`, a uniform collapse
    /// `h_b ↦ ε^{-b} h_b` of the fiber metric otherwise.
    Epsilon,
    /// Gauge family `Φ_t = G_t Φ G_t⁻¹` with `G_t = diag(t^{w_i})`.
    Gauge,
    /// Coefficient of the curvature term.
    Curvature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// `eps`, `t`, `tau` or `delta`.
    pub param: String,
    pub values: Vec<f64>,
    /// Exponents `w_i` of the diagonal gauge, one per row of the monodromy.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge_weights: Vec<i32>,
}

impl Sweep {
    pub fn kind(&self) -> Result<SweepParam> {
        match self.param.as_str() {
            "eps" | "epsilon" | "ε" => Ok(SweepParam::Epsilon),
            "t" => Ok(SweepParam::Gauge),
            "tau" | "delta" | "τ" | "δ" => Ok(SweepParam::Curvature),
            other => Err(Error::InvalidInput(format!(
                "unknown sweep parameter `{other}`; expected eps, t, tau or delta"
            ))),
        }
    }

    /// Smallest value, at which predictions are compared.
    pub fn smallest(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn default_count() -> Option<usize> {
    Some(8)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub model: ModelRef,
    /// Generators of the finite symmetry group acting on `𝔫` (`nil_rescale` only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetry: Vec<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub degrees: Vec<usize>,
    /// Overrides the base resolution of a bundle model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Eigenvalues kept per degree; `null` keeps all.
    #[serde(default = "default_count")]
    pub count: Option<usize>,
    #[serde(default)]
    pub rule: SmallEigenvalueRule,
    /// Recorded for randomized suites; the scenario kinds here are deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const PRESETS: [&str; 5] = [
    "example1_heisenberg_point",
    "example3_circle_bundle",
    "example7_heisenberg_circle",
    "example9_sol_circle",
    "cor7_heisenberg_T2",
];

fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1_heisenberg_point" => include_str!("../../presets/example1_heisenberg_point.json"),
        "example3_circle_bundle" => include_str!("../../presets/example3_circle_bundle.json"),
        "example7_heisenberg_circle" => {
            include_str!("../../presets/example7_heisenberg_circle.json")
        }
        "example9_sol_circle" => include_str!("../../presets/example9_sol_circle.json"),
        "cor7_heisenberg_T2" => include_str!("../../presets/cor7_heisenberg_T2.json"),
        _ => return None,
    })
}

impl ScenarioConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_text(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown preset `{name}`; available: {}",
                PRESETS.join(", ")
            ))
        })?;
        Self::from_json(text)
    }

    /// Loads a config file and inlines `file` model references relative to it.
    pub fn from_path(path: &Path) -> Result<Self> {
        let mut c: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if let ModelRef::File(f) = &c.model {
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            c.model = load_model(&dir.join(f), c.kind)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| {
            Err(Error::InvalidInput(format!(
                "scenario `{}`: {m}",
                self.name
            )))
        };
        if let Some(r) = self.resolution {
            if r < 8 {
                return bad(format!("resolution must be at least 8, got {r}"));
            }
        }
        if self.count == Some(0) {
            return bad("eigenvalue count must be positive".into());
        }
        match (&self.kind, &self.model) {
            (ScenarioKind::NilRescale, ModelRef::Algebra(_))
            | (ScenarioKind::MonodromyDegeneration, ModelRef::Bundle(_))
            | (ScenarioKind::CircleBundleAdiabatic, ModelRef::Bundle(_))
            | (ScenarioKind::SpectralSequenceReport, ModelRef::Bundle(_) | ModelRef::Complex(_))
            | (_, ModelRef::File(_)) => {}
            (k, _) => return bad(format!("model type does not fit scenario kind {k:?}")),
        }
        match (&self.kind, &self.sweep) {
            (ScenarioKind::SpectralSequenceReport, Some(s)) if !s.values.is_empty() => {
                return bad("spectral_sequence_report takes no sweep".into())
            }
            (ScenarioKind::SpectralSequenceReport, _) => {}
            (_, None) => return bad("a sweep is required".into()),
            (k, Some(s)) => {
                let param = s.kind()?;
                if s.values.is_empty() {
                    return bad("empty sweep".into());
                }
                if s.values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return bad("sweep values must be positive".into());
                }
                let up = s.values.windows(2).all(|w| w[1] > w[0]);
                let down = s.values.windows(2).all(|w| w[1] < w[0]);
                if !(up || down) {
                    return bad("sweep values must be strictly monotone".into());
                }
                let allowed = match k {
                    ScenarioKind::NilRescale => param == SweepParam::Epsilon,
                    ScenarioKind::MonodromyDegeneration => param != SweepParam::Curvature,
                    ScenarioKind::CircleBundleAdiabatic => param != SweepParam::Gauge,
                    ScenarioKind::SpectralSequenceReport => false,
                };
                if !allowed {
                    return bad(format!(
                        "sweep parameter `{}` does not apply to {k:?}",
                        s.param
                    ));
                }
                if param == SweepParam::Gauge && s.gauge_weights.is_empty() {
                    return bad("a `t` sweep needs gauge_weights".into());
                }
            }
        }
        if self.kind != ScenarioKind::SpectralSequenceReport && self.degrees.is_empty() {
            return bad("no degrees requested".into());
        }
        Ok(())
    }
}

fn load_model(path: &Path, kind: ScenarioKind) -> Result<ModelRef> {
    let text = std::fs::read_to_string(path)?;
    Ok(match kind {
        ScenarioKind::NilRescale => ModelRef::Algebra(serde_json::from_str(&text)?),
        ScenarioKind::MonodromyDegeneration | ScenarioKind::CircleBundleAdiabatic => {
            ModelRef::Bundle(Box::new(serde_json::from_str(&text)?))
        }
        ScenarioKind::SpectralSequenceReport => {
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("base").is_some() {
                ModelRef::Bundle(Box::new(serde_json::from_value(value)?))
            } else {
                ModelRef::Complex(serde_json::from_value(value)?)
            }
        }
    })
}
