use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraSpec, FiniteSymmetryGroup, NilpotentLieAlgebra};
use crate::numerics::Matrix;
use crate::scalar::{parse_rational, Scalar};
use crate::superconnection::base::BaseModel;
use crate::superconnection::bundle::{from_affine_bundle, CurvatureForm, Superconnection};
use crate::superconnection::metric::MetricField;
use crate::Rational;

/// A rational entry: `"1/3"`, an integer, or a float (taken at its exact binary value).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Entry {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Entry::Int(v) => Ok(Rational::from_i64(*v)),
            Entry::Real(v) if v.is_finite() => Ok(Rational::from_f64(*v)),
            Entry::Real(v) => Err(Error::InvalidInput(format!("non-finite entry {v}"))),
            Entry::Text(s) => {
                parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("bad rational `{s}`")))
            }
        }
    }
}

impl From<&str> for Entry {
    fn from(s: &str) -> Self {
        Entry::Text(s.to_string())
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn parse_matrix(rows: &MatrixSpec) -> Result<Matrix<Rational>> {
    let parsed: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(Entry::to_rational).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    Matrix::from_rows(&parsed)
}

/// A constant fiber field: a name (`"ce_differential"`, `"interior:T"`, `"interior:1,0,0"`, `"zero"`)
/// or an explicit matrix on `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Matrix(MatrixSpec),
}

/// Bundle description. With `algebra` the bundle is `Λ*(𝔫*)^F` and monodromies act on `𝔫*`;
/// without it `ranks`, full monodromy matrices and explicit fields are required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub base: BaseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    /// Generators of `F`, acting on `𝔫`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetry: Vec<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(default)]
    pub monodromy: Vec<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Entry>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricField>,
}

impl BundleSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn metric(&self) -> MetricField {
        self.metric.clone().unwrap_or_default()
    }

    fn tau(&self) -> Result<Option<Rational>> {
        self.tau.as_ref().map(Entry::to_rational).transpose()
    }

    fn vertical_field(&self, n: usize) -> Result<Option<Vec<Rational>>> {
        let named = match &self.a2 {
            None => None,
            Some(FieldSpec::Named(s)) if s == "zero" => return Ok(None),
            Some(FieldSpec::Named(s)) => Some(s.strip_prefix("interior:").ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown a2 field `{s}`; expected `interior:T` or `interior:<components>`"
                ))
            })?),
            Some(FieldSpec::Matrix(_)) => {
                return Err(Error::InvalidInput(
                    "with an algebra, a2 must be given as `interior:T`".into(),
                ));
            }
        };
        let v = match (named, &self.t) {
            (Some("T") | None, Some(t)) => t
                .iter()
                .map(Entry::to_rational)
                .collect::<Result<Vec<_>>>()?,
            (Some("T"), None) => {
                return Err(Error::InvalidInput(
                    "`interior:T` needs the `T` components".into(),
                ))
            }
            (Some(list), _) => list
                .split(',')
                .map(|c| {
                    parse_rational(c)
                        .ok_or_else(|| Error::InvalidInput(format!("bad component `{c}`")))
                })
                .collect::<Result<Vec<_>>>()?,
            (None, None) => return Ok(None),
        };
        if v.len() != n {
            return Err(Error::mismatch(format!("{n} components of T"), v.len()));
        }
        Ok(Some(v))
    }

    pub fn build(&self) -> Result<Superconnection<Rational>> {
        self.base.validate()?;
        match &self.algebra {
            Some(spec) => self.build_affine(spec),
            None => self.build_explicit(),
        }
    }

    fn build_affine(&self, spec: &AlgebraSpec) -> Result<Superconnection<Rational>> {
        let alg = NilpotentLieAlgebra::<Rational>::from_spec(spec)?;
        let n = alg.dim();
        match &self.a0 {
            None => {}
            Some(FieldSpec::Named(s)) if s == "ce_differential" => {}
            Some(_) => {
                return Err(Error::InvalidInput(
                    "with an algebra, a0 must be `ce_differential`".into(),
                ))
            }
        }
        let gens: Vec<Matrix<Rational>> = self
            .symmetry
            .iter()
            .map(parse_matrix)
            .collect::<Result<_>>()?;
        let group = if gens.is_empty() {
            FiniteSymmetryGroup::trivial(n)
        } else {
            FiniteSymmetryGroup::generated_by(n, &gens, 0.0)?
        };
        let actions: Vec<Matrix<Rational>> = if self.monodromy.is_empty() {
            vec![Matrix::identity(n); self.base.generators()]
        } else {
            self.monodromy
                .iter()
                .map(parse_matrix)
                .collect::<Result<_>>()?
        };
        let curvature = self
            .vertical_field(n)?
            .map(|vector| {
                Ok::<_, Error>(CurvatureForm {
                    tau: self.tau()?.unwrap_or_else(Rational::one),
                    vector,
                })
            })
            .transpose()?;
        from_affine_bundle(&alg, &group, &self.base, &actions, curvature.as_ref(), 0.0)
    }

    fn build_explicit(&self) -> Result<Superconnection<Rational>> {
        let ranks = self
            .ranks
            .clone()
            .ok_or_else(|| Error::InvalidInput("`ranks` is required without `algebra`".into()))?;
        let total: usize = ranks.iter().sum();
        let field = |f: &Option<FieldSpec>, name: &str| -> Result<Matrix<Rational>> {
            match f {
                None => Ok(Matrix::zeros(total, total)),
                Some(FieldSpec::Named(s)) if s == "zero" => Ok(Matrix::zeros(total, total)),
                Some(FieldSpec::Named(s)) => Err(Error::InvalidInput(format!(
                    "field `{s}` for {name} needs an algebra; give a matrix instead"
                ))),
                Some(FieldSpec::Matrix(m)) => parse_matrix(m),
            }
        };
        let a0 = field(&self.a0, "a0")?;
        let a2 = field(&self.a2, "a2")?;
        let tau = match self.tau()? {
            Some(t) => t,
            None if a2.is_zero() => Rational::zero(),
            None => Rational::one(),
        };
        let monodromy: Vec<Matrix<Rational>> = if self.monodromy.is_empty() {
            vec![Matrix::identity(total); self.base.generators()]
        } else {
            self.monodromy
                .iter()
                .map(parse_matrix)
                .collect::<Result<_>>()?
        };
        let sc = Superconnection {
            base: self.base.clone(),
            ranks,
            monodromy,
            a0,
            a2,
            tau,
        };
        sc.validate(0.0)?;
        Ok(sc)
    }
}
