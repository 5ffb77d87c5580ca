use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lie::exterior::binomial;
use crate::spectral_sequence::complex::BigradedComplex;
use crate::spectral_sequence::leray::{
    all_semisimple, fiber_betti, fiber_cohomology_monodromy, joint_unipotent_dim,
};
use crate::spectral_sequence::pages::e_infinity;
use crate::superconnection::bundle::Superconnection;
use crate::superconnection::cochain::diag_block;
use crate::Rational;

/// Which alternative of the small-eigenvalue trichotomy applies, checked in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CollapseCase {
    /// No alternative applies: no small positive eigenvalues are forced.
    None,
    /// 1: `b_q(Z) < dim Λ^q(𝔫*)^F` for some `q ≤ p`.
    FiberCohomologyDeficit { q: usize },
    /// 2: the holonomy on `H^q(Z)` is not semisimple for some `q ≤ p`.
    NonSemisimpleHolonomy { q: usize },
    /// 3: the spectral sequence does not degenerate at `E_2` in degree `p`.
    NonDegenerateE2,
}

impl CollapseCase {
    pub fn number(&self) -> Option<u8> {
        match self {
            CollapseCase::None => None,
            CollapseCase::FiberCohomologyDeficit { .. } => Some(1),
            CollapseCase::NonSemisimpleHolonomy { .. } => Some(2),
            CollapseCase::NonDegenerateE2 => Some(3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub degree: usize,
    /// `Σ_{a+b=p} dim H^a(B; G^b)` with `G` the semisimplified graded bundle.
    pub predicted_small_count: usize,
    /// `dim H^p(A′)`.
    pub betti: usize,
    pub e2_total: usize,
    pub e_infinity_total: usize,
    pub case: CollapseCase,
    /// Case 3 cannot distinguish the limit sub-case; reported as "undetermined".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_subcase: Option<String>,
}

/// Small-eigenvalue count predicted for `Δ_p` along the collapse of the bundle
/// `Λ*(𝔫*)^F` described by `sc`, with the trichotomy case.
pub fn predict_small_count(sc: &Superconnection<Rational>, p: usize) -> Result<Prediction> {
    let d = sc.base.dim();
    let m = sc.ranks.len();
    let mut predicted = 0;
    for a in 0..=d.min(p) {
        let b = p - a;
        if b >= m {
            continue;
        }
        let blocks: Vec<_> = sc
            .monodromy
            .iter()
            .map(|g| diag_block(&sc.ranks, g, b))
            .collect();
        predicted += binomial(d, a) * joint_unipotent_dim(&blocks, sc.ranks[b])?;
    }

    let complex = BigradedComplex::minimal_model(sc)?;
    let ss = e_infinity(&complex)?;
    let e2 = ss.page(2);
    let betti = ss.total_cohomology.get(p).copied().unwrap_or(0);

    let fiber = fiber_betti(sc);
    let qs = 0..=p.min(m - 1);
    let mut case = CollapseCase::None;
    if let Some(q) = qs.clone().find(|&q| fiber[q] < sc.ranks[q]) {
        case = CollapseCase::FiberCohomologyDeficit { q };
    } else {
        let actions = fiber_cohomology_monodromy(sc)?;
        for q in qs {
            let per_loop: Vec<_> = actions.iter().map(|g| g[q].clone()).collect();
            if !all_semisimple(&per_loop)? {
                case = CollapseCase::NonSemisimpleHolonomy { q };
                break;
            }
        }
        if case == CollapseCase::None
            && (0..=p).any(|a| e2.get(a, p - a) != ss.e_infinity.get(a, p - a))
        {
            case = CollapseCase::NonDegenerateE2;
        }
    }
    let limit_subcase = (case == CollapseCase::NonDegenerateE2).then(|| "undetermined".to_string());
    Ok(Prediction {
        degree: p,
        predicted_small_count: predicted,
        betti,
        e2_total: e2.total(p),
        e_infinity_total: ss.e_infinity.total(p),
        case,
        limit_subcase,
    })
}
