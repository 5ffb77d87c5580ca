use serde::{Deserialize, Serialize};

/// Eigenvalue value with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Location of the chosen spectral gap: the first `index` eigenvalues are small.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub index: usize,
    /// `None` when the split is after the last eigenvalue of a complete spectrum.
    pub ratio: Option<f64>,
}

/// Gap rule parameters for deciding which eigenvalues count as small.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallEigenvalueRule {
    pub floor: f64,
    pub cutoff: f64,
    pub kernel_tol: f64,
}

impl Default for SmallEigenvalueRule {
    fn default() -> Self {
        SmallEigenvalueRule {
            floor: 1e-8,
            cutoff: 0.05,
            kernel_tol: 1e-10,
        }
    }
}

impl SmallEigenvalueRule {
    /// Split after `j` eigenvalues maximizing `λ_{j+1} / max(λ_j, floor)` over `λ_j ≤ cutoff`.
    /// When the list is the whole spectrum the split after the last eigenvalue is
    /// always a candidate with infinite ratio.
    pub fn split(&self, eigenvalues: &[f64], complete: bool) -> Option<Gap> {
        let n = eigenvalues.len();
        if complete && n > 0 {
            return Some(Gap {
                index: n,
                ratio: None,
            });
        }
        let mut best: Option<Gap> = None;
        for j in 1..n {
            let lo = eigenvalues[j - 1];
            if lo > self.cutoff {
                break;
            }
            let ratio = eigenvalues[j] / lo.max(self.floor);
            if best
                .as_ref()
                .map_or(true, |b| ratio > b.ratio.unwrap_or(f64::INFINITY))
            {
                best = Some(Gap {
                    index: j,
                    ratio: Some(ratio),
                });
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub degree: usize,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub small_count: usize,
    pub kernel_count: usize,
    pub gap: Option<Gap>,
    /// True when `eigenvalues` is the full spectrum of a finite-dimensional operator.
    pub complete: bool,
}

impl SpectrumReport {
    pub fn new(
        degree: usize,
        mut eigenvalues: Vec<f64>,
        complete: bool,
        rule: &SmallEigenvalueRule,
    ) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let gap = rule.split(&eigenvalues, complete);
        let small_count = gap.as_ref().map_or(0, |g| g.index);
        let kernel_count = eigenvalues
            .iter()
            .filter(|v| v.abs() <= rule.kernel_tol)
            .count();
        SpectrumReport {
            degree,
            clusters: cluster(&eigenvalues, 1e-8),
            eigenvalues,
            small_count,
            kernel_count,
            gap,
            complete,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Group a sorted list into clusters of relative width `rel`.
pub fn cluster(sorted: &[f64], rel: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut start = 0.0;
    for &v in sorted {
        match out.last_mut() {
            Some(c) if (v - start).abs() <= rel * start.abs().max(1e-2) => c.multiplicity += 1,
            _ => {
                start = v;
                out.push(Cluster {
                    value: v,
                    multiplicity: 1,
                });
            }
        }
    }
    out
}
