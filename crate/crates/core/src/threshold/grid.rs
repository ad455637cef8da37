use serde::{Deserialize, Serialize};

use crate::dataset::{DerivedPanel, Variable};
use crate::regress::{DesignMatrix, QrFactor, RegressError};
use crate::scalar::Real;

use super::{
    build_regime_design, check_response, linear_design, CandidateGrid, ThresholdError, ThresholdSpec,
    REFINED_INTERIOR_POINTS,
};

/// SSR of the regime model at one candidate threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint<F> {
    pub tau: F,
    pub ssr: F,
}

/// Result of [`grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch<F> {
    /// Minimiser of the SSR profile; the smallest candidate wins ties.
    pub tau_hat: F,
    pub ssr_min: F,
    /// One point per admissible candidate, in ascending `tau`.
    pub profile: Vec<ProfilePoint<F>>,
}

pub(crate) struct Split<F> {
    pub n_low: usize,
    pub design: DesignMatrix<F>,
    pub factor: QrFactor<F>,
}

/// Candidate thresholds and the factored regime designs they induce.
///
/// Candidates that put the same observations in the low regime share one
/// design, so each distinct split is factored once and reused for every
/// response vector (observed or bootstrap).
pub struct ThresholdProblem<F> {
    n: usize,
    response: Variable,
    min_per_regime: usize,
    /// Ascending candidate thresholds with the index of their split.
    candidates: Vec<(F, usize)>,
    splits: Vec<Split<F>>,
    linear: DesignMatrix<F>,
    linear_factor: QrFactor<F>,
}

impl<F: Real> ThresholdProblem<F> {
    pub fn new(panel: &DerivedPanel<F>, response: Variable, spec: &ThresholdSpec<F>) -> Result<Self, ThresholdError> {
        check_response(response)?;
        spec.check()?;
        let n = panel.len();
        let min_per_regime = spec.min_per_regime(n);
        if n < 2 * min_per_regime {
            return Err(ThresholdError::InsufficientObservations { n, min_per_regime });
        }

        let q = panel.column(spec.threshold_variable);
        let mut sorted: Vec<F> = q.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite threshold variable"));
        let mut distinct = sorted.clone();
        distinct.dedup();
        let count_le = |tau: F| sorted.partition_point(|&v| v <= tau);

        let mut raw: Vec<F> = match &spec.candidate_grid {
            CandidateGrid::Observed => distinct.clone(),
            CandidateGrid::Refined => {
                let steps = F::from_count(REFINED_INTERIOR_POINTS + 1);
                let mut out = Vec::with_capacity(distinct.len() * (REFINED_INTERIOR_POINTS + 1));
                for (j, &u) in distinct.iter().enumerate() {
                    out.push(u);
                    if let Some(&next) = distinct.get(j + 1) {
                        let gap = next - u;
                        for i in 1..=REFINED_INTERIOR_POINTS {
                            let t = u + gap * F::from_count(i) / steps;
                            if t > u && t < next {
                                out.push(t);
                            }
                        }
                    }
                }
                out
            }
            CandidateGrid::Explicit(list) => list.iter().copied().filter(|t| t.is_finite()).collect(),
        };
        raw.sort_by(|a, b| a.partial_cmp(b).expect("finite candidates"));
        raw.dedup();

        let mut splits: Vec<Split<F>> = Vec::new();
        let mut rejected: Vec<usize> = Vec::new();
        let mut candidates = Vec::new();
        for tau in raw {
            let n_low = count_le(tau);
            if n_low < min_per_regime || n - n_low < min_per_regime {
                continue;
            }
            if rejected.contains(&n_low) {
                continue;
            }
            let idx = match splits.iter().position(|s| s.n_low == n_low) {
                Some(i) => i,
                None => {
                    let low: Vec<bool> = q.iter().map(|&v| v <= tau).collect();
                    let design = build_regime_design(panel, response, &low, spec.include_intercept_shift)?;
                    match design.factor() {
                        Ok(factor) => {
                            splits.push(Split { n_low, design, factor });
                            splits.len() - 1
                        }
                        Err(RegressError::RankDeficient { .. }) => {
                            rejected.push(n_low);
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            };
            candidates.push((tau, idx));
        }
        if candidates.is_empty() {
            return Err(ThresholdError::NoAdmissibleCandidates { min_per_regime });
        }

        let linear = linear_design(panel, response)?;
        let linear_factor = linear.factor()?;
        Ok(ThresholdProblem { n, response, min_per_regime, candidates, splits, linear, linear_factor })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn response(&self) -> Variable {
        self.response
    }

    pub fn min_per_regime(&self) -> usize {
        self.min_per_regime
    }

    /// Admissible candidate thresholds in ascending order.
    pub fn candidates(&self) -> Vec<F> {
        self.candidates.iter().map(|&(t, _)| t).collect()
    }

    /// Number of distinct regime splits among the candidates.
    pub fn split_count(&self) -> usize {
        self.splits.len()
    }

    pub fn linear_design(&self) -> &DesignMatrix<F> {
        &self.linear
    }

    pub(crate) fn linear_factor(&self) -> &QrFactor<F> {
        &self.linear_factor
    }

    pub(crate) fn split_for(&self, tau: F) -> &Split<F> {
        let (_, idx) = self
            .candidates
            .iter()
            .find(|&&(t, _)| t == tau)
            .expect("tau is one of the candidates");
        &self.splits[*idx]
    }

    /// SSR profile and its minimiser for response `y`.
    pub fn search(&self, y: &[F]) -> GridSearch<F> {
        let ssr: Vec<F> = self.splits.iter().map(|s| s.factor.ssr(y)).collect();
        let profile: Vec<ProfilePoint<F>> =
            self.candidates.iter().map(|&(tau, i)| ProfilePoint { tau, ssr: ssr[i] }).collect();
        let mut best = profile[0];
        for p in &profile[1..] {
            if p.ssr < best.ssr {
                best = *p;
            }
        }
        GridSearch { tau_hat: best.tau, ssr_min: best.ssr, profile }
    }

    /// Smallest SSR over all candidate splits.
    pub(crate) fn min_ssr(&self, y: &[F]) -> F {
        self.splits.iter().map(|s| s.factor.ssr(y)).fold(F::infinity(), F::min)
    }
}

/// Evaluates the regime model at every admissible candidate and returns the
/// SSR-minimising threshold with the full profile.
///
/// Without a significant linearity test the minimiser carries no evidence of a
/// break; on linear data the profile is flat up to noise.
pub fn grid_search<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    spec: &ThresholdSpec<F>,
) -> Result<GridSearch<F>, ThresholdError> {
    let problem = ThresholdProblem::new(panel, response, spec)?;
    Ok(problem.search(panel.column(response)))
}
