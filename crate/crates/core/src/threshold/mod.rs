//! Two-regime threshold regression.
//!
//! The regime model is
//!
//! ```text
//! ln y = a + c·1{q > tau} + b_low·S·1{q <= tau} + b_high·S·1{q > tau} + g·T + d·R + e
//! ```
//!
//! where `q` is the threshold variable (market share `S` by default). `tau` is
//! chosen by minimising the residual sum of squares over a candidate grid, and
//! linearity (`b_low = b_high`, `c = 0`) is tested with a fixed-regressor
//! residual bootstrap of the statistic `n·(SSR_linear − SSR_threshold) / SSR_threshold`.

mod bootstrap;
mod grid;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DerivedPanel, Variable};
use crate::regress::{fit_with_factor, ols_fit, DesignMatrix, FitResult, RegressError};
use crate::scalar::Real;

pub use bootstrap::{lr_linearity_test, LrTest};
pub use grid::{grid_search, GridSearch, ProfilePoint, ThresholdProblem};

/// Regressor names used by the regime design.
pub mod columns {
    pub const INTERCEPT_SHIFT: &str = "intercept_shift_high";
    pub const SHARE_LOW: &str = "market_share_low";
    pub const SHARE_HIGH: &str = "market_share_high";
    pub const SHARE: &str = "market_share";
    pub const TREND: &str = "time_trend";
    pub const RESIDUAL: &str = "tbill_change_residual";
}

/// Number of interior points inserted between consecutive observed values by
/// [`CandidateGrid::Refined`].
pub const REFINED_INTERIOR_POINTS: usize = 99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateGrid<F> {
    /// Distinct observed values of the threshold variable.
    Observed,
    /// Observed values plus evenly spaced interior points between neighbours.
    Refined,
    /// A caller-supplied list.
    Explicit(Vec<F>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec<F> {
    pub threshold_variable: Variable,
    /// Minimum share of observations in each regime, in `[0, 0.5)`.
    pub trim_fraction: F,
    pub include_intercept_shift: bool,
    pub candidate_grid: CandidateGrid<F>,
}

impl<F: Real> Default for ThresholdSpec<F> {
    fn default() -> Self {
        ThresholdSpec {
            threshold_variable: Variable::MarketShare,
            trim_fraction: F::lit(0.15),
            include_intercept_shift: true,
            candidate_grid: CandidateGrid::Refined,
        }
    }
}

impl<F: Real> ThresholdSpec<F> {
    /// Parameters specific to one regime: its slope, plus its own intercept
    /// when the high-regime shift is estimated.
    pub fn regime_parameters(&self) -> usize {
        if self.include_intercept_shift {
            2
        } else {
            1
        }
    }

    /// Smallest admissible regime size for a panel of `n` observations:
    /// `max(ceil(trim_fraction·n), regime_parameters + 1)`.
    pub fn min_per_regime(&self, n: usize) -> usize {
        let trimmed = (self.trim_fraction * F::from_count(n)).ceil().to_usize().unwrap_or(n);
        trimmed.max(self.regime_parameters() + 1)
    }

    fn check(&self) -> Result<(), ThresholdError> {
        let t = self.trim_fraction;
        if !(t >= F::zero() && t < F::lit(0.5)) {
            return Err(ThresholdError::InvalidSpec(format!("trim_fraction must lie in [0, 0.5), got {t}")));
        }
        if self.threshold_variable == Variable::LogYield1m || self.threshold_variable == Variable::LogYield3m {
            return Err(ThresholdError::InvalidSpec("threshold variable cannot be a response".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("invalid threshold specification: {0}")]
    InvalidSpec(String),
    #[error("`{0}` is not a response variable")]
    InvalidResponse(Variable),
    #[error("threshold {0} is outside the admissible range")]
    TauOutOfRange(f64),
    #[error("empty regime at threshold {tau} ({low} low, {high} high)")]
    EmptyRegime { tau: f64, low: usize, high: usize },
    #[error("insufficient observations per regime: n = {n} but each regime needs at least {min_per_regime}")]
    InsufficientObservations { n: usize, min_per_regime: usize },
    #[error("no admissible threshold candidates after trimming ({min_per_regime} observations per regime)")]
    NoAdmissibleCandidates { min_per_regime: usize },
    #[error("replications must be at least 1")]
    NoReplications,
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// Regime membership of one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Low,
    High,
}

fn check_response(response: Variable) -> Result<(), ThresholdError> {
    match response {
        Variable::LogYield1m | Variable::LogYield3m => Ok(()),
        other => Err(ThresholdError::InvalidResponse(other)),
    }
}

/// Linear benchmark: constant, market share, time trend and issuance residual.
pub fn linear_design<F: Real>(panel: &DerivedPanel<F>, response: Variable) -> Result<DesignMatrix<F>, ThresholdError> {
    check_response(response)?;
    Ok(DesignMatrix::builder(response.name(), panel.column(response).to_vec())
        .constant()
        .column(columns::SHARE, panel.market_share.clone())
        .column(columns::TREND, panel.time_trend.clone())
        .column(columns::RESIDUAL, panel.tbill_change_residual.clone())
        .build()?)
}

/// Regime-split design at `tau`.
///
/// Columns: constant, high-regime intercept shift (optional), `S·1{q <= tau}`,
/// `S·1{q > tau}`, time trend, issuance residual.
pub fn regime_design<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    tau: F,
    spec: &ThresholdSpec<F>,
) -> Result<DesignMatrix<F>, ThresholdError> {
    check_response(response)?;
    spec.check()?;
    if !tau.is_finite() {
        return Err(ThresholdError::TauOutOfRange(tau.as_f64()));
    }
    let q = panel.column(spec.threshold_variable);
    let low: Vec<bool> = q.iter().map(|&v| v <= tau).collect();
    let n_low = low.iter().filter(|&&l| l).count();
    if n_low == 0 || n_low == q.len() {
        return Err(ThresholdError::EmptyRegime { tau: tau.as_f64(), low: n_low, high: q.len() - n_low });
    }
    Ok(build_regime_design(panel, response, &low, spec.include_intercept_shift)?)
}

pub(crate) fn build_regime_design<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    low: &[bool],
    intercept_shift: bool,
) -> Result<DesignMatrix<F>, RegressError> {
    let s = &panel.market_share;
    let share_low = s.iter().zip(low).map(|(&v, &l)| if l { v } else { F::zero() }).collect();
    let share_high = s.iter().zip(low).map(|(&v, &l)| if l { F::zero() } else { v }).collect();
    let mut b = DesignMatrix::builder(response.name(), panel.column(response).to_vec()).constant();
    if intercept_shift {
        let shift = low.iter().map(|&l| if l { F::zero() } else { F::one() }).collect();
        b = b.column(columns::INTERCEPT_SHIFT, shift);
    }
    b.column(columns::SHARE_LOW, share_low)
        .column(columns::SHARE_HIGH, share_high)
        .column(columns::TREND, panel.time_trend.clone())
        .column(columns::RESIDUAL, panel.tbill_change_residual.clone())
        .build()
}

/// Complete threshold-regression result.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdFit<F> {
    pub response: Variable,
    pub threshold_variable: Variable,
    pub tau: F,
    pub low_slope: F,
    pub high_slope: F,
    /// `None` when the model was fitted without the high-regime shift.
    pub intercept_shift: Option<F>,
    /// Regime model at `tau` (coefficients, standard errors, p-values).
    pub fit: FitResult<F>,
    /// Linear benchmark fitted to the same data.
    pub linear_fit: FitResult<F>,
    pub ssr_threshold: F,
    pub ssr_linear: F,
    pub lr_statistic: F,
    pub bootstrap_p: F,
    pub replications: usize,
    pub seed: u64,
    pub regime_assignment: Vec<Regime>,
    pub profile: Vec<ProfilePoint<F>>,
}

impl<F: Real> ThresholdFit<F> {
    pub fn constant(&self) -> F {
        self.fit.coefficient(crate::regress::CONSTANT).unwrap_or_else(F::nan)
    }

    pub fn trend(&self) -> F {
        self.fit.coefficient(columns::TREND).unwrap_or_else(F::nan)
    }

    pub fn residual_coef(&self) -> F {
        self.fit.coefficient(columns::RESIDUAL).unwrap_or_else(F::nan)
    }

    pub fn count(&self, regime: Regime) -> usize {
        self.regime_assignment.iter().filter(|&&r| r == regime).count()
    }
}

/// Grid search, regime fit and bootstrap linearity test in one call.
pub fn threshold_fit<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    spec: &ThresholdSpec<F>,
    replications: usize,
    seed: u64,
) -> Result<ThresholdFit<F>, ThresholdError> {
    let problem = ThresholdProblem::new(panel, response, spec)?;
    let y = panel.column(response);
    let search = problem.search(y);
    let test = problem.lr_test(y, replications, seed)?;

    let split = problem.split_for(search.tau_hat);
    let design = split.design.with_response(y.to_vec());
    let fit = fit_with_factor(&design, &split.factor);
    let linear_fit = ols_fit(&problem.linear_design().with_response(y.to_vec()))?;
    let q = panel.column(spec.threshold_variable);
    let regime_assignment = q.iter().map(|&v| if v <= search.tau_hat { Regime::Low } else { Regime::High }).collect();

    Ok(ThresholdFit {
        response,
        threshold_variable: spec.threshold_variable,
        tau: search.tau_hat,
        low_slope: fit.coefficient(columns::SHARE_LOW).unwrap_or_else(F::nan),
        high_slope: fit.coefficient(columns::SHARE_HIGH).unwrap_or_else(F::nan),
        intercept_shift: fit.coefficient(columns::INTERCEPT_SHIFT),
        ssr_threshold: search.ssr_min,
        ssr_linear: test.ssr_linear,
        lr_statistic: test.lr_statistic,
        bootstrap_p: test.bootstrap_p,
        replications,
        seed,
        regime_assignment,
        profile: search.profile,
        fit,
        linear_fit,
    })
}

/// `n·(SSR_linear − SSR_threshold) / SSR_threshold`, clamped at zero.
pub fn lr_statistic<F: Real>(n: usize, ssr_linear: F, ssr_threshold: F) -> F {
    let diff = (ssr_linear - ssr_threshold).max(F::zero());
    if ssr_threshold > F::zero() {
        F::from_count(n) * diff / ssr_threshold
    } else if diff > F::zero() {
        F::infinity()
    } else {
        F::zero()
    }
}
