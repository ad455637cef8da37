use serde::{Deserialize, Serialize};

use crate::regress::FitResult;
use crate::scalar::Real;
use crate::threshold::{columns, ThresholdFit};

use super::AnalysisError;

/// Basis points per percentage point.
pub const BPS_PER_PERCENT: f64 = 100.0;

/// A single semi-elasticity applied to a share change at a baseline yield.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactQuery<F> {
    pub semi_elasticity: F,
    /// Change in market share, decimal fraction.
    pub delta_share: F,
    /// Percent per annum.
    pub baseline_yield: F,
}

impl<F: Real> ImpactQuery<F> {
    pub fn new(semi_elasticity: F, delta_share: F, baseline_yield: F) -> Result<Self, AnalysisError> {
        let q = ImpactQuery { semi_elasticity, delta_share, baseline_yield };
        q.check()?;
        Ok(q)
    }

    fn check(&self) -> Result<(), AnalysisError> {
        if !(self.baseline_yield > F::zero()) || !self.baseline_yield.is_finite() {
            return Err(AnalysisError::NonPositiveYield(self.baseline_yield.as_f64()));
        }
        if !self.semi_elasticity.is_finite() || !self.delta_share.is_finite() {
            return Err(AnalysisError::NonFinite);
        }
        Ok(())
    }

    /// First-order log change `beta·dS`.
    pub fn relative_change(&self) -> F {
        self.semi_elasticity * self.delta_share
    }
}

/// First-order yield change in basis points: `beta·dS·yield·100`.
pub fn bps_impact<F: Real>(query: &ImpactQuery<F>) -> Result<F, AnalysisError> {
    query.check()?;
    Ok(query.relative_change() * query.baseline_yield * F::lit(BPS_PER_PERCENT))
}

/// Annual interest saved on `outstanding` dollars by a yield reduction of
/// `bps_reduction` basis points.
pub fn annual_savings<F: Real>(bps_reduction: F, outstanding: F) -> Result<F, AnalysisError> {
    if !(outstanding >= F::zero()) {
        return Err(AnalysisError::NegativeOutstanding(outstanding.as_f64()));
    }
    Ok(bps_reduction / F::lit(10_000.0) * outstanding)
}

/// Market-share semi-elasticity of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SemiElasticity<F> {
    Linear { beta: F },
    /// `low` applies for shares at or below `tau`, `high` above it.
    Piecewise { tau: F, low: F, high: F },
}

impl<F: Real> SemiElasticity<F> {
    /// Reads the `market_share` coefficient of a linear fit.
    pub fn from_fit(fit: &FitResult<F>) -> Result<Self, AnalysisError> {
        fit.coefficient(columns::SHARE)
            .map(|beta| SemiElasticity::Linear { beta })
            .ok_or_else(|| AnalysisError::MissingCoefficient(columns::SHARE.into()))
    }

    pub fn from_threshold(fit: &ThresholdFit<F>) -> Self {
        SemiElasticity::Piecewise { tau: fit.tau, low: fit.low_slope, high: fit.high_slope }
    }

    /// `∫ beta(s) ds` from `from` to `to`; the piecewise case accumulates each
    /// regime's slope over the part of the path lying in that regime.
    pub fn log_change(&self, from: F, to: F) -> F {
        match *self {
            SemiElasticity::Linear { beta } => beta * (to - from),
            SemiElasticity::Piecewise { tau, low, high } => {
                let (a, b, sign) = if from <= to { (from, to, F::one()) } else { (to, from, -F::one()) };
                let low_len = (b.min(tau) - a).max(F::zero());
                let high_len = (b - a.max(tau)).max(F::zero());
                sign * (low * low_len + high * high_len)
            }
        }
    }
}

fn check_share<F: Real>(s: F) -> Result<(), AnalysisError> {
    if s >= F::zero() && s <= F::one() {
        Ok(())
    } else {
        Err(AnalysisError::ShareOutOfRange(s.as_f64()))
    }
}

/// Yield the model implies at `reference_share` given `actual_yield` observed at
/// `actual_share`, other regressors held fixed:
/// `actual_yield · exp(−∫_{reference}^{actual} beta(s) ds)`.
pub fn counterfactual_yield<F: Real>(
    model: &SemiElasticity<F>,
    actual_share: F,
    reference_share: F,
    actual_yield: F,
) -> Result<F, AnalysisError> {
    check_share(actual_share)?;
    check_share(reference_share)?;
    if !(actual_yield > F::zero()) {
        return Err(AnalysisError::NonPositiveYield(actual_yield.as_f64()));
    }
    Ok(actual_yield * (-model.log_change(reference_share, actual_share)).exp())
}

/// Economic reading of a share change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport<F> {
    /// First-order log yield change.
    pub relative_change: F,
    pub bps_change: F,
    pub actual_yield: F,
    /// Exact-exponential yield at the reference share.
    pub counterfactual_yield: F,
    /// `(actual − counterfactual)` in basis points.
    pub counterfactual_gap_bps: F,
    /// Savings implied by the first-order reduction, USD per year.
    pub annual_savings: F,
}

/// Impact of moving from `reference_share` to `actual_share`.
pub fn impact_report<F: Real>(
    model: &SemiElasticity<F>,
    actual_share: F,
    reference_share: F,
    baseline_yield: F,
    outstanding: F,
) -> Result<ImpactReport<F>, AnalysisError> {
    let cf = counterfactual_yield(model, actual_share, reference_share, baseline_yield)?;
    let relative_change = model.log_change(reference_share, actual_share);
    let bps_change = relative_change * baseline_yield * F::lit(BPS_PER_PERCENT);
    Ok(ImpactReport {
        relative_change,
        bps_change,
        actual_yield: baseline_yield,
        counterfactual_yield: cf,
        counterfactual_gap_bps: (baseline_yield - cf) * F::lit(BPS_PER_PERCENT),
        annual_savings: annual_savings(-bps_change, outstanding)?,
    })
}
