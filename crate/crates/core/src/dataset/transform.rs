use crate::regress::{ols_fit, DesignMatrix, RegressError};
use crate::scalar::Real;

use super::DatasetError;

/// Issuance residuals are multiplied by this factor for readability.
pub const RESIDUAL_SCALE: f64 = 1000.0;

/// Holdings as a decimal fraction of outstanding bills (0.016 = 1.6%).
pub fn market_share<F: Real>(holdings: F, outstanding: F) -> Result<F, DatasetError> {
    if !(outstanding > F::zero()) || !outstanding.is_finite() {
        return Err(DatasetError::Domain(format!("outstanding must be positive, got {outstanding}")));
    }
    if !(holdings >= F::zero()) || !holdings.is_finite() {
        return Err(DatasetError::Domain(format!("holdings must be non-negative, got {holdings}")));
    }
    if holdings > outstanding {
        return Err(DatasetError::Domain(format!("holdings {holdings} exceed outstanding {outstanding}")));
    }
    Ok(holdings / outstanding)
}

/// Inverse hyperbolic sine, `ln(x + sqrt(x^2 + 1))`.
///
/// Evaluated on `|x|` and mirrored so the result is exactly odd; for very large
/// `|x|` the square root is replaced by its asymptote to avoid overflow.
pub fn ihs<F: Real>(x: F) -> F {
    if x.is_nan() {
        return x;
    }
    let a = x.abs();
    let y = if a > F::one() / F::epsilon() {
        a.ln() + F::LN_2()
    } else if a < F::lit(0.5) {
        // ln(1 + u) form keeps relative accuracy near zero
        let u = a + a * a / (F::one() + (a * a + F::one()).sqrt());
        u.ln_1p()
    } else {
        (a + (a * a + F::one()).sqrt()).ln()
    };
    if x < F::zero() {
        -y
    } else {
        y
    }
}

/// Regresses `ihs_changes` on a constant, the time trend and market share and
/// returns the residuals multiplied by [`RESIDUAL_SCALE`].
pub fn residualize_issuance<F: Real>(
    ihs_changes: &[F],
    time_trend: &[F],
    market_share: &[F],
) -> Result<Vec<F>, DatasetError> {
    let n = ihs_changes.len();
    if time_trend.len() != n || market_share.len() != n {
        return Err(DatasetError::Regress(RegressError::LengthMismatch {
            name: "residualization inputs".into(),
            len: time_trend.len().min(market_share.len()),
            expected: n,
        }));
    }
    if n < 4 {
        return Err(DatasetError::TooFewObservations { n, min: 4 });
    }
    let design = DesignMatrix::builder("tbill_change_ihs", ihs_changes.to_vec())
        .constant()
        .column("time_trend", time_trend.to_vec())
        .column("market_share", market_share.to_vec())
        .build()?;
    let fit = ols_fit(&design)?;
    let scale = F::lit(RESIDUAL_SCALE);
    Ok(fit.residuals.iter().map(|&e| e * scale).collect())
}
