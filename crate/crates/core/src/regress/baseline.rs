use serde::{Deserialize, Serialize};

use crate::dataset::{DerivedPanel, Variable};
use crate::scalar::Real;

use super::{ols_fit, DesignMatrix, FitResult, RegressError};

/// Nested semi-log specifications of the log yield on market share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineSpec {
    /// Constant and market share.
    ShareOnly,
    /// Adds the time trend.
    Trend,
    /// Adds the time trend and the issuance residual.
    TrendResidual,
}

impl BaselineSpec {
    pub const ALL: [BaselineSpec; 3] = [BaselineSpec::ShareOnly, BaselineSpec::Trend, BaselineSpec::TrendResidual];

    pub fn regressors(self) -> &'static [Variable] {
        match self {
            BaselineSpec::ShareOnly => &[Variable::MarketShare],
            BaselineSpec::Trend => &[Variable::MarketShare, Variable::TimeTrend],
            BaselineSpec::TrendResidual => &[Variable::MarketShare, Variable::TimeTrend, Variable::TbillChangeResidual],
        }
    }
}

pub fn baseline_design<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    spec: BaselineSpec,
) -> Result<DesignMatrix<F>, RegressError> {
    let mut b = DesignMatrix::builder(response.name(), panel.column(response).to_vec()).constant();
    for &v in spec.regressors() {
        b = b.column(v.name(), panel.column(v).to_vec());
    }
    b.build()
}

/// The three nested specifications, in order.
pub fn baseline_fits<F: Real>(panel: &DerivedPanel<F>, response: Variable) -> Result<Vec<FitResult<F>>, RegressError> {
    BaselineSpec::ALL.iter().map(|&s| ols_fit(&baseline_design(panel, response, s)?)).collect()
}
