//! Economic reading of fitted models plus table and figure rendering.

mod figure;
mod impact;
mod table;

use thiserror::Error;

use crate::regress::RegressError;

pub use figure::{regime_figure_frame, render_regime_figure, FigureFrame, FIGURE_HEIGHT, FIGURE_WIDTH};
pub use impact::{
    annual_savings, bps_impact, counterfactual_yield, impact_report, ImpactQuery, ImpactReport, SemiElasticity,
    BPS_PER_PERCENT,
};
pub use table::{
    coefficient_label, format_number, render_table, CoefficientReport, Layout, ModelFit, ModelReport, RenderedTable,
    TableReport, ThresholdReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("baseline yield must be positive, got {0}")]
    NonPositiveYield(f64),
    #[error("inputs must be finite")]
    NonFinite,
    #[error("outstanding amount must be non-negative, got {0}")]
    NegativeOutstanding(f64),
    #[error("market share {0} is outside [0, 1]")]
    ShareOutOfRange(f64),
    #[error("fit has no `{0}` coefficient")]
    MissingCoefficient(String),
    #[error("no fits to render")]
    NoFits,
    #[error("{layout} layout expects {expected} fits, got a {found} fit in column {column}")]
    MixedFitKinds { layout: &'static str, expected: &'static str, found: &'static str, column: usize },
    #[error(transparent)]
    Regress(#[from] RegressError),
}
