//! Raw quarterly panel ingestion and construction of the analysis variables.
//!
//! The input is a CSV with the exact header
//! `period_index,date_label,tether_holdings_usd,tbills_outstanding_usd,yield_1m_pct,yield_3m_pct`.
//! Holdings and outstanding are in USD, yields in percent per annum.

mod summary;
mod transform;

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regress::RegressError;
use crate::scalar::Real;

pub use summary::{
    pearson, reference_consistency, summary_stats, Envelope, EnvelopeCheck, SummaryTable, VariableSummary,
    REFERENCE_ENVELOPES,
};
pub use transform::{ihs, market_share, residualize_issuance, RESIDUAL_SCALE};

/// Column names of the input CSV, in order.
pub const CSV_HEADER: [&str; 6] = [
    "period_index",
    "date_label",
    "tether_holdings_usd",
    "tbills_outstanding_usd",
    "yield_1m_pct",
    "yield_3m_pct",
];

/// Minimum panel length accepted by [`derive_panel`].
pub const MIN_OBSERVATIONS: usize = 5;

/// Where a validation problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Line(u64),
    Period(u32),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(l) => write!(f, "line {l}"),
            Position::Period(p) => write!(f, "period {p}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("malformed row at {at}: {message}")]
    MalformedRow { at: Position, message: String },
    #[error("{at}: non-positive yield in `{column}` ({value})")]
    NonPositiveYield { at: Position, column: &'static str, value: f64 },
    #[error("{at}: invalid `{column}` ({value}): {reason}")]
    InvalidValue { at: Position, column: &'static str, value: f64, reason: &'static str },
    #[error("{at}: holdings {holdings} exceed outstanding {outstanding}")]
    HoldingsExceedOutstanding { at: Position, holdings: f64, outstanding: f64 },
    #[error("duplicate period_index {0}")]
    DuplicatePeriod(u32),
    #[error("non-consecutive period_index: expected {expected}, found {found}")]
    NonConsecutivePeriod { expected: u32, found: u32 },
    #[error("panel has {n} observations, at least {min} required")]
    TooFewObservations { n: usize, min: usize },
    #[error("panel is empty")]
    Empty,
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

impl DatasetError {
    /// True for failures of the underlying reader rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, DatasetError::Io(_))
    }
}

/// One period of raw inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<F> {
    /// Time-trend value; consecutive from 1 within a panel.
    pub period_index: u32,
    pub date_label: String,
    /// Direct T-bill holdings, USD.
    pub tether_holdings: F,
    /// Total outstanding T-bills, USD.
    pub tbills_outstanding: F,
    /// Percent per annum.
    pub yield_1m: F,
    pub yield_3m: F,
}

impl<F: Real> Observation<F> {
    fn check(&self, at: Position) -> Result<(), DatasetError> {
        let yields = [("yield_1m_pct", self.yield_1m), ("yield_3m_pct", self.yield_3m)];
        for (column, v) in yields {
            if !(v > F::zero()) || !v.is_finite() {
                return Err(DatasetError::NonPositiveYield { at, column, value: v.as_f64() });
            }
        }
        if self.period_index < 1 {
            return Err(DatasetError::InvalidValue {
                at,
                column: "period_index",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        if !(self.tbills_outstanding > F::zero()) || !self.tbills_outstanding.is_finite() {
            return Err(DatasetError::InvalidValue {
                at,
                column: "tbills_outstanding_usd",
                value: self.tbills_outstanding.as_f64(),
                reason: "must be positive",
            });
        }
        if !(self.tether_holdings >= F::zero()) || !self.tether_holdings.is_finite() {
            return Err(DatasetError::InvalidValue {
                at,
                column: "tether_holdings_usd",
                value: self.tether_holdings.as_f64(),
                reason: "must be non-negative",
            });
        }
        if self.tether_holdings > self.tbills_outstanding {
            return Err(DatasetError::HoldingsExceedOutstanding {
                at,
                holdings: self.tether_holdings.as_f64(),
                outstanding: self.tbills_outstanding.as_f64(),
            });
        }
        Ok(())
    }
}

/// Checks row invariants and that periods run 1, 2, ... without gaps after sorting.
pub fn validate_observations<F: Real>(observations: &mut [Observation<F>]) -> Result<(), DatasetError> {
    for o in observations.iter() {
        o.check(Position::Period(o.period_index))?;
    }
    check_periods(observations)
}

fn check_periods<F>(observations: &mut [Observation<F>]) -> Result<(), DatasetError> {
    observations.sort_by_key(|o| o.period_index);
    for w in observations.windows(2) {
        if w[0].period_index == w[1].period_index {
            return Err(DatasetError::DuplicatePeriod(w[0].period_index));
        }
    }
    for (i, o) in observations.iter().enumerate() {
        let expected = i as u32 + 1;
        if o.period_index != expected {
            return Err(DatasetError::NonConsecutivePeriod { expected, found: o.period_index });
        }
    }
    Ok(())
}

/// Reads and validates a panel from CSV.
pub fn load_panel<F: Real, R: Read>(source: R) -> Result<Vec<Observation<F>>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source);
    let header = reader.headers().map_err(csv_error)?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != CSV_HEADER {
        if let Some(missing) = CSV_HEADER.iter().find(|c| !found.contains(c)) {
            return Err(DatasetError::MissingColumn((*missing).to_string()));
        }
        return Err(DatasetError::HeaderMismatch { expected: CSV_HEADER.join(","), found: found.join(",") });
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let at = Position::Line(line);
        let field = |i: usize| record.get(i).unwrap_or("");
        let number = |i: usize| -> Result<F, DatasetError> {
            let raw = field(i);
            raw.parse::<f64>().ok().and_then(F::from_f64).ok_or_else(|| DatasetError::MalformedRow {
                at,
                message: format!("`{}` is not a number: {raw:?}", CSV_HEADER[i]),
            })
        };
        let period_index = field(0).parse::<u32>().map_err(|_| DatasetError::MalformedRow {
            at,
            message: format!("`period_index` is not a positive integer: {:?}", field(0)),
        })?;
        let obs = Observation {
            period_index,
            date_label: field(1).to_string(),
            tether_holdings: number(2)?,
            tbills_outstanding: number(3)?,
            yield_1m: number(4)?,
            yield_3m: number(5)?,
        };
        obs.check(at)?;
        out.push(obs);
    }
    if out.is_empty() {
        return Err(DatasetError::Empty);
    }
    check_periods(&mut out)?;
    Ok(out)
}

fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DatasetError::Io(io),
        csv::ErrorKind::UnequalLengths { len, expected_len, .. } => DatasetError::MalformedRow {
            at: Position::Line(line.unwrap_or(0)),
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => DatasetError::MalformedRow {
            at: Position::Line(line.unwrap_or(0)),
            message: format!("{other:?}"),
        },
    }
}

/// Writes observations in the input CSV schema.
pub fn write_panel<F: Real, W: Write>(sink: W, observations: &[Observation<F>]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for o in observations {
        w.write_record([
            o.period_index.to_string(),
            o.date_label.clone(),
            format!("{}", o.tether_holdings),
            format!("{}", o.tbills_outstanding),
            format!("{}", o.yield_1m),
            format!("{}", o.yield_3m),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Analysis variables, numbered as in the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    LogYield1m,
    LogYield3m,
    MarketShare,
    TimeTrend,
    TbillChangeIhs,
    TbillChangeResidual,
}

impl Variable {
    /// Variables (i) through (vi).
    pub const SUMMARY: [Variable; 6] = [
        Variable::LogYield1m,
        Variable::LogYield3m,
        Variable::MarketShare,
        Variable::TimeTrend,
        Variable::TbillChangeIhs,
        Variable::TbillChangeResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::LogYield1m => "log_yield_1m",
            Variable::LogYield3m => "log_yield_3m",
            Variable::MarketShare => "market_share",
            Variable::TimeTrend => "time_trend",
            Variable::TbillChangeIhs => "tbill_change_ihs",
            Variable::TbillChangeResidual => "tbill_change_residual",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variable::LogYield1m => "Log 1-month yield",
            Variable::LogYield3m => "Log 3-month yield",
            Variable::MarketShare => "Market share",
            Variable::TimeTrend => "Time trend",
            Variable::TbillChangeIhs => "T-bill change (IHS)",
            Variable::TbillChangeResidual => "T-bill change residual",
        }
    }

    pub fn roman(self) -> &'static str {
        match self {
            Variable::LogYield1m => "(i)",
            Variable::LogYield3m => "(ii)",
            Variable::MarketShare => "(iii)",
            Variable::TimeTrend => "(iv)",
            Variable::TbillChangeIhs => "(v)",
            Variable::TbillChangeResidual => "(vi)",
        }
    }

    pub fn from_name(name: &str) -> Option<Variable> {
        Variable::SUMMARY.into_iter().find(|v| v.name() == name)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Treatment of the first period, which has no prior outstanding amount.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstPeriod {
    /// Keep the period with a change of zero (IHS 0).
    #[default]
    Backfill,
    /// Drop the period from the derived panel.
    Drop,
}

/// Design-ready variables, one entry per retained period.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedPanel<F> {
    pub date_labels: Vec<String>,
    pub yield_1m: Vec<F>,
    pub yield_3m: Vec<F>,
    pub tether_holdings: Vec<F>,
    pub tbills_outstanding: Vec<F>,
    /// Decimal fraction.
    pub market_share: Vec<F>,
    /// Natural log of the percent yield.
    pub log_yield_1m: Vec<F>,
    pub log_yield_3m: Vec<F>,
    pub time_trend: Vec<F>,
    /// First difference of outstanding, USD.
    pub tbill_change: Vec<F>,
    pub tbill_change_ihs: Vec<F>,
    /// Issuance residual scaled by [`RESIDUAL_SCALE`].
    pub tbill_change_residual: Vec<F>,
    pub first_period: FirstPeriod,
}

impl<F: Real> DerivedPanel<F> {
    pub fn len(&self) -> usize {
        self.market_share.len()
    }

    pub fn is_empty(&self) -> bool {
        self.market_share.is_empty()
    }

    pub fn column(&self, variable: Variable) -> &[F] {
        match variable {
            Variable::LogYield1m => &self.log_yield_1m,
            Variable::LogYield3m => &self.log_yield_3m,
            Variable::MarketShare => &self.market_share,
            Variable::TimeTrend => &self.time_trend,
            Variable::TbillChangeIhs => &self.tbill_change_ihs,
            Variable::TbillChangeResidual => &self.tbill_change_residual,
        }
    }

    /// Raw percent yield matching a log-yield response.
    pub fn raw_yield(&self, response: Variable) -> Option<&[F]> {
        match response {
            Variable::LogYield1m => Some(&self.yield_1m),
            Variable::LogYield3m => Some(&self.yield_3m),
            _ => None,
        }
    }
}

/// Builds every derived variable from a validated panel.
pub fn derive_panel<F: Real>(
    observations: &[Observation<F>],
    first_period: FirstPeriod,
) -> Result<DerivedPanel<F>, DatasetError> {
    let mut obs = observations.to_vec();
    validate_observations(&mut obs)?;
    if obs.len() < MIN_OBSERVATIONS {
        return Err(DatasetError::TooFewObservations { n: obs.len(), min: MIN_OBSERVATIONS });
    }

    let mut tbill_change: Vec<F> = Vec::with_capacity(obs.len());
    tbill_change.push(F::zero());
    for w in obs.windows(2) {
        tbill_change.push(w[1].tbills_outstanding - w[0].tbills_outstanding);
    }
    let skip = match first_period {
        FirstPeriod::Backfill => 0,
        FirstPeriod::Drop => 1,
    };
    let kept = &obs[skip..];
    let tbill_change = tbill_change.split_off(skip);

    let market_share = kept
        .iter()
        .map(|o| market_share(o.tether_holdings, o.tbills_outstanding))
        .collect::<Result<Vec<_>, _>>()?;
    let time_trend: Vec<F> = kept.iter().map(|o| F::from_u32(o.period_index).unwrap()).collect();
    let tbill_change_ihs: Vec<F> = tbill_change.iter().map(|&c| ihs(c)).collect();
    let tbill_change_residual = residualize_issuance(&tbill_change_ihs, &time_trend, &market_share)?;

    Ok(DerivedPanel {
        date_labels: kept.iter().map(|o| o.date_label.clone()).collect(),
        yield_1m: kept.iter().map(|o| o.yield_1m).collect(),
        yield_3m: kept.iter().map(|o| o.yield_3m).collect(),
        tether_holdings: kept.iter().map(|o| o.tether_holdings).collect(),
        tbills_outstanding: kept.iter().map(|o| o.tbills_outstanding).collect(),
        log_yield_1m: kept.iter().map(|o| o.yield_1m.ln()).collect(),
        log_yield_3m: kept.iter().map(|o| o.yield_3m.ln()).collect(),
        market_share,
        time_trend,
        tbill_change,
        tbill_change_ihs,
        tbill_change_residual,
        first_period,
    })
}
