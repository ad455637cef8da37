//! Econometrics of stablecoin Treasury-bill holdings and bill yields.
//!
//! The pipeline runs [`dataset`] (load, validate, derive) → [`regress`]
//! (semi-log OLS) and [`threshold`] (two-regime model, bootstrap linearity
//! test) → [`analysis`] (basis points, counterfactuals, tables, figure).
//! Everything numeric is generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64` or `f32`.

pub mod analysis;
pub mod dataset;
pub mod regress;
pub mod scalar;
pub mod synth;
pub mod threshold;

pub type Observation = dataset::Observation<f64>;
pub type Panel = dataset::DerivedPanel<f64>;
pub type Fit = regress::FitResult<f64>;
pub type Design = regress::DesignMatrix<f64>;
pub type Spec = threshold::ThresholdSpec<f64>;
pub type ThresholdFit = threshold::ThresholdFit<f64>;
pub type Summary = dataset::SummaryTable<f64>;

pub type Panel32 = dataset::DerivedPanel<f32>;
pub type Fit32 = regress::FitResult<f32>;
pub type ThresholdFit32 = threshold::ThresholdFit<f32>;
