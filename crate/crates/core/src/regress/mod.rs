//! Ordinary least squares with classical (homoskedastic) inference.
//!
//! Coefficients come from a Householder QR of the column-equilibrated design,
//! never from the normal equations. Standard errors are
//! `sqrt(sigma^2 * [(X'X)^-1]_jj)` with `sigma^2 = SSR / (n - k)`, and p-values are
//! two-sided Student-t with `n - k` degrees of freedom.

mod baseline;
mod dist;
pub(crate) mod qr;

use std::collections::HashSet;

use thiserror::Error;

use crate::scalar::{mean, Real};

pub use baseline::{baseline_design, baseline_fits, BaselineSpec};
pub use dist::{ln_gamma, reg_inc_beta, student_t_cdf, student_t_quantile, student_t_two_sided_p};
pub(crate) use qr::QrFactor;
pub use qr::RANK_TOLERANCE;

/// Name given to the intercept column by [`DesignBuilder::constant`].
pub const CONSTANT: &str = "const";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("design has {n} observations but {k} columns; need n > k")]
    InsufficientObservations { n: usize, k: usize },
    #[error("column `{name}` has length {len}, expected {expected}")]
    LengthMismatch { name: String, len: usize, expected: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("design must contain exactly one constant column, found {0}")]
    ConstantCount(usize),
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("rank-deficient design: `{dependent}` is collinear with [{}]", basis.join(", "))]
    RankDeficient { dependent: String, basis: Vec<String> },
    #[error("row has {got} values but the design has {expected} columns")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    InvalidLevel(f64),
}

/// Response vector plus named regressors, exactly one of which is the constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<F> {
    response_name: String,
    response: Vec<F>,
    names: Vec<String>,
    columns: Vec<Vec<F>>,
    constant: usize,
}

/// Incremental constructor for [`DesignMatrix`].
#[derive(Debug, Clone)]
pub struct DesignBuilder<F> {
    response_name: String,
    response: Vec<F>,
    names: Vec<String>,
    columns: Vec<Vec<F>>,
    constants: Vec<usize>,
}

impl<F: Real> DesignBuilder<F> {
    /// Appends an all-ones column named [`CONSTANT`].
    pub fn constant(mut self) -> Self {
        self.constants.push(self.columns.len());
        self.names.push(CONSTANT.to_string());
        self.columns.push(vec![F::one(); self.response.len()]);
        self
    }

    pub fn column(mut self, name: impl Into<String>, values: Vec<F>) -> Self {
        self.names.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn build(self) -> Result<DesignMatrix<F>, RegressError> {
        let n = self.response.len();
        let k = self.columns.len();
        let mut seen = HashSet::new();
        for (name, col) in self.names.iter().zip(&self.columns) {
            if !seen.insert(name.as_str()) {
                return Err(RegressError::DuplicateColumn(name.clone()));
            }
            if col.len() != n {
                return Err(RegressError::LengthMismatch { name: name.clone(), len: col.len(), expected: n });
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(RegressError::NonFinite(name.clone()));
            }
        }
        if self.response.iter().any(|v| !v.is_finite()) {
            return Err(RegressError::NonFinite(self.response_name));
        }
        if self.constants.len() != 1 {
            return Err(RegressError::ConstantCount(self.constants.len()));
        }
        if n <= k {
            return Err(RegressError::InsufficientObservations { n, k });
        }
        Ok(DesignMatrix {
            response_name: self.response_name,
            response: self.response,
            names: self.names,
            columns: self.columns,
            constant: self.constants[0],
        })
    }
}

impl<F: Real> DesignMatrix<F> {
    pub fn builder(response_name: impl Into<String>, response: Vec<F>) -> DesignBuilder<F> {
        DesignBuilder {
            response_name: response_name.into(),
            response,
            names: Vec::new(),
            columns: Vec::new(),
            constants: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn response(&self) -> &[F] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<F>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[F]> {
        self.names.iter().position(|n| n == name).map(|j| self.columns[j].as_slice())
    }

    pub fn constant_index(&self) -> usize {
        self.constant
    }

    /// Same regressors, different response.
    pub fn with_response(&self, response: Vec<F>) -> Self {
        assert_eq!(response.len(), self.n(), "response length must match the design");
        DesignMatrix { response, ..self.clone() }
    }

    /// Row `i` of the regressor matrix.
    pub fn row(&self, i: usize) -> Vec<F> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub(crate) fn factor(&self) -> Result<QrFactor<F>, RegressError> {
        QrFactor::factor(&self.columns).map_err(|c| RegressError::RankDeficient {
            dependent: self.names.get(c.dependent).cloned().unwrap_or_default(),
            basis: c.basis.iter().map(|&j| self.names[j].clone()).collect(),
        })
    }
}

/// Output of [`ols_fit`].
///
/// Where a standard error is exactly zero (a perfect fit) the t-statistic and
/// p-value are undefined and stored as `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<F> {
    pub response_name: String,
    pub names: Vec<String>,
    pub coefficients: Vec<F>,
    pub standard_errors: Vec<F>,
    pub t_stats: Vec<F>,
    pub p_values: Vec<F>,
    pub r_squared: F,
    pub adj_r_squared: F,
    pub ssr: F,
    /// Residual variance estimate `SSR / (n - k)`.
    pub sigma2: F,
    pub n: usize,
    pub k: usize,
    pub fitted: Vec<F>,
    pub residuals: Vec<F>,
    xtx_inv: Vec<F>,
}

impl<F: Real> FitResult<F> {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<F> {
        self.index_of(name).map(|j| self.coefficients[j])
    }

    pub fn standard_error(&self, name: &str) -> Option<F> {
        self.index_of(name).map(|j| self.standard_errors[j])
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.k
    }

    /// Unscaled covariance `(X'X)^-1` entry.
    pub fn xtx_inv(&self, i: usize, j: usize) -> F {
        self.xtx_inv[i * self.k + j]
    }

    /// `x' beta` for a row of regressor values.
    pub fn predict(&self, row: &[F]) -> Result<F, RegressError> {
        if row.len() != self.k {
            return Err(RegressError::DimensionMismatch { got: row.len(), expected: self.k });
        }
        Ok(row.iter().zip(&self.coefficients).map(|(&x, &b)| x * b).sum())
    }
}

/// Fits the design by least squares.
pub fn ols_fit<F: Real>(design: &DesignMatrix<F>) -> Result<FitResult<F>, RegressError> {
    let qr = design.factor()?;
    Ok(fit_with_factor(design, &qr))
}

pub(crate) fn fit_with_factor<F: Real>(design: &DesignMatrix<F>, qr: &QrFactor<F>) -> FitResult<F> {
    let n = design.n();
    let k = design.k();
    let y = design.response();
    let coefficients = qr.solve(y);
    let fitted: Vec<F> = (0..n)
        .map(|i| design.columns.iter().zip(&coefficients).map(|(c, &b)| c[i] * b).sum())
        .collect();
    let residuals: Vec<F> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let ssr: F = residuals.iter().map(|&e| e * e).sum();
    let df = F::from_count(n - k);
    // Residuals at roundoff level are treated as an exact fit.
    let y_ss: F = y.iter().map(|&v| v * v).sum();
    let roundoff = F::lit(64.0) * F::epsilon();
    let sigma2 = if ssr <= roundoff * roundoff * y_ss { F::zero() } else { ssr / df };
    let xtx_inv = qr.xtx_inverse();

    let mut standard_errors = Vec::with_capacity(k);
    let mut t_stats = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for (j, &b) in coefficients.iter().enumerate() {
        let se = (sigma2 * xtx_inv[j * k + j]).max(F::zero()).sqrt();
        let (t, p) = if se > F::zero() {
            let t = b / se;
            (t, student_t_two_sided_p(t, df))
        } else {
            (F::nan(), F::nan())
        };
        standard_errors.push(se);
        t_stats.push(t);
        p_values.push(p);
    }

    let ybar = mean(y);
    let sst: F = y.iter().map(|&v| (v - ybar) * (v - ybar)).sum();
    let r_squared = if sst > F::zero() {
        (F::one() - ssr / sst).max(F::zero())
    } else if ssr == F::zero() {
        F::one()
    } else {
        F::zero()
    };
    let adj_r_squared = F::one() - (F::one() - r_squared) * F::from_count(n - 1) / df;

    FitResult {
        response_name: design.response_name.clone(),
        names: design.names.clone(),
        coefficients,
        standard_errors,
        t_stats,
        p_values,
        r_squared,
        adj_r_squared,
        ssr,
        sigma2,
        n,
        k,
        fitted,
        residuals,
        xtx_inv,
    }
}

/// Conventional significance markers: 1%, 5% and 10% levels.
pub fn significance_stars<F: Real>(p_value: F) -> &'static str {
    if p_value < F::lit(0.01) {
        "***"
    } else if p_value < F::lit(0.05) {
        "**"
    } else if p_value < F::lit(0.10) {
        "*"
    } else {
        ""
    }
}

/// Pointwise confidence interval for the fitted mean at `row`.
pub fn fitted_value_ci<F: Real>(fit: &FitResult<F>, row: &[F], level: F) -> Result<(F, F), RegressError> {
    if !(level > F::zero() && level < F::one()) {
        return Err(RegressError::InvalidLevel(level.as_f64()));
    }
    let center = fit.predict(row)?;
    let k = fit.k;
    let mut quad = F::zero();
    for i in 0..k {
        for j in 0..k {
            quad = quad + row[i] * fit.xtx_inv[i * k + j] * row[j];
        }
    }
    let se = (fit.sigma2 * quad).max(F::zero()).sqrt();
    if se == F::zero() {
        return Ok((center, center));
    }
    let q = student_t_quantile((F::one() + level) / F::lit(2.0), F::from_count(fit.df_resid()));
    Ok((center - q * se, center + q * se))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_point() -> DesignMatrix<f64> {
        DesignMatrix::builder("y", vec![1.0, 2.0, 2.0, 4.0])
            .constant()
            .column("x", vec![0.0, 1.0, 2.0, 3.0])
            .build()
            .unwrap()
    }

    #[test]
    fn perfect_line() {
        let x: Vec<f64> = (0..6).map(f64::from).collect();
        let y = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let d = DesignMatrix::builder("y", y).constant().column("x", x).build().unwrap();
        let f = ols_fit(&d).unwrap();
        assert!((f.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((f.coefficients[1] - 3.0).abs() < 1e-12);
        assert!(f.ssr < 1e-24);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_point_normal_equations() {
        // Sums: n=4, x=6, y=9, xy=18, xx=14 -> slope 18/20, intercept (9 - 5.4)/4.
        let f = ols_fit(&four_point()).unwrap();
        assert!((f.coefficients[1] - 0.9).abs() < 1e-12);
        assert!((f.coefficients[0] - 0.9).abs() < 1e-12);
        assert!((f.ssr - 0.7).abs() < 1e-12);
        // se(slope) = sqrt(0.35 / 5), se(const) = sqrt(0.35 * 14 / 20)
        assert!((f.standard_errors[1] - (0.35f64 / 5.0).sqrt()).abs() < 1e-12);
        assert!((f.standard_errors[0] - (0.35f64 * 0.7).sqrt()).abs() < 1e-12);
        assert!((f.adj_r_squared - (1.0 - (1.0 - f.r_squared) * 3.0 / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_names_columns() {
        let err = DesignMatrix::builder("y", vec![1.0, 2.0, 3.0, 5.0])
            .constant()
            .column("a", vec![1.0, 2.0, 3.0, 4.0])
            .column("b", vec![2.0, 4.0, 6.0, 8.0])
            .build()
            .and_then(|d| ols_fit(&d))
            .unwrap_err();
        assert_eq!(err, RegressError::RankDeficient { dependent: "b".into(), basis: vec!["a".into()] });
    }

    #[test]
    fn design_validation() {
        let too_short = DesignMatrix::builder("y", vec![1.0, 2.0]).constant().column("x", vec![1.0, 3.0]).build();
        assert_eq!(too_short.unwrap_err(), RegressError::InsufficientObservations { n: 2, k: 2 });
        let no_const = DesignMatrix::builder("y", vec![1.0, 2.0, 3.0]).column("x", vec![1.0, 3.0, 4.0]).build();
        assert_eq!(no_const.unwrap_err(), RegressError::ConstantCount(0));
        let dup = DesignMatrix::builder("y", vec![1.0, 2.0, 3.0, 4.0])
            .constant()
            .column("x", vec![1.0, 3.0, 4.0, 0.0])
            .column("x", vec![1.0, 3.0, 4.0, 1.0])
            .build();
        assert_eq!(dup.unwrap_err(), RegressError::DuplicateColumn("x".into()));
        let nan = DesignMatrix::builder("y", vec![1.0, f64::NAN, 3.0]).constant().build();
        assert!(matches!(nan, Err(RegressError::NonFinite(_))));
    }

    #[test]
    fn stars() {
        assert_eq!(significance_stars(0.004), "***");
        assert_eq!(significance_stars(0.03), "**");
        assert_eq!(significance_stars(0.07), "*");
        assert_eq!(significance_stars(0.5), "");
        assert_eq!(significance_stars(f64::NAN), "");
    }

    #[test]
    fn perfect_fit_has_undefined_inference_and_zero_width_ci() {
        let d = DesignMatrix::builder("y", vec![1.0f64, 3.0, 5.0, 7.0])
            .constant()
            .column("x", vec![0.0, 1.0, 2.0, 3.0])
            .build()
            .unwrap();
        let f = ols_fit(&d).unwrap();
        assert_eq!(f.sigma2, 0.0);
        assert!(f.p_values.iter().all(|p| p.is_nan()));
        assert!(f.standard_errors.iter().all(|&s| s == 0.0));
        let (lo, hi) = fitted_value_ci(&f, &[1.0, 10.0], 0.95).unwrap();
        assert!((hi - lo).abs() < 1e-9);
    }

    #[test]
    fn ci_errors() {
        let f = ols_fit(&four_point()).unwrap();
        assert!(matches!(fitted_value_ci(&f, &[1.0], 0.95), Err(RegressError::DimensionMismatch { .. })));
        assert!(matches!(fitted_value_ci(&f, &[1.0, 1.0], 1.0), Err(RegressError::InvalidLevel(_))));
    }

    #[test]
    fn ci_widens_away_from_mean() {
        let f = ols_fit(&four_point()).unwrap();
        let mut last = 0.0;
        for x in [1.5, 2.0, 3.0, 5.0, 9.0] {
            let (lo, hi) = fitted_value_ci(&f, &[1.0, x], 0.95).unwrap();
            assert!(hi - lo > last);
            last = hi - lo;
        }
    }

    #[test]
    fn single_precision_fit() {
        let d = DesignMatrix::builder("y", vec![1.0f32, 2.0, 2.0, 4.0])
            .constant()
            .column("x", vec![0.0, 1.0, 2.0, 3.0])
            .build()
            .unwrap();
        let f = ols_fit(&d).unwrap();
        assert!((f.coefficients[1] - 0.9).abs() < 1e-5);
    }
}
