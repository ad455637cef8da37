use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::regress::{significance_stars, FitResult, CONSTANT};
use crate::scalar::{round_half_away, Real};
use crate::threshold::{columns, Regime, ThresholdFit};

use super::AnalysisError;

/// Decimal places of every rendered number.
const DIGITS: i32 = 3;
const LABEL_WIDTH: usize = 32;
const COLUMN_WIDTH: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Baseline semi-log models, one column per specification.
    Table2,
    /// Threshold models, one column per response.
    Table3,
}

impl Layout {
    fn name(self) -> &'static str {
        match self {
            Layout::Table2 => "baseline",
            Layout::Table3 => "threshold",
        }
    }
}

/// One column of a rendered table.
#[derive(Debug, Clone, Copy)]
pub enum ModelFit<'a, F> {
    Ols(&'a FitResult<F>),
    Threshold(&'a ThresholdFit<F>),
}

impl<F> ModelFit<'_, F> {
    fn kind(&self) -> &'static str {
        match self {
            ModelFit::Ols(_) => "ols",
            ModelFit::Threshold(_) => "threshold",
        }
    }

    fn result(&self) -> &FitResult<F> {
        match self {
            ModelFit::Ols(f) => f,
            ModelFit::Threshold(t) => &t.fit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    /// `None` when undefined (zero standard error).
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub stars: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub variable: String,
    /// Decimal fraction.
    pub tau: f64,
    /// `None` when the statistic is infinite (exact threshold fit).
    pub lr: Option<f64>,
    pub p_boot: f64,
    pub replications: usize,
    pub seed: u64,
    pub n_low: usize,
    pub n_high: usize,
    pub ssr_linear: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    /// Column label, e.g. `(2)`.
    pub model: String,
    pub kind: String,
    pub response: String,
    pub n: usize,
    pub k: usize,
    pub coefficients: Vec<CoefficientReport>,
    pub r2: f64,
    pub adj_r2: f64,
    pub ssr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
}

impl ModelReport {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientReport> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub layout: Layout,
    pub models: Vec<ModelReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTable {
    pub text: String,
    pub report: TableReport,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Display label of a regressor name.
pub fn coefficient_label(name: &str) -> &str {
    match name {
        CONSTANT => "Constant",
        columns::SHARE => "Market share",
        columns::SHARE_LOW => "Market share (low regime)",
        columns::SHARE_HIGH => "Market share (high regime)",
        columns::INTERCEPT_SHIFT => "Intercept shift (high regime)",
        columns::TREND => "Time trend",
        columns::RESIDUAL => "T-bill change residual",
        other => other,
    }
}

fn response_label(name: &str) -> &str {
    match name {
        "log_yield_1m" => "Log 1m yield",
        "log_yield_3m" => "Log 3m yield",
        other => other,
    }
}

/// `x` rounded half away from zero to three decimals, without a negative zero.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "n/a".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_half_away(x, DIGITS);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{:.*}", DIGITS as usize, r)
}

fn model_report<F: Real>(label: String, fit: &ModelFit<'_, F>) -> ModelReport {
    let r = fit.result();
    let coefficients = (0..r.k)
        .map(|i| CoefficientReport {
            name: r.names[i].clone(),
            estimate: r.coefficients[i].as_f64(),
            se: r.standard_errors[i].as_f64(),
            t: finite(r.t_stats[i].as_f64()),
            p: finite(r.p_values[i].as_f64()),
            stars: significance_stars(r.p_values[i]).to_string(),
        })
        .collect();
    let threshold = match fit {
        ModelFit::Ols(_) => None,
        ModelFit::Threshold(t) => Some(ThresholdReport {
            variable: t.threshold_variable.name().to_string(),
            tau: t.tau.as_f64(),
            lr: finite(t.lr_statistic.as_f64()),
            p_boot: t.bootstrap_p.as_f64(),
            replications: t.replications,
            seed: t.seed,
            n_low: t.count(Regime::Low),
            n_high: t.count(Regime::High),
            ssr_linear: t.ssr_linear.as_f64(),
        }),
    };
    ModelReport {
        model: label,
        kind: fit.kind().to_string(),
        response: r.response_name.clone(),
        n: r.n,
        k: r.k,
        coefficients,
        r2: r.r_squared.as_f64(),
        adj_r2: r.adj_r_squared.as_f64(),
        ssr: r.ssr.as_f64(),
        threshold,
    }
}

/// Row order: regressors in order of first appearance, constant last.
fn row_names(models: &[ModelReport]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for m in models {
        for c in &m.coefficients {
            if c.name != CONSTANT && !names.contains(&c.name) {
                names.push(c.name.clone());
            }
        }
    }
    if models.iter().any(|m| m.coefficient(CONSTANT).is_some()) {
        names.push(CONSTANT.to_string());
    }
    names
}

fn push_row(out: &mut String, label: &str, cells: &[String]) {
    let _ = write!(out, "{label:<LABEL_WIDTH$}");
    for c in cells {
        // wide cells still keep one separating space
        let _ = write!(out, " {c:>w$}", w = COLUMN_WIDTH - 1);
    }
    out.push('\n');
}

fn render_text(report: &TableReport) -> String {
    let models = &report.models;
    let width = LABEL_WIDTH + COLUMN_WIDTH * models.len();
    let rule = "-".repeat(width);
    let mut out = String::new();

    push_row(&mut out, "", &models.iter().map(|m| m.model.clone()).collect::<Vec<_>>());
    push_row(&mut out, "", &models.iter().map(|m| response_label(&m.response).to_string()).collect::<Vec<_>>());
    out.push_str(&rule);
    out.push('\n');

    for name in row_names(models) {
        let est: Vec<String> = models
            .iter()
            .map(|m| m.coefficient(&name).map(|c| format!("{}{}", format_number(c.estimate), c.stars)).unwrap_or_default())
            .collect();
        let se: Vec<String> = models
            .iter()
            .map(|m| m.coefficient(&name).map(|c| format!("({})", format_number(c.se))).unwrap_or_default())
            .collect();
        push_row(&mut out, coefficient_label(&name), &est);
        push_row(&mut out, "", &se);
    }
    out.push_str(&rule);
    out.push('\n');

    if report.layout == Layout::Table3 {
        let t = |f: &dyn Fn(&ThresholdReport) -> String| -> Vec<String> {
            models.iter().map(|m| m.threshold.as_ref().map(f).unwrap_or_default()).collect()
        };
        push_row(&mut out, "Threshold (%)", &t(&|r| format_number(r.tau * 100.0)));
        push_row(&mut out, "Observations low / high", &t(&|r| format!("{} / {}", r.n_low, r.n_high)));
        push_row(&mut out, "LR statistic", &t(&|r| r.lr.map_or_else(|| "inf".to_string(), format_number)));
        push_row(&mut out, "Bootstrap p-value", &t(&|r| format_number(r.p_boot)));
    }
    push_row(&mut out, "Observations", &models.iter().map(|m| m.n.to_string()).collect::<Vec<_>>());
    push_row(&mut out, "R-squared", &models.iter().map(|m| format_number(m.r2)).collect::<Vec<_>>());
    push_row(&mut out, "Adjusted R-squared", &models.iter().map(|m| format_number(m.adj_r2)).collect::<Vec<_>>());
    out.push_str(&rule);
    out.push('\n');
    out.push_str("Standard errors in parentheses. *** p<0.01, ** p<0.05, * p<0.1\n");
    if report.layout == Layout::Table3 {
        out.push_str("Linearity p-value from a residual bootstrap of the LR statistic.\n");
    }
    out
}

/// Renders fits side by side. Columns are labelled `(first_column)`,
/// `(first_column + 1)`, ...
///
/// [`Layout::Table2`] accepts only OLS fits and [`Layout::Table3`] only
/// threshold fits.
pub fn render_table<F: Real>(
    fits: &[ModelFit<'_, F>],
    layout: Layout,
    first_column: usize,
) -> Result<RenderedTable, AnalysisError> {
    if fits.is_empty() {
        return Err(AnalysisError::NoFits);
    }
    let expected = match layout {
        Layout::Table2 => "ols",
        Layout::Table3 => "threshold",
    };
    for (i, f) in fits.iter().enumerate() {
        if f.kind() != expected {
            return Err(AnalysisError::MixedFitKinds {
                layout: layout.name(),
                expected,
                found: f.kind(),
                column: first_column + i,
            });
        }
    }
    let models = fits
        .iter()
        .enumerate()
        .map(|(i, f)| model_report(format!("({})", first_column + i), f))
        .collect();
    let report = TableReport { layout, models };
    Ok(RenderedTable { text: render_text(&report), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::{ols_fit, DesignMatrix};

    fn line_fit(perfect: bool) -> FitResult<f64> {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = if perfect { vec![3.0, 5.0, 7.0, 9.0, 11.0] } else { vec![3.1, 4.8, 7.3, 8.9, 11.2] };
        ols_fit(&DesignMatrix::builder("log_yield_1m", y).constant().column(columns::SHARE, x).build().unwrap()).unwrap()
    }

    #[test]
    fn rounding_and_negative_zero() {
        assert_eq!(format_number(-3.7955), "-3.796");
        assert_eq!(format_number(1.0), "1.000");
        assert_eq!(format_number(-0.0001), "0.000");
        assert_eq!(format_number(f64::NAN), "n/a");
    }

    #[test]
    fn perfect_fit_renders() {
        let fit = line_fit(true);
        let t = render_table(&[ModelFit::Ols(&fit)], Layout::Table2, 1).unwrap();
        let r2 = t.text.lines().find(|l| l.starts_with("R-squared")).unwrap();
        assert!(r2.trim_end().ends_with("1.000"), "{r2}");
        let c = &t.report.models[0].coefficients[0];
        assert_eq!(c.stars, "");
        assert_eq!(c.p, None);
        // undefined p-values serialise as null
        let json = serde_json::to_string(&t.report).unwrap();
        assert!(json.contains("\"p\":null"));
    }

    #[test]
    fn rejects_mixed_kinds_and_empty() {
        let fit = line_fit(false);
        assert!(matches!(
            render_table(&[ModelFit::Ols(&fit)], Layout::Table3, 1),
            Err(AnalysisError::MixedFitKinds { column: 1, .. })
        ));
        assert_eq!(render_table::<f64>(&[], Layout::Table2, 1), Err(AnalysisError::NoFits));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let fit = line_fit(false);
        let t = render_table(&[ModelFit::Ols(&fit)], Layout::Table2, 4).unwrap();
        let back: TableReport = serde_json::from_str(&serde_json::to_string(&t.report).unwrap()).unwrap();
        assert_eq!(back, t.report);
        assert_eq!(back.models[0].model, "(4)");
        assert_eq!(back.models[0].coefficients[1].estimate, fit.coefficients[1]);
    }

    #[test]
    fn constant_row_comes_last() {
        let fit = line_fit(false);
        let t = render_table(&[ModelFit::Ols(&fit)], Layout::Table2, 1).unwrap();
        let share = t.text.find("Market share").unwrap();
        let constant = t.text.find("Constant").unwrap();
        assert!(share < constant);
    }
}
