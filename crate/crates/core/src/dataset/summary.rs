use serde::Serialize;

use crate::scalar::{mean, Real};

use super::{DatasetError, DerivedPanel, Variable};

/// Moments of a single variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableSummary<F> {
    pub variable: Variable,
    pub mean: F,
    /// Sample standard deviation (divisor `n - 1`).
    pub sd: F,
    pub min: F,
    pub max: F,
}

/// Per-variable moments plus the Pearson correlation matrix.
///
/// `correlations[i][j]` is `None` when either variable has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable<F> {
    pub n: usize,
    pub variables: Vec<VariableSummary<F>>,
    pub correlations: Vec<Vec<Option<F>>>,
}

impl<F: Real> SummaryTable<F> {
    pub fn get(&self, variable: Variable) -> Option<&VariableSummary<F>> {
        self.variables.iter().find(|v| v.variable == variable)
    }

    pub fn correlation(&self, a: Variable, b: Variable) -> Option<F> {
        let i = self.variables.iter().position(|v| v.variable == a)?;
        let j = self.variables.iter().position(|v| v.variable == b)?;
        self.correlations[i][j]
    }

    /// Text rendering: moments, then the strictly lower-triangular correlations.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let k = self.variables.len();
        out.push_str(&format!("{:<34} {:>9} {:>9} {:>9} {:>9}", "Variable", "Mean", "SD", "Min", "Max"));
        for v in &self.variables[..k - 1] {
            out.push_str(&format!(" {:>7}", v.variable.roman()));
        }
        out.push('\n');
        for (i, v) in self.variables.iter().enumerate() {
            let label = format!("{} {}", v.variable.roman(), v.variable.label());
            out.push_str(&format!(
                "{:<34} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
                label,
                v.mean.as_f64(),
                v.sd.as_f64(),
                v.min.as_f64(),
                v.max.as_f64()
            ));
            for c in &self.correlations[i][..i] {
                match c {
                    Some(r) => out.push_str(&format!(" {:>7.2}", r.as_f64())),
                    None => out.push_str(&format!(" {:>7}", "n/a")),
                }
            }
            out.push('\n');
        }
        out.push_str(&format!("n = {}\n", self.n));
        out
    }
}

/// Pearson correlation; `None` if either series has zero variance or the
/// lengths differ.
pub fn pearson<F: Real>(x: &[F], y: &[F]) -> Option<F> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    if sxx <= F::zero() || syy <= F::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-F::one()).min(F::one()))
}

pub(crate) fn describe<F: Real>(variable: Variable, xs: &[F]) -> VariableSummary<F> {
    let m = mean(xs);
    let n = xs.len();
    let sd = if n > 1 {
        let ss: F = xs.iter().map(|&v| (v - m) * (v - m)).sum();
        (ss / F::from_count(n - 1)).sqrt()
    } else {
        F::zero()
    };
    let min = xs.iter().copied().fold(F::infinity(), F::min);
    let max = xs.iter().copied().fold(F::neg_infinity(), F::max);
    VariableSummary { variable, mean: m, sd, min, max }
}

/// Moments and correlations of the six analysis variables.
pub fn summary_stats<F: Real>(panel: &DerivedPanel<F>) -> Result<SummaryTable<F>, DatasetError> {
    if panel.len() == 0 {
        return Err(DatasetError::Empty);
    }
    let vars = Variable::SUMMARY;
    let variables = vars.iter().map(|&v| describe(v, panel.column(v))).collect();
    let correlations = vars
        .iter()
        .map(|&a| vars.iter().map(|&b| pearson(panel.column(a), panel.column(b))).collect())
        .collect();
    Ok(SummaryTable { n: panel.len(), variables, correlations })
}

/// Reported range of a variable in the reference sample, at two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub variable: Variable,
    pub min: f64,
    pub max: f64,
}

/// Reference ranges for the variables whose units are unambiguous. Each bound
/// is widened by half a unit in the last reported digit.
pub const REFERENCE_ENVELOPES: [Envelope; 4] = [
    Envelope { variable: Variable::LogYield1m, min: -0.65, max: 1.71 },
    Envelope { variable: Variable::LogYield3m, min: -0.46, max: 1.70 },
    Envelope { variable: Variable::MarketShare, min: 0.01, max: 0.02 },
    Envelope { variable: Variable::TimeTrend, min: 1.0, max: 13.0 },
];

const ENVELOPE_SLACK: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub variable: Variable,
    pub observed_min: f64,
    pub observed_max: f64,
    pub envelope_min: f64,
    pub envelope_max: f64,
    pub within: bool,
}

/// Compares observed ranges with [`REFERENCE_ENVELOPES`].
pub fn reference_consistency<F: Real>(table: &SummaryTable<F>) -> Vec<EnvelopeCheck> {
    REFERENCE_ENVELOPES
        .iter()
        .filter_map(|env| {
            let s = table.get(env.variable)?;
            let (lo, hi) = (env.min - ENVELOPE_SLACK, env.max + ENVELOPE_SLACK);
            let (omin, omax) = (s.min.as_f64(), s.max.as_f64());
            Some(EnvelopeCheck {
                variable: env.variable,
                observed_min: omin,
                observed_max: omax,
                envelope_min: lo,
                envelope_max: hi,
                within: omin >= lo && omax <= hi,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_and_anti_correlation() {
        let x = [1.0f64, 2.0, 4.0, 8.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_is_undefined() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), None);
    }

    #[test]
    fn describe_moments() {
        let d = describe(Variable::TimeTrend, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.mean, 2.5);
        assert!((d.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((d.min, d.max), (1.0, 4.0));
    }
}
