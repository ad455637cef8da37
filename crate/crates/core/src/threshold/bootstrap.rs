use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{DerivedPanel, Variable};
use crate::scalar::Real;

use super::{lr_statistic, ThresholdError, ThresholdProblem, ThresholdSpec};

/// Outcome of the bootstrap linearity test.
#[derive(Debug, Clone, PartialEq)]
pub struct LrTest<F> {
    pub lr_statistic: F,
    /// `(1 + #{LR* >= LR}) / (1 + replications)`.
    pub bootstrap_p: F,
    pub ssr_linear: F,
    pub ssr_threshold: F,
    pub tau_hat: F,
    /// Bootstrap statistics in replication order.
    pub draws: Vec<F>,
}

/// Random stream for one replication: ChaCha8 keyed by `seed`, stream number
/// `replication`. Independent of which thread evaluates it.
fn replication_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication as u64);
    rng
}

impl<F: Real> ThresholdProblem<F> {
    /// Observed LR statistic and its residual-bootstrap p-value.
    ///
    /// Each replication draws `y* = fitted_linear + e*` with `e*` resampled
    /// with replacement from the linear residuals, then repeats the full grid
    /// search on `y*`. Replications run on the current rayon pool.
    pub fn lr_test(&self, y: &[F], replications: usize, seed: u64) -> Result<LrTest<F>, ThresholdError> {
        if replications == 0 {
            return Err(ThresholdError::NoReplications);
        }
        let n = self.n();
        let search = self.search(y);
        let linear = self.linear_factor();
        let ssr_linear = linear.ssr(y);
        let lr = lr_statistic(n, ssr_linear, search.ssr_min);

        let beta = linear.solve(y);
        let design = self.linear_design();
        let fitted: Vec<F> =
            (0..n).map(|i| design.columns().iter().zip(&beta).map(|(c, &b)| c[i] * b).sum()).collect();
        let residuals: Vec<F> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();

        let draws: Vec<F> = (0..replications)
            .into_par_iter()
            .map(|b| {
                let mut rng = replication_rng(seed, b);
                let y_star: Vec<F> = fitted.iter().map(|&f| f + residuals[rng.random_range(0..n)]).collect();
                lr_statistic(n, linear.ssr(&y_star), self.min_ssr(&y_star))
            })
            .collect();

        let exceed = draws.iter().filter(|&&d| d >= lr).count();
        let bootstrap_p = F::from_count(1 + exceed) / F::from_count(1 + replications);
        Ok(LrTest {
            lr_statistic: lr,
            bootstrap_p,
            ssr_linear,
            ssr_threshold: search.ssr_min,
            tau_hat: search.tau_hat,
            draws,
        })
    }
}

/// Bootstrap likelihood-ratio test of the linear model against the
/// two-regime alternative.
pub fn lr_linearity_test<F: Real>(
    panel: &DerivedPanel<F>,
    response: Variable,
    spec: &ThresholdSpec<F>,
    replications: usize,
    seed: u64,
) -> Result<LrTest<F>, ThresholdError> {
    ThresholdProblem::new(panel, response, spec)?.lr_test(panel.column(response), replications, seed)
}
