use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tbill_impact::dataset::{ihs, residualize_issuance};
use tbill_impact::scalar::{dot, norm};

#[test]
fn ihs_reference_values() {
    assert_eq!(ihs(0.0f64), 0.0);
    assert!((ihs(1.0f64) - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
    assert!((ihs(1.0f64) - 0.881374).abs() < 1e-6);
    assert!(ihs(f64::MAX).is_finite());
    assert!(ihs(f64::NAN).is_nan());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn ihs_is_odd_and_matches_asinh(x in -1e12..1e12f64) {
        prop_assert_eq!(ihs(-x), -ihs(x));
        prop_assert!((ihs(x) - x.asinh()).abs() <= 4.0 * f64::EPSILON * x.asinh().abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn ihs_approaches_log_two_x(x in 10.0..1e15f64) {
        // asinh(x) - ln(2x) = ln((1 + sqrt(1 + x^-2)) / 2) in (0, 1/(4x^2)]
        let gap = ihs(x) - (2.0 * x).ln();
        prop_assert!(gap >= -1e-14 * x.ln());
        prop_assert!(gap <= 1.0 / (4.0 * x * x) + 1e-14 * x.ln());
    }
}

#[test]
fn residuals_are_orthogonal_to_regressors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(8..40);
        let trend: Vec<f64> = (1..=n).map(|t| t as f64).collect();
        let share: Vec<f64> = (0..n).map(|_| rng.random_range(0.005..0.02)).collect();
        let changes: Vec<f64> = (0..n).map(|_| ihs(rng.random_range(-2e11..2e11))).collect();
        let r = residualize_issuance(&changes, &trend, &share).unwrap();
        let ones = vec![1.0; n];
        for x in [&ones, &trend, &share] {
            let cos = dot(&r, x).abs() / (norm(&r) * norm(x));
            assert!(cos < 1e-6, "normalised inner product {cos}");
        }
        let mean = r.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-9, "mean residual {mean}");
    }
}
