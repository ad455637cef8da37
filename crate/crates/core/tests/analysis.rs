use proptest::prelude::*;
use roxmltree::Document;
use tbill_impact::analysis::{
    annual_savings, bps_impact, counterfactual_yield, format_number, impact_report, regime_figure_frame,
    render_regime_figure, render_table, ImpactQuery, Layout, ModelFit, SemiElasticity, TableReport,
};
use tbill_impact::dataset::{derive_panel, DerivedPanel, FirstPeriod, Variable};
use tbill_impact::regress::{ols_fit, DesignMatrix};
use tbill_impact::scalar::round_half_away;
use tbill_impact::synth::{simulate, SimConfig};
use tbill_impact::threshold::{threshold_fit, ThresholdFit, ThresholdSpec};

fn bps(beta: f64, ds: f64, y: f64) -> f64 {
    bps_impact(&ImpactQuery::new(beta, ds, y).unwrap()).unwrap()
}

#[test]
fn regime_illustrations() {
    assert!((bps(-1.730, 0.001, 4.24) + 0.73).abs() <= 0.01);
    assert!((bps(-6.264, 0.001, 4.24) + 2.66).abs() <= 0.01);
    assert_eq!(bps(-6.264, 0.0, 4.24), 0.0);
}

#[test]
fn savings_figures() {
    assert!((annual_savings(24.0f64, 6.2e12).unwrap() - 14.88e9).abs() <= 0.01e9);
    assert!((annual_savings(16.0f64, 6.2e12).unwrap() - 9.92e9).abs() <= 0.01e9);
}

#[test]
fn baseline_semi_elasticity() {
    let q = ImpactQuery::new(-3.795f64, 0.01, 4.16).unwrap();
    assert!((q.relative_change() + 0.03795).abs() < 1e-15);
    let b = bps_impact(&q).unwrap();
    assert!((-16.0..=-14.0).contains(&b), "{b}");
    let cf = counterfactual_yield(&SemiElasticity::Linear { beta: -3.795f64 }, 0.02, 0.01, 4.16).unwrap();
    assert!((cf - 4.32).abs() < 0.005, "{cf}");
    let gap = (cf - 4.16) * 100.0;
    assert!((14.0..=17.0).contains(&gap), "{gap}");
}

#[test]
fn piecewise_counterfactual_matches_two_segment_sum() {
    let m = SemiElasticity::Piecewise { tau: 0.00973, low: -1.730, high: -6.264 };
    // reference 0.008 below tau, actual 0.016 above it
    let by_hand = -1.730 * (0.00973 - 0.008) + -6.264 * (0.016 - 0.00973);
    let cf = counterfactual_yield(&m, 0.016, 0.008, 4.24).unwrap();
    assert!((cf - 4.24 * (-by_hand as f64).exp()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn first_order_agrees_with_exact(beta in -10.0..10.0f64, ds in -0.005..0.005f64, y in 0.1..8.0f64) {
        prop_assume!((beta * ds).abs() > 1e-6 && (beta * ds).abs() < 0.05);
        let m = SemiElasticity::Linear { beta };
        let r = impact_report(&m, 0.01 + ds, 0.01, y, 6.2e12).unwrap();
        let first = bps(beta, ds, y);
        prop_assert!((r.bps_change - first).abs() < 1e-9 * first.abs().max(1.0));
        prop_assert!((first - r.counterfactual_gap_bps).abs() / first.abs() < 0.03);
    }

    #[test]
    fn signs_are_coherent(beta in -10.0..-0.01f64, ds in 1e-4..0.01f64, y in 0.1..8.0f64) {
        let r = impact_report(&SemiElasticity::Linear { beta }, 0.01 + ds, 0.01, y, 6.2e12).unwrap();
        prop_assert!(r.relative_change < 0.0 && r.bps_change < 0.0);
        prop_assert!(r.counterfactual_yield > r.actual_yield);
        prop_assert!(r.annual_savings > 0.0);
    }

    #[test]
    fn savings_are_linear(a in -100.0..100.0f64, b in -100.0..100.0f64, o in 0.0..1e13f64, c in 0.0..10.0f64) {
        let s = |x: f64, o: f64| annual_savings(x, o).unwrap();
        prop_assert!((s(a + b, o) - (s(a, o) + s(b, o))).abs() <= 1e-6 * o.max(1.0));
        prop_assert!((s(a, c * o) - c * s(a, o)).abs() <= 1e-6 * (c * o).max(1.0));
    }

    #[test]
    fn rendered_numbers_match_json(
        y in prop::collection::vec(-3.0..3.0f64, 8),
        x in prop::collection::vec(0.0..0.02f64, 8),
        t in prop::collection::vec(1.0..13.0f64, 8),
    ) {
        let m1 = DesignMatrix::builder("log_yield_1m", y.clone()).constant().column("market_share", x.clone()).build().unwrap();
        let m2 = DesignMatrix::builder("log_yield_1m", y).constant().column("market_share", x).column("time_trend", t).build().unwrap();
        let (Ok(f1), Ok(f2)) = (ols_fit(&m1), ols_fit(&m2)) else { return Ok(()) };
        let table = render_table(&[ModelFit::Ols(&f1), ModelFit::Ols(&f2)], Layout::Table2, 1).unwrap();
        let report: TableReport = serde_json::from_str(&serde_json::to_string(&table.report).unwrap()).unwrap();
        check_fidelity(&table.text, &report);
    }
}

/// Every coefficient, SE and R-squared cell equals the JSON value rounded to 3 places.
fn check_fidelity(text: &str, report: &TableReport) {
    let lines: Vec<&str> = text.lines().collect();
    let cells = |line: &str| -> Vec<String> {
        line[32..].as_bytes().chunks(14).map(|c| String::from_utf8_lossy(c).trim().to_string()).collect()
    };
    for (col, m) in report.models.iter().enumerate() {
        for c in &m.coefficients {
            let label = tbill_impact::analysis::coefficient_label(&c.name);
            let at = lines.iter().position(|l| l.starts_with(label) && l[label.len()..32].trim().is_empty()).unwrap();
            let est = cells(lines[at])[col].trim_end_matches('*').to_string();
            let se = cells(lines[at + 1])[col].trim_matches(|ch| ch == '(' || ch == ')').to_string();
            assert_eq!(est.parse::<f64>().unwrap(), round_half_away(c.estimate, 3) + 0.0, "{}", c.name);
            assert_eq!(se.parse::<f64>().unwrap(), round_half_away(c.se, 3) + 0.0);
            assert_eq!(cells(lines[at])[col].len() - est.len(), c.stars.len());
        }
        let r2 = lines.iter().find(|l| l.starts_with("R-squared")).unwrap();
        assert_eq!(cells(r2)[col], format_number(m.r2));
        assert_eq!(cells(r2)[col].parse::<f64>().unwrap(), round_half_away(m.r2, 3) + 0.0);
    }
}

fn planted(config: SimConfig) -> (ThresholdFit<f64>, DerivedPanel<f64>) {
    let sim = simulate(&config).unwrap();
    let p = derive_panel(&sim.observations, FirstPeriod::Backfill).unwrap();
    let f = threshold_fit(&p, Variable::LogYield1m, &ThresholdSpec::default(), 19, config.seed).unwrap();
    (f, p)
}

fn count(doc: &Document, tag: &str, class: Option<&str>) -> usize {
    doc.descendants()
        .filter(|n| n.has_tag_name(tag))
        .filter(|n| class.is_none_or(|c| n.attribute("class").is_some_and(|a| a.split(' ').any(|x| x == c))))
        .count()
}

#[test]
fn figure_structure() {
    let (f, p) = planted(SimConfig::default());
    let svg = render_regime_figure(&f, &p).unwrap();
    let doc = Document::parse(&svg).unwrap();
    assert_eq!(count(&doc, "path", None), 2);
    assert_eq!(count(&doc, "path", Some("fit-line")), 2);
    assert_eq!(count(&doc, "polygon", Some("ci-band")), 2);
    assert_eq!(count(&doc, "line", Some("threshold-rule")), 1);
    assert_eq!(count(&doc, "circle", Some("observation")), p.len());
    let rule = doc.descendants().find(|n| n.attribute("class") == Some("threshold-rule")).unwrap();
    assert_eq!(rule.attribute("stroke"), Some("green"));
    assert!(rule.attribute("stroke-dasharray").is_some());
    assert_eq!(rule.attribute("x1"), rule.attribute("x2"));
    assert_eq!(svg, render_regime_figure(&f, &p).unwrap());
}

#[test]
fn rule_sits_at_the_threshold() {
    let (f, p) = planted(SimConfig { planted_tau: 0.00973, noise_sd: 0.0, ..SimConfig::default() });
    assert!((f.tau - 0.00973).abs() < 1e-9);
    let svg = render_regime_figure(&f, &p).unwrap();
    let doc = Document::parse(&svg).unwrap();
    let rule = doc.descendants().find(|n| n.attribute("class") == Some("threshold-rule")).unwrap();
    let x: f64 = rule.attribute("x1").unwrap().parse().unwrap();
    let frame = regime_figure_frame(&f, &p).unwrap();
    assert!((x - frame.x_pixel(0.00973)).abs() <= 0.006);
}

#[test]
fn exact_fit_has_flat_bands() {
    let (f, p) = planted(SimConfig { noise_sd: 0.0, ..SimConfig::default() });
    assert_eq!(f.fit.sigma2, 0.0);
    let svg = render_regime_figure(&f, &p).unwrap();
    let doc = Document::parse(&svg).unwrap();
    for band in doc.descendants().filter(|n| n.has_tag_name("polygon")) {
        let pts: Vec<&str> = band.attribute("points").unwrap().split(' ').collect();
        let half = pts.len() / 2;
        let upper = &pts[..half];
        let lower: Vec<&str> = pts[half..].iter().rev().copied().collect();
        assert_eq!(upper, lower.as_slice());
    }
}

#[test]
fn threshold_table_layout() {
    let (f, _) = planted(SimConfig::default());
    let t = render_table(&[ModelFit::Threshold(&f)], Layout::Table3, 1).unwrap();
    assert!(t.text.contains("Intercept shift (high regime)"));
    assert!(t.text.contains("Bootstrap p-value"));
    let th = t.report.models[0].threshold.as_ref().unwrap();
    assert_eq!(th.tau, f.tau);
    assert_eq!(th.replications, 19);
    assert!(matches!(
        render_table(&[ModelFit::Threshold(&f), ModelFit::Ols(&f.linear_fit)], Layout::Table3, 1),
        Err(tbill_impact::analysis::AnalysisError::MixedFitKinds { column: 2, .. })
    ));
    check_fidelity(&t.text, &t.report);
}
