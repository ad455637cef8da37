use serde::Serialize;
use tbill_impact::analysis::{impact_report, ImpactReport, ModelReport, SemiElasticity, TableReport};
use tbill_impact::threshold::columns;

use crate::error::CliError;
use crate::ImpactArgs;

#[derive(Serialize)]
struct ImpactOutput<'a> {
    model: &'a str,
    kind: &'a str,
    response: &'a str,
    semi_elasticity: SemiElasticity<f64>,
    reference_share: f64,
    actual_share: f64,
    delta_share: f64,
    outstanding: f64,
    #[serde(flatten)]
    report: ImpactReport<f64>,
}

fn coefficient(model: &ModelReport, name: &str) -> Result<f64, CliError> {
    model
        .coefficient(name)
        .map(|c| c.estimate)
        .ok_or_else(|| CliError::Validation(format!("model {} has no `{name}` coefficient", model.model)))
}

fn semi_elasticity(model: &ModelReport) -> Result<SemiElasticity<f64>, CliError> {
    Ok(match &model.threshold {
        Some(t) => SemiElasticity::Piecewise {
            tau: t.tau,
            low: coefficient(model, columns::SHARE_LOW)?,
            high: coefficient(model, columns::SHARE_HIGH)?,
        },
        None => SemiElasticity::Linear { beta: coefficient(model, columns::SHARE)? },
    })
}

pub fn impact(args: &ImpactArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.fit).map_err(|e| CliError::io(args.fit.display(), e))?;
    let table: TableReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: malformed fit JSON: {e}", args.fit.display())))?;
    let model = match &args.column {
        Some(label) => table
            .models
            .iter()
            .find(|m| &m.model == label)
            .ok_or_else(|| CliError::Validation(format!("no model labelled {label} in {}", args.fit.display())))?,
        None => table
            .models
            .last()
            .ok_or_else(|| CliError::Validation(format!("{} contains no models", args.fit.display())))?,
    };
    let beta = semi_elasticity(model)?;
    let reference = args.reference_share.unwrap_or(match beta {
        SemiElasticity::Piecewise { tau, .. } => tau,
        SemiElasticity::Linear { .. } => (-args.delta_share).max(0.0),
    });
    let actual = reference + args.delta_share;
    let report = impact_report(&beta, actual, reference, args.baseline_yield, args.outstanding)?;

    if args.json {
        let out = ImpactOutput {
            model: &model.model,
            kind: &model.kind,
            response: &model.response,
            semi_elasticity: beta,
            reference_share: reference,
            actual_share: actual,
            delta_share: args.delta_share,
            outstanding: args.outstanding,
            report,
        };
        say!("{}", serde_json::to_string_pretty(&out).expect("impact report serialises"));
        return Ok(());
    }

    say!("model {} ({}, {})", model.model, model.kind, model.response);
    match beta {
        SemiElasticity::Linear { beta } => say!("{:<26}{beta:.3}", "semi-elasticity"),
        SemiElasticity::Piecewise { tau, low, high } => say!(
            "{:<26}{low:.3} at or below {:.3}%, {high:.3} above",
            "semi-elasticity",
            tau * 100.0
        ),
    }
    say!("{:<26}{:.3}% -> {:.3}% of bills outstanding", "market share", reference * 100.0, actual * 100.0);
    say!("{:<26}{:.3}%", "relative yield change", report.relative_change * 100.0);
    say!("{:<26}{:.2} bps at {:.2}%", "first-order yield change", report.bps_change, args.baseline_yield);
    say!(
        "{:<26}{:.3}% ({:.2} bps above the actual yield)",
        "yield at reference share", report.counterfactual_yield, -report.counterfactual_gap_bps
    );
    say!(
        "{:<26}${:.2} billion per year on ${:.1} billion outstanding",
        "annual interest savings",
        report.annual_savings / 1e9,
        args.outstanding / 1e9
    );
    Ok(())
}
