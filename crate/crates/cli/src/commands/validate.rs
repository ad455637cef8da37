use std::path::Path;

use tbill_impact::dataset::{reference_consistency, summary_stats, FirstPeriod};

use crate::error::CliError;

pub fn validate(input: &Path, first_period: FirstPeriod) -> Result<(), CliError> {
    let panel = super::read_panel(input, first_period)?;
    let table = summary_stats(&panel)?;
    say!("{}: {} periods, schema and row invariants OK", input.display(), panel.len());
    say!();
    say_raw!("{}", table.render());
    say!();

    let checks = reference_consistency(&table);
    for c in &checks {
        say!(
            "{:<28} observed [{:.3}, {:.3}]  reference [{:.2}, {:.2}]  {}",
            c.variable.label(),
            c.observed_min,
            c.observed_max,
            c.envelope_min,
            c.envelope_max,
            if c.within { "within" } else { "outside" }
        );
    }
    if checks.iter().all(|c| c.within) {
        say!("note: reference-consistent (variables (i)-(iv) fall within the reference min/max envelopes)");
    } else {
        say!("note: not within the reference envelopes; published coefficients are not expected to reproduce");
    }
    Ok(())
}
