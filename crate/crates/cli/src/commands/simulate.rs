use std::fs::File;

use serde::Serialize;
use tbill_impact::dataset::write_panel;
use tbill_impact::synth::{simulate as draw, SimConfig};

use crate::error::CliError;
use crate::SimulateArgs;

#[derive(Serialize)]
struct Sidecar<'a> {
    generator: &'a SimConfig,
    high_regime: &'a [bool],
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let d = SimConfig::default();
    let mut config = SimConfig {
        seed: args.seed.unwrap_or(d.seed),
        n: args.n.unwrap_or(d.n),
        planted_tau: args.planted_tau.unwrap_or(d.planted_tau),
        low_slope: args.low_slope.unwrap_or(d.low_slope),
        high_slope: args.high_slope.unwrap_or(d.high_slope),
        intercept_shift: args.intercept_shift.unwrap_or(d.intercept_shift),
        noise_sd: args.noise_sd.unwrap_or(d.noise_sd),
        ..d
    };
    if args.linear {
        config = config.linear_null();
    }
    let panel = draw(&config)?;

    let path = &args.output;
    let file = File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    write_panel(file, &panel.observations)?;
    let sidecar_path = path.with_extension("params.json");
    let sidecar = Sidecar { generator: &panel.config, high_regime: &panel.high_regime };
    let json = serde_json::to_string_pretty(&sidecar).expect("generator config serialises");
    super::write_file(&sidecar_path, &(json + "\n"))?;
    say!("wrote {} ({} periods) and {}", path.display(), config.n, sidecar_path.display());
    Ok(())
}
