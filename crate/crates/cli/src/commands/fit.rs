use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tbill_impact::analysis::{render_regime_figure, render_table, Layout, ModelFit, RenderedTable};
use tbill_impact::dataset::DerivedPanel;
use tbill_impact::regress::{baseline_fits, BaselineSpec};
use tbill_impact::threshold::{threshold_fit, ThresholdFit};

use crate::config::{tag, FileConfig, Format, RunConfig, OUTPUT_DIR_ENV};
use crate::error::CliError;

use super::write_file;

pub fn fit(input: PathBuf, config_path: Option<&Path>, flags: crate::config::FlagConfig) -> Result<(), CliError> {
    let file = match config_path {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let cfg = RunConfig::resolve(input, flags, file, env_dir)?;

    let result = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
            .install(|| run(&cfg)),
        None => run(&cfg),
    };
    if let Err(e) = &result {
        if std::fs::create_dir_all(&cfg.output_dir).is_ok() {
            let _ = std::fs::write(cfg.output_dir.join("error.json"), e.to_json() + "\n");
        }
    }
    result
}

fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let panel = super::read_panel(&cfg.input_path, cfg.first_period)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let responses = cfg.response.variables();

    if cfg.model.baseline() {
        for &response in &responses {
            let fits = baseline_fits(&panel, response)?;
            let cols: Vec<_> = fits.iter().map(ModelFit::Ols).collect();
            let first = match response {
                tbill_impact::dataset::Variable::LogYield3m => 1 + BaselineSpec::ALL.len(),
                _ => 1,
            };
            let table = render_table(&cols, Layout::Table2, first)?;
            emit(cfg, &format!("baseline_{}", tag(response)), &table)?;
        }
    }

    if cfg.model.threshold() {
        let spec = cfg.threshold_spec();
        let fits: Vec<ThresholdFit<f64>> = responses
            .iter()
            .map(|&r| threshold_fit(&panel, r, &spec, cfg.replications, cfg.seed))
            .collect::<Result<_, _>>()?;
        let cols: Vec<_> = fits.iter().map(ModelFit::Threshold).collect();
        let table = render_table(&cols, Layout::Table3, 1)?;
        emit(cfg, "threshold", &table)?;
        for f in &fits {
            write_threshold_artifacts(cfg, f, &panel)?;
        }
    }
    Ok(())
}

fn emit(cfg: &RunConfig, stem: &str, table: &RenderedTable) -> Result<(), CliError> {
    if cfg.wants(Format::Text) {
        say_raw!("{}", table.text);
        say!();
        write_file(&cfg.output_dir.join(format!("{stem}.txt")), &table.text)?;
    }
    if cfg.wants(Format::Json) {
        let json = serde_json::to_string_pretty(&table.report).expect("table report serialises");
        write_file(&cfg.output_dir.join(format!("{stem}.json")), &(json + "\n"))?;
    }
    Ok(())
}

fn write_threshold_artifacts(cfg: &RunConfig, fit: &ThresholdFit<f64>, panel: &DerivedPanel<f64>) -> Result<(), CliError> {
    let t = tag(fit.response);
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("tau,ssr\n");
        for p in &fit.profile {
            let _ = writeln!(csv, "{},{}", p.tau, p.ssr);
        }
        write_file(&cfg.output_dir.join(format!("ssr_profile_{t}.csv")), &csv)?;
    }
    if cfg.wants(Format::Svg) {
        let svg = render_regime_figure(fit, panel)?;
        write_file(&cfg.output_dir.join(format!("figure_{t}.svg")), &svg)?;
    }
    Ok(())
}
