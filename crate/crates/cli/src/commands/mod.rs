mod fit;
mod impact;
mod simulate;
mod validate;

use std::fs::File;
use std::path::Path;

use tbill_impact::dataset::{derive_panel, load_panel, DerivedPanel, FirstPeriod};

use crate::error::CliError;

pub use fit::fit;
pub use impact::impact;
pub use simulate::simulate;
pub use validate::validate;

fn read_panel(path: &Path, first_period: FirstPeriod) -> Result<DerivedPanel<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    let observations = load_panel::<f64, _>(file)?;
    Ok(derive_panel(&observations, first_period)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path.display(), e))
}
