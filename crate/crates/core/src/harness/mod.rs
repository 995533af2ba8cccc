//! Seeded Monte-Carlo sweeps over RIS architectures and search methods.

pub mod config;
pub mod record;
pub mod run;
pub mod summarize;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

pub use config::{load_config, ExperimentConfig, SweepPoint, ValidatedConfig};
pub use record::{truth_hash, write_records, ResultRecord, CSV_HEADER};
pub use run::{point_summary, run_trials};
pub use summarize::{summarize, SummaryRow, SummaryTable};

use crate::Result;

/// Runs the whole sweep and writes the result file; returns the rows.
pub fn run_experiment(
    cfg: &ValidatedConfig,
    out: &Path,
    threads: Option<usize>,
) -> Result<Vec<ResultRecord>> {
    let records = run_trials(cfg, threads)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_records(BufWriter::new(File::create(out)?), &records)?;
    Ok(records)
}
