//! Experiment specs, the built-in figure grids, and CSV output.

mod csvio;
mod figures;
mod runner;
mod spec;

pub use csvio::{
    fmt_num, read_rows, rows_to_string, write_rows, CsvRow, Metric, Source, HEADER, SINGLE_TRIAL,
};
pub use figures::{figure_spec, FIGURE_IDS};
pub use runner::{output_path, run_analytic, run_experiment, ExperimentOutput, RunSettings};
pub use spec::{ExperimentSpec, GridPoint, PcnOutput};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    /// Bad spec, bad override or unknown figure.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}
