use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use sps_core::harness::{
    figure_spec, output_path, run_analytic, run_experiment, ExperimentOutput, ExperimentSpec,
    HarnessError, RunSettings,
};
use sps_core::simcore::{Execution, SimOptions};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

/// NR-V2X Mode 2 semi-persistent scheduling: model curves and Monte Carlo runs.
#[derive(Parser, Debug)]
#[command(name = "spsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the model over a spec's grid.
    Analytic {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the model and simulate every point of a spec's grid.
    Simulate {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in experiment for a figure (4a, 4b, 4c, 5a, 5b, 5c).
    Reproduce {
        figure: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Output directory.
    #[arg(long, env = "SPSIM_OUT_DIR", default_value = "results")]
    out: PathBuf,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for trials (1 runs sequentially).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    trials: Option<u32>,
    /// Simulated seconds per trial.
    #[arg(long)]
    duration: Option<f64>,
    /// Let vehicles sense the other transmissions of their own slot.
    #[arg(long)]
    strict_paper_mode: bool,
}

impl Common {
    fn settings(&self) -> RunSettings {
        RunSettings {
            execution: match self.jobs {
                None => Execution::Parallel,
                Some(0 | 1) => Execution::Sequential,
                Some(n) => Execution::ParallelJobs(n),
            },
            options: if self.strict_paper_mode {
                SimOptions::strict_paper_mode()
            } else {
                SimOptions::default()
            },
            seed: self.seed,
            trials: self.trials,
            duration_s: self.duration,
        }
    }
}

fn finish(
    out: Result<ExperimentOutput, HarnessError>,
    spec: &ExperimentSpec,
    dir: &Path,
) -> ExitCode {
    let out = match out {
        Ok(o) => o,
        Err(e) => return report(e),
    };
    let path = output_path(dir, spec);
    if let Err(e) = out.write_to(&path) {
        return report(e);
    }
    info!("wrote {} rows to {}", out.rows.len(), path.display());
    println!("{}", path.display());
    match out.failures() {
        0 => ExitCode::SUCCESS,
        n => {
            error!("{n} rows could not be computed; see the error column");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn report(e: HarnessError) -> ExitCode {
    error!("{e}");
    eprintln!("spsim: {e}");
    match e {
        HarnessError::Config(_) => ExitCode::from(EXIT_CONFIG),
        HarnessError::Io(_) => ExitCode::from(EXIT_RUNTIME),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (spec, common, analytic_only) = match &cli.command {
        Command::Analytic { spec, common } => (ExperimentSpec::from_file(spec), common, true),
        Command::Simulate { spec, common } => (ExperimentSpec::from_file(spec), common, false),
        Command::Reproduce { figure, common } => (figure_spec(figure), common, false),
    };
    let spec = match spec {
        Ok(s) => s,
        Err(e) => return report(e),
    };
    let settings = common.settings();
    let out = if analytic_only {
        run_analytic(&spec)
    } else {
        run_experiment(&spec, &settings)
    };
    finish(out, &spec, &common.out)
}
