//! `dasim`: sweeps and single-shot diagnostics over the library, written as CSV (and optional SVG).

// Negated comparisons in validation reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Output;
use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(dasim::Error),
}

impl From<dasim::Error> for CliError {
    fn from(e: dasim::Error) -> Self {
        match e {
            // Bad parameter values are reported as configuration problems.
            dasim::Error::InvalidArgument(_) | dasim::Error::DimensionTooLarge { .. } => Self::Config(e.to_string()),
            other => Self::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dasim", version, about = "Digital adiabatic simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write an SVG plot next to each plottable CSV.
    #[arg(long, global = true)]
    svg: bool,
    /// Overrides the config seed (recorded in the config hash).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Norm distance against Trotter fidelity error over a T sweep.
    Fig1,
    /// Adiabatic, Trotter and total errors over a T sweep, with the scaling index.
    Fig2,
    /// Near-degeneracy test over a Trotter-step grid.
    Fig3,
    /// Discrete oscillatory sum and its bounds.
    Rl,
    /// Gamma-matrix adiabatic error and its first-order estimate.
    Gamma,
    /// Adiabatic-theorem bound.
    Bound,
    /// Single near-degeneracy trace.
    Zeno,
}

fn write_outputs(outputs: &[Output], dir: &Path, hash: &str, svg: bool) -> Result<(), CliError> {
    for o in outputs {
        let path = o.table.write(dir, hash)?;
        println!("{}", path.display());
        if let (true, Some(plot)) = (svg, &o.plot) {
            let mut names = vec![plot.x];
            names.extend(&plot.ys);
            let cols = output::read_columns(&path, &names)?;
            let series: Vec<svg::Series> =
                plot.ys.iter().zip(&cols[1..]).map(|(label, y)| svg::Series { label, x: &cols[0], y }).collect();
            let svg_path = path.with_extension("svg");
            std::fs::write(&svg_path, svg::line_plot(plot.title, plot.x, plot.axes, &series))
                .map_err(|e| CliError::Io(format!("{}: {e}", svg_path.display())))?;
            println!("{}", svg_path.display());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    let outputs = match cli.command {
        Command::Fig1 => commands::fig1(&config)?,
        Command::Fig2 => commands::fig2(&config)?,
        Command::Fig3 => commands::fig3(&config)?,
        Command::Rl => commands::rl(&config)?,
        Command::Gamma => commands::gamma(&config)?,
        Command::Bound => commands::bound(&config)?,
        Command::Zeno => commands::zeno(&config)?,
    };
    write_outputs(&outputs, &cli.out, &config.hash(), cli.svg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dasim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
