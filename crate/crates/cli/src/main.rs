use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use supplynet::ingest::{self, IngestError};
use supplynet::pipeline::{self, FitOptions, PipelineError};
use supplynet::synth::{self, SynthConfig};
use supplynet::{config, ConstraintMode, Graph, Weighting};

#[derive(Parser)]
#[command(
    name = "supplynet",
    version,
    about = "Supply-chain concentration metrics and CDS-spread models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    #[arg(long)]
    companies: PathBuf,
    #[arg(long)]
    relationships: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    ReciprocalLogMcap,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    SameSide,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate both files, listing every violation.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Per-company concentration, constraint and influence metrics as CSV.
    Metrics {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "same-side")]
        constraint_mode: ModeArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Descriptive statistics of the log-scale company variables.
    Describe {
        #[command(flatten)]
        inputs: Inputs,
        /// Also emit equal-width histograms with this many bins.
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        keep_financials: bool,
    },
    /// Fit every model of a spec file and print the comparison table.
    Fit {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        spec: PathBuf,
        /// Override the weighting of every model.
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
        #[arg(long)]
        keep_financials: bool,
        /// List indicator coefficients instead of summarizing them.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic panel (companies.csv, relationships.csv).
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 828)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_synth(dir: &Path, config: &SynthConfig) -> Result<(), (i32, String)> {
    let graph: Graph = synth::generate(config).map_err(|e| (2, e.to_string()))?;
    fs::create_dir_all(dir).map_err(|e| (2, format!("{}: {e}", dir.display())))?;
    let create = |name: &str| {
        let p = dir.join(name);
        File::create(&p)
            .map(BufWriter::new)
            .map_err(|e| (2, format!("{}: {e}", p.display())))
    };
    let io_err = |e: IngestError| (2, e.to_string());
    ingest::write_companies(create("companies.csv")?, graph.companies()).map_err(io_err)?;
    ingest::write_relationships(create("relationships.csv")?, graph.relationships())
        .map_err(io_err)?;
    eprintln!(
        "wrote {} companies and {} relationships to {}",
        graph.companies().len(),
        graph.relationships().len(),
        dir.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), (i32, String)> {
    let fail = |e: PipelineError| (e.exit_code(), e.to_string());
    match cli.command {
        Command::Validate { inputs } => {
            let graph: Graph =
                pipeline::load_graph(&inputs.companies, &inputs.relationships).map_err(fail)?;
            println!(
                "ok: {} companies, {} relationships",
                graph.companies().len(),
                graph.relationships().len()
            );
        }
        Command::Metrics {
            inputs,
            constraint_mode,
            output,
        } => {
            let graph: Graph =
                pipeline::load_graph(&inputs.companies, &inputs.relationships).map_err(fail)?;
            let mode = match constraint_mode {
                ModeArg::SameSide => ConstraintMode::SameSide,
                ModeArg::Mixed => ConstraintMode::Mixed,
            };
            let mut buf = Vec::new();
            pipeline::write_metrics(&mut buf, &graph, mode).map_err(|e| fail(e.into()))?;
            emit(output.as_deref(), &String::from_utf8_lossy(&buf)).map_err(fail)?;
        }
        Command::Describe {
            inputs,
            bins,
            keep_financials,
        } => {
            let graph: Graph =
                pipeline::load_graph(&inputs.companies, &inputs.relationships).map_err(fail)?;
            let (_, text) = pipeline::describe(&graph, keep_financials, bins);
            print!("{text}");
        }
        Command::Fit {
            inputs,
            spec,
            weights,
            keep_financials,
            full,
            output,
        } => {
            let graph: Graph =
                pipeline::load_graph(&inputs.companies, &inputs.relationships).map_err(fail)?;
            let specs = config::load(&spec).map_err(|e| fail(e.into()))?;
            let options = FitOptions {
                weighting: weights.map(|w| match w {
                    WeightsArg::ReciprocalLogMcap => Weighting::ReciprocalLogMarketCap,
                    WeightsArg::None => Weighting::Unweighted,
                }),
                keep_financials,
                full,
            };
            let out = pipeline::fit_models(&graph, &specs, &options).map_err(fail)?;
            emit(output.as_deref(), &out.rendered).map_err(fail)?;
        }
        Command::Synth { out_dir, n, seed } => {
            write_synth(
                &out_dir,
                &SynthConfig {
                    n_companies: n,
                    seed,
                    ..SynthConfig::default()
                },
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
