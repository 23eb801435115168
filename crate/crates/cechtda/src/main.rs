use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cechtda::config::PipelineConfig;
use cechtda::core::complex::FiltrationKind;
use cechtda::error::{PipelineError, EXIT_OK};
use cechtda::io::RecordFormat;
use cechtda::pipeline::{self, Context};

#[derive(Parser)]
#[command(name = "cechtda", version, about = "Čech-complex topological classification of multi-channel ECG")]
struct Cli {
    /// key = value pipeline configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Directory holding every stage's artifacts
    #[arg(long, global = true, default_value = "cechtda-out")]
    out: PathBuf,
    /// Extra KEY=VALUE settings applied after the config file
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Auto,
    Csv,
    Binary16,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cech,
    Rips,
}

#[derive(Subcommand)]
enum Command {
    /// Load records, remove baseline and noise, cut into trials
    Ingest {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        format: Format,
        /// subject,label table for binary records
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Trial matrices to point clouds
    Embed,
    /// Point clouds to verified filtrations
    Complex {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Keep filtrations that fail the nerve check
        #[arg(long)]
        allow_rips: bool,
    },
    /// Filtrations to persistence diagrams and Betti curves
    Persist {
        /// Also render SVG plots
        #[arg(long)]
        plot: bool,
    },
    /// Diagrams to the feature table
    Features,
    /// Cross-validate the configured classifiers
    Train,
    /// Summary tables, significance tests and entropy statistics
    Report,
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| PipelineError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Complex { kind: Some(k), .. } = &cli.command {
        cfg.complex_kind = match k {
            Kind::Cech => FiltrationKind::Cech,
            Kind::Rips => FiltrationKind::Rips,
        };
    }
    cfg.validate()?;
    let ctx = Context::new(cfg, &cli.out, cli.jobs)?;
    match cli.command {
        Command::Ingest { inputs, format, labels } => {
            let format = match format {
                Format::Auto => None,
                Format::Csv => Some(RecordFormat::Csv),
                Format::Binary16 => Some(RecordFormat::Binary16),
            };
            let out = pipeline::ingest(&ctx, &inputs, format, labels.as_deref())?;
            println!("ingest: {} samples", out.len() - 1);
        }
        Command::Embed => println!("embed: {} point clouds", pipeline::embed(&ctx)?.len()),
        Command::Complex { allow_rips, .. } => {
            for s in pipeline::complex(&ctx, allow_rips)? {
                println!("complex: {} {} simplices={} epsilon_max={} violations={}", s.subject, s.kind, s.simplices, s.epsilon_max, s.violations);
            }
        }
        Command::Persist { plot } => println!("persist: {} files", pipeline::persist(&ctx, plot)?.len()),
        Command::Features => println!("features: {}", pipeline::features(&ctx)?.display()),
        Command::Train => print!("{}", pipeline::summary_csv(&pipeline::train(&ctx)?)),
        Command::Report => {
            for p in pipeline::report(&ctx)? {
                println!("report: {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
