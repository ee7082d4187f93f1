use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;

use stickcert_cli::{
    cmd_analyze, cmd_batch, cmd_change, cmd_homsearch, cmd_invariants, cmd_sweep, parse_crossing_list, parse_rational,
    AnalyzeOptions, CliError,
};

#[derive(Parser)]
#[command(name = "stickcert", version, about = "Exact stick, bridge and superbridge certificates for polygonal knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct PipelineFlags {
    /// Seed for direction selection and sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directions sampled by the height-function sweep (0 skips it).
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Largest symmetric group degree to search.
    #[arg(long, default_value_t = 6)]
    degree_max: u8,
    /// Relative edge-length tolerance, e.g. 1e-5 or 1/100000.
    #[arg(long, default_value = "1e-5", value_parser = parse_rational)]
    tolerance: BigRational,
    /// Largest simplified crossing count for the Kauffman bracket.
    #[arg(long, default_value_t = stickcert::invariants::DEFAULT_CROSSING_CAP)]
    crossing_cap: usize,
}

impl PipelineFlags {
    fn options(&self) -> Result<AnalyzeOptions, CliError> {
        if self.tolerance <= BigRational::from_integer(0.into()) {
            return Err(CliError::Usage("--tolerance must be positive".into()));
        }
        Ok(AnalyzeOptions {
            seed: self.seed,
            samples: self.samples,
            degree_max: self.degree_max,
            tolerance: self.tolerance.clone(),
            crossing_cap: self.crossing_cap,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline on a coordinate file.
    Analyze {
        coords: PathBuf,
        #[command(flatten)]
        flags: PipelineFlags,
        /// Line-oriented output.
        #[arg(long)]
        machine: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Min and max number of local maxima over random height directions.
    Sweep {
        coords: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        machine: bool,
    },
    /// Switch crossings of a PD diagram and rerun the homomorphism search.
    Change {
        pd: PathBuf,
        /// Comma-separated crossing ids (1-based).
        #[arg(long, default_value = "")]
        crossings: String,
        #[arg(long, default_value_t = 5)]
        degree_max: u8,
        /// Write the changed PD here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analyze every coordinate file in a directory; TSV summary on stdout.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Homomorphism search on a PD diagram.
    Homsearch {
        pd: PathBuf,
        #[arg(long, default_value_t = 6)]
        degree_max: u8,
        /// List every conjugacy class at exactly this degree.
        #[arg(long, conflicts_with = "labeling")]
        degree: Option<u8>,
        /// Verify a strand labeling file instead of searching.
        #[arg(long)]
        labeling: Option<PathBuf>,
    },
    /// Invariants of a PD diagram.
    Invariants {
        pd: PathBuf,
        #[arg(long, default_value_t = stickcert::invariants::DEFAULT_CROSSING_CAP)]
        crossing_cap: usize,
        #[arg(long)]
        machine: bool,
    },
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Ok carries the exit code for commands that report their own failures.
fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze { coords, flags, machine, output } => {
            let text = cmd_analyze(&coords, &flags.options()?, machine)?;
            emit(&text, output.as_ref())?;
            Ok(0)
        }
        Command::Sweep { coords, samples, seed, machine } => emit(&cmd_sweep(&coords, samples, seed, machine)?, None).map(|_| 0),
        Command::Change { pd, crossings, degree_max, output } => {
            let set = parse_crossing_list(&crossings)?;
            emit(&cmd_change(&pd, &set, degree_max, output.as_deref())?, None).map(|_| 0)
        }
        Command::Batch { dir, flags } => {
            let (table, errors) = cmd_batch(&dir, &flags.options()?)?;
            emit(&table, None)?;
            let mut first = None;
            for (path, e) in errors {
                eprintln!("error\t{}\t{e}", path.display());
                first.get_or_insert(e);
            }
            Ok(first.map_or(0, |e| e.exit_code() as u8))
        }
        Command::Homsearch { pd, degree_max, degree, labeling } => {
            emit(&cmd_homsearch(&pd, degree_max, degree, labeling.as_deref())?, None).map(|_| 0)
        }
        Command::Invariants { pd, crossing_cap, machine } => emit(&cmd_invariants(&pd, crossing_cap, machine)?, None).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
