//! `qbw`: CSV sweeps of battery work extraction and the correlations it creates.

mod commands;
mod config;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_list, ProtocolKind, RunConfig, Settings};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "qbw", version, about = "Work extraction from quantum batteries and the correlations it generates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-qubit work, discord and entanglement of the direct and three-step swaps versus p0
    Fig1(Flags),
    /// Two-qutrit work above the classical limit and final classical correlations versus p1
    Fig2(Flags),
    /// Maximum global discord of the n-qubit direct swap, with the five-stage series for n = 3
    Fig3a(Flags),
    /// Maximum total genuine correlations of the n-qubit direct swap
    Fig3b(Flags),
    /// Maximum global discord against extracted work, one row per (n, p0)
    Fig3c(Flags),
    /// Work bounds, protocol work, global discord and witness versus p0 for n qubits
    Sweep(Flags),
    /// Full correlation report for every sampled state of one protocol run
    Compute(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Number of batteries
    #[arg(long)]
    n: Option<usize>,
    /// Levels per battery
    #[arg(long)]
    d: Option<usize>,
    /// Level populations, comma separated
    #[arg(long, value_name = "P0,P1,...")]
    probs: Option<String>,
    /// Level energies, comma separated
    #[arg(long, value_name = "E0,E1,...")]
    energies: Option<String>,
    /// direct, multistep or optimal
    #[arg(long, value_parser = |s: &str| s.parse::<ProtocolKind>().map_err(|e| e.to_string()))]
    protocol: Option<ProtocolKind>,
    /// Grid points of the sweep
    #[arg(long)]
    points: Option<usize>,
    /// Angle samples per swap step
    #[arg(long)]
    samples: Option<usize>,
    /// Seed of the sampled basis search
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn settings(&self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        Ok(base.overridden_by(Settings {
            n: self.n,
            d: self.d,
            probs: self.probs.as_deref().map(|v| parse_list("probs", v)).transpose()?,
            energies: self.energies.as_deref().map(|v| parse_list("energies", v)).transpose()?,
            protocol: self.protocol,
            points: self.points,
            samples: self.samples,
            seed: self.seed,
            out: self.out.clone(),
        }))
    }
}

type Builder = fn(&RunConfig) -> Result<output::Table, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (flags, build): (&Flags, Builder) = match &cli.command {
        Command::Fig1(f) => (f, commands::fig1),
        Command::Fig2(f) => (f, commands::fig2),
        Command::Fig3a(f) => (f, commands::fig3a),
        Command::Fig3b(f) => (f, commands::fig3b),
        Command::Fig3c(f) => (f, commands::fig3c),
        Command::Sweep(f) => (f, commands::sweep),
        Command::Compute(f) => (f, commands::compute),
    };
    let mut settings = flags.settings()?;
    if matches!(cli.command, Command::Fig2(_)) && settings.d.is_none() && settings.probs.is_none() {
        settings.d = Some(3);
    }
    let cfg = RunConfig::resolve(settings)?;
    let table = build(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(&mut w)?;
            w.flush()?;
        }
        None => table.write(io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
