use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coinwalk_cli::config::{parse_amplitude, DEFAULT_SEED};
use coinwalk_cli::{exit, run, CliError, ConfigFile, Format, InputSpec, Mode, PlacementOverride, Protocol, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "coinwalk", version, about = "Exact two-coin quantum walk simulator", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Qubit transfer on the line.
    TransferLine(Flags),
    /// Qubit transfer on a cycle (methods 1-4).
    TransferCycle(Flags),
    /// Qudit transfer on the complete graph with loops.
    TransferComplete(Flags),
    /// Qudit transfer on a circulant d-regular graph.
    TransferRegular(Flags),
    /// Teleportation on the line.
    TeleportLine(Flags),
    /// Teleportation on a cycle.
    TeleportCycle(Flags),
    /// Qudit teleportation on the complete graph.
    TeleportComplete(Flags),
    /// Qudit teleportation on a circulant d-regular graph.
    TeleportRegular(Flags),
    /// Run the full acceptance grid.
    VerifyAll(Flags),
    /// Certify schedules with the dense oracle.
    Certify(Flags),
    /// Run the protocol named in a config file.
    Run(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Target vertex.
    #[arg(long, visible_alias = "target", allow_negative_numbers = true)]
    x: Option<i64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    method: Option<u8>,
    /// Coin-1 amplitudes as RE,IM pairs.
    #[arg(long, num_args = 1.., value_name = "RE,IM", allow_negative_numbers = true)]
    input: Vec<String>,
    /// Draw a random input from --seed.
    #[arg(long, conflicts_with = "input")]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Report every measurement branch (default).
    #[arg(long, conflicts_with = "sample")]
    enumerate: bool,
    /// Report one branch drawn with --seed.
    #[arg(long)]
    sample: bool,
    /// Include the per-step state trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the schedule with STEP=OP placements (I, X, X_d, X_d^-1, F_d).
    #[arg(long, value_name = "STEP=OP")]
    place: Vec<String>,
    /// Random payloads per certification.
    #[arg(long)]
    trials: Option<usize>,
}

fn build_config(protocol: Option<Protocol>, flags: Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => ConfigFile::parse(&std::fs::read_to_string(path)?)?.into_config(protocol)?,
        None => RunConfig::new(protocol.ok_or_else(|| CliError::Config("run needs --config".into()))?),
    };
    cfg.d = flags.d.or(cfg.d);
    cfg.n = flags.n.or(cfg.n);
    cfg.x = flags.x.or(cfg.x);
    cfg.t = flags.t.or(cfg.t);
    cfg.method = flags.method.or(cfg.method);
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
        if let InputSpec::Random { .. } = cfg.input {
            cfg.input = InputSpec::Random { seed };
        }
    }
    if !flags.input.is_empty() {
        let amps = flags.input.iter().map(|s| parse_amplitude(s)).collect::<Result<_, _>>()?;
        cfg.input = InputSpec::Explicit(amps);
    } else if flags.random {
        cfg.input = InputSpec::Random { seed: flags.seed.unwrap_or(DEFAULT_SEED) };
    }
    if flags.sample {
        cfg.mode = Mode::Sample;
    } else if flags.enumerate {
        cfg.mode = Mode::Enumerate;
    }
    cfg.trace |= flags.trace;
    if let Some(f) = flags.format {
        cfg.format = f;
    }
    if flags.out.is_some() {
        cfg.out = flags.out;
    }
    if !flags.place.is_empty() {
        cfg.placements = flags.place.iter().map(|p| PlacementOverride::parse(p)).collect::<Result<_, _>>()?;
    }
    if let Some(t) = flags.trials {
        cfg.trials = t;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (protocol, flags) = match cli.command {
        Command::TransferLine(f) => (Some(Protocol::TransferLine), f),
        Command::TransferCycle(f) => (Some(Protocol::TransferCycle), f),
        Command::TransferComplete(f) => (Some(Protocol::TransferComplete), f),
        Command::TransferRegular(f) => (Some(Protocol::TransferRegular), f),
        Command::TeleportLine(f) => (Some(Protocol::TeleportLine), f),
        Command::TeleportCycle(f) => (Some(Protocol::TeleportCycle), f),
        Command::TeleportComplete(f) => (Some(Protocol::TeleportComplete), f),
        Command::TeleportRegular(f) => (Some(Protocol::TeleportRegular), f),
        Command::VerifyAll(f) => (Some(Protocol::VerifyAll), f),
        Command::Certify(f) => (Some(Protocol::Certify), f),
        Command::Run(f) => (None, f),
    };
    let cfg = build_config(protocol, flags)?;
    let outcome = run(&cfg)?;
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    let text = outcome.render()?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code.clamp(0, exit::INTERNAL) as u8)
}
