use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghostcycle_core::cycle::GhostCycle;
use ghostcycle_core::dynamics::{CycleTrace, DynamicsError};
use ghostcycle_core::generalized::{general_ghost_cycle, general_iterate_cycle, GeneralizedMap};
use ghostcycle_core::patterns::ParityPattern;
use ghostcycle_core::semilinear::nonsemilinearity_witness;
use ghostcycle_cli::fibers::{fiber_table, write_csv};
use ghostcycle_cli::probe::density_probe;
use ghostcycle_cli::scan::{run_scan, ScanConfig, ScanError, VerifyPolicy};
use num_bigint::BigUint;
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_DYNAMICS: u8 = 2;
const EXIT_IO: u8 = 3;

/// Exact 2-adic ghost cycles of the Collatz map and its qn+d relatives.
#[derive(Parser)]
#[command(name = "ghostcycle", version)]
struct Cli {
    /// Working 2-adic precision in bits.
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for sampled verification.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, classify and replay a single pattern.
    Ghost(GhostArgs),
    /// Process every pattern with x + y <= ell-max; writes JSON Lines.
    Scan(ScanArgs),
    /// Exact and brute-force fiber periods of the divisibility predicate.
    Fibers(FiberArgs),
    /// Least x whose fiber period exceeds a claimed uniform bound.
    Witness(WitnessArgs),
    /// Exploratory: how closely ghost cycles approximate a 2-adic target.
    DensityProbe(ProbeArgs),
    /// `ghost` or `scan` for a qn+d map.
    General {
        #[command(subcommand)]
        command: GeneralCommand,
    },
}

#[derive(Subcommand)]
enum GeneralCommand {
    Ghost(GhostArgs),
    Scan(ScanArgs),
}

#[derive(Args)]
struct GhostArgs {
    #[arg(long)]
    x: u32,
    #[arg(long)]
    y: u32,
    /// Comma-separated cumulative halving counts, starting with 0.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sigma: Vec<u32>,
    /// Map as q,d (default 3,1).
    #[arg(long)]
    map: Option<GeneralizedMap>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    ell_max: u32,
    /// Map as q,d (default 3,1).
    #[arg(long)]
    map: Option<GeneralizedMap>,
    /// Replay only this many randomly chosen patterns (seeded by --seed).
    #[arg(long, conflicts_with = "no_verify")]
    verify_sample: Option<usize>,
    /// Skip orbit replay entirely.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct FiberArgs {
    #[arg(long)]
    y: u32,
    #[arg(long)]
    x_min: u32,
    #[arg(long)]
    x_max: u32,
    /// Also run the brute-force period oracle over C = 1..=scan-bound.
    #[arg(long)]
    scan_bound: Option<u64>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    y: u32,
    /// The claimed uniform period bound M.
    #[arg(long = "bound", short = 'M')]
    bound: BigUint,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    target: u64,
    #[arg(long)]
    target_precision: u32,
    #[arg(long)]
    ell_max: u32,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Dynamics(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Io(e) => Failure::Io(e),
            ScanError::Setup(msg) => Failure::Usage(msg),
            e @ ScanError::Dynamics { .. } => Failure::Dynamics(e.to_string()),
        }
    }
}

fn dynamics_failure(e: DynamicsError) -> Failure {
    if e.is_violation() {
        Failure::Dynamics(e.to_string())
    } else {
        Failure::Usage(e.to_string())
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, mut out: impl Write) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GhostOutput<'a> {
    ghost: &'a GhostCycle,
    trace: &'a CycleTrace,
}

fn low_bits(ghost: &GhostCycle, count: u32) -> String {
    let digits = ghost.n0.digits(count.min(ghost.n0.precision())).unwrap_or_default();
    digits.iter().map(|d| char::from(b'0' + d)).collect()
}

fn cmd_ghost(cli: &Cli, args: &GhostArgs, default_map: GeneralizedMap) -> Result<(), Failure> {
    let pattern = ParityPattern::new(args.x, args.y, args.sigma.clone())
        .map_err(|e| Failure::Usage(format!("invalid pattern: {e}")))?;
    let map = args.map.unwrap_or(default_map);
    if cli.precision <= pattern.x() + 1 {
        return Err(Failure::Usage(format!(
            "--precision must exceed x + 1 = {} to replay the orbit",
            pattern.x() + 1
        )));
    }
    let ghost = general_ghost_cycle(map, &pattern, cli.precision)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let trace = general_iterate_cycle(map, &pattern, cli.precision).map_err(dynamics_failure)?;
    let mut out = open_output(cli.out.as_deref())?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&GhostOutput { ghost: &ghost, trace: &trace }, out)?,
        Format::Text | Format::Csv => {
            writeln!(out, "map          {map}")?;
            writeln!(
                out,
                "pattern      {pattern}  ell = {}  {}",
                pattern.ell(),
                if map.is_admissible(&pattern) { "admissible" } else { "inadmissible" }
            )?;
            writeln!(out, "C            {}", ghost.constant)?;
            writeln!(out, "modulus      {}", ghost.modulus)?;
            writeln!(out, "n0           {}", ghost.n0)?;
            writeln!(out, "n0 low bits  {} (least significant first)", low_bits(&ghost, 32))?;
            writeln!(out, "verdict      {}", ghost.verdict)?;
            writeln!(
                out,
                "trace        valuations {:?}, closed at {} bits",
                trace.step_valuations, trace.final_precision
            )?;
            out.flush()?;
        }
    }
    Ok(())
}

fn cmd_scan(cli: &Cli, args: &ScanArgs, default_map: GeneralizedMap) -> Result<(), Failure> {
    if args.ell_max < 2 {
        return Err(Failure::Usage("--ell-max must be at least 2".into()));
    }
    if cli.precision == 0 {
        return Err(Failure::Usage("--precision must be at least 1".into()));
    }
    let verify = if args.no_verify {
        VerifyPolicy::None
    } else if let Some(count) = args.verify_sample {
        VerifyPolicy::Sample { count, seed: cli.seed }
    } else {
        VerifyPolicy::All
    };
    let config = ScanConfig {
        ell_max: args.ell_max,
        precision: cli.precision,
        map: args.map.unwrap_or(default_map),
        jobs: cli.jobs,
        verify,
    };
    let report = run_scan(&config)?;
    report.write_jsonl(open_output(cli.out.as_deref())?)?;

    // The JSONL stream is the deterministic artifact; the summary carries
    // the wall time and goes to stdout only when records went to a file.
    let summary_sink: Box<dyn Write> = if cli.out.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&report, summary_sink)?,
        _ => {
            let mut s = summary_sink;
            let sum = &report.summary;
            writeln!(
                s,
                "scanned {} patterns (ell <= {}, map {}) in {:.3}s",
                sum.patterns,
                config.ell_max,
                config.map,
                report.wall_time().as_secs_f64()
            )?;
            writeln!(
                s,
                "admissible {}  integer {}  ghost {}  orbits verified {}",
                sum.admissible, sum.integer_cycles, sum.ghosts, sum.verified
            )?;
            for entry in &sum.integral_patterns {
                writeln!(
                    s,
                    "  integral {} -> {}{}{}",
                    entry.pattern,
                    entry.integer_value,
                    if config.map.is_admissible(&entry.pattern) { "" } else { " (inadmissible)" },
                    if entry.classical_confirmed { "" } else { " (NOT confirmed classically)" }
                )?;
            }
            s.flush()?;
        }
    }
    Ok(())
}

fn cmd_fibers(cli: &Cli, args: &FiberArgs) -> Result<(), Failure> {
    if args.y == 0 {
        return Err(Failure::Usage("--y must be at least 1".into()));
    }
    let rows = fiber_table(args.y, args.x_min, args.x_max, args.scan_bound);
    if rows.is_empty() {
        return Err(Failure::Usage(format!(
            "no x in {}..={} satisfies 2^x > 3^{}",
            args.x_min, args.x_max, args.y
        )));
    }
    let out = open_output(cli.out.as_deref())?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(&rows, out),
        _ => Ok(write_csv(&rows, out)?),
    }
}

fn cmd_witness(cli: &Cli, args: &WitnessArgs) -> Result<(), Failure> {
    if args.y == 0 {
        return Err(Failure::Usage("--y must be at least 1".into()));
    }
    let witness = nonsemilinearity_witness(args.y, &args.bound);
    let mut out = open_output(cli.out.as_deref())?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&witness, out),
        _ => {
            writeln!(
                out,
                "y = {}: x = {} has fiber period 2^{} - 3^{} = {} > {}",
                witness.y, witness.x, witness.x, witness.y, witness.period, args.bound
            )?;
            Ok(out.flush()?)
        }
    }
}

fn cmd_probe(cli: &Cli, args: &ProbeArgs) -> Result<(), Failure> {
    let report =
        density_probe(args.target, args.target_precision, args.ell_max).map_err(Failure::Usage)?;
    let mut out = open_output(cli.out.as_deref())?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&report, out),
        _ => {
            writeln!(out, "EXPLORATORY: agreement depth of ghost cycles with a 2-adic target")?;
            writeln!(
                out,
                "target {} mod 2^{}, {} admissible patterns with ell <= {}",
                report.target_residue,
                report.target_precision,
                report.patterns_scanned,
                report.ell_max
            )?;
            if let Some(best) = &report.best {
                writeln!(
                    out,
                    "best {} n0 = {} (depth {})",
                    best.pattern, best.n0_residue, best.depth
                )?;
            }
            for (depth, count) in report.histogram.iter().enumerate() {
                writeln!(out, "depth {depth:>2}: {count}")?;
            }
            Ok(out.flush()?)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let standard = GeneralizedMap::STANDARD;
    match &cli.command {
        Command::Ghost(args) => cmd_ghost(cli, args, standard),
        Command::Scan(args) => cmd_scan(cli, args, standard),
        Command::Fibers(args) => cmd_fibers(cli, args),
        Command::Witness(args) => cmd_witness(cli, args),
        Command::DensityProbe(args) => cmd_probe(cli, args),
        Command::General { command } => {
            let missing = || Failure::Usage("general needs --map q,d".into());
            match command {
                GeneralCommand::Ghost(a) => cmd_ghost(cli, a, a.map.ok_or_else(missing)?),
                GeneralCommand::Scan(a) => cmd_scan(cli, a, a.map.ok_or_else(missing)?),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Dynamics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DYNAMICS)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
