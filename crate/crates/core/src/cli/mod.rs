//! Command-line front end.
//!
//! Settings are layered: command-line flags override config-file keys,
//! which override the built-in defaults.

pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::harness::{run_cell_runs, run_iteration, run_sweep, iteration_seed, Preset, Provenance, RunOptions, SweepResult, SweepSpec};
use crate::kpi::{GridPoint, KpiAccumulator};
use crate::scenario::{validate_config, RouteLabel, SimConfig};
use output::{write_csv, write_json, TraceWriter};

#[derive(Debug, Parser)]
#[command(
    name = "udn-handover",
    version,
    about = "Downlink system-level simulator for 5G handover in ultra-dense networks",
    after_help = "Flags override config-file keys, which override the built-in defaults.\n\
                  Exit codes: 0 success, 1 invalid configuration or flags, 2 I/O failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a single grid cell.
    Run(RunArgs),
    /// Simulate a grid of cells.
    Sweep(SweepArgs),
    /// Parse the configuration and print the effective settings.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
}

impl From<CaseArg> for RouteLabel {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::A => RouteLabel::CaseA,
            CaseArg::B => RouteLabel::CaseB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Config file (key = value lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo iterations per cell.
    #[arg(long)]
    iterations: Option<u32>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the same deployments and channel draws for every TTT value.
    #[arg(long)]
    crn: bool,
    /// Run on the calling thread only.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum, ignore_case = true)]
    case: Option<CaseArg>,
    /// Time-to-trigger in tics.
    #[arg(long)]
    ttt: Option<u32>,
    /// gNBs per km².
    #[arg(long)]
    density: Option<u32>,
    /// TU velocity in km/h.
    #[arg(long)]
    velocity: Option<f64>,
    /// Write a per-tic trace of one iteration to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Iteration captured by --trace.
    #[arg(long, default_value_t = 0)]
    trace_iteration: u32,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Named grid: fig4, fig5 or tables.
    #[arg(long, value_parser = parse_preset, conflicts_with_all = ["ttt_list", "density_list", "velocity_list", "case_list"])]
    preset: Option<Preset>,
    /// Comma-separated TTT values in tics.
    #[arg(long, value_delimiter = ',')]
    ttt_list: Vec<u32>,
    /// Comma-separated densities in gNBs per km².
    #[arg(long, value_delimiter = ',')]
    density_list: Vec<u32>,
    /// Comma-separated velocities in km/h.
    #[arg(long, value_delimiter = ',')]
    velocity_list: Vec<f64>,
    /// Comma-separated routes.
    #[arg(long, value_delimiter = ',', value_enum, ignore_case = true)]
    case_list: Vec<CaseArg>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

fn load_config(path: Option<&Path>) -> Result<SimConfig, CliError> {
    let Some(path) = path else {
        return Ok(SimConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    SimConfig::from_config_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn apply_io(cfg: &mut SimConfig, io: &IoArgs) {
    if let Some(n) = io.iterations {
        cfg.scenario.iterations = n;
    }
    if let Some(s) = io.seed {
        cfg.scenario.seed = s;
    }
}

fn options(io: &IoArgs) -> RunOptions {
    RunOptions {
        crn: io.crn,
        parallel: !io.serial,
    }
}

fn emit(result: &SweepResult, io: &IoArgs) -> Result<(), CliError> {
    let write = |sink: &mut dyn Write| match io.format {
        Format::Csv => write_csv(result, sink),
        Format::Json => write_json(result, sink),
    };
    match &io.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            write(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = load_config(args.io.config.as_deref())?;
    apply_io(&mut cfg, &args.io);
    if let Some(c) = args.case {
        cfg.scenario.route = crate::scenario::Route::preset(c.into()).expect("preset");
    }
    let point = GridPoint {
        case: cfg.scenario.route.label,
        ttt_tics: args.ttt.unwrap_or(cfg.handover.ttt_tics),
        den_gnb: args.density.unwrap_or(cfg.scenario.den_gnb),
        velocity_kmh: args.velocity.unwrap_or(cfg.scenario.velocity_kmh),
    };
    let valid = validate_config(point.apply(&cfg)).map_err(|e| CliError::Invalid(e.to_string()))?;
    let iterations = valid.scenario.iterations;
    let seed = valid.scenario.seed;
    let opts = options(&args.io);

    if let Some(path) = &args.trace {
        if args.trace_iteration >= iterations {
            return Err(CliError::Invalid(format!(
                "--trace-iteration {} is out of range for {iterations} iterations",
                args.trace_iteration
            )));
        }
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut tw = TraceWriter::new(BufWriter::new(file)).map_err(|e| CliError::io(path, e))?;
        let mut failure: Option<io::Error> = None;
        let mut sink = |row: &crate::handover::TraceRow| {
            if failure.is_none() {
                if let Err(e) = tw.write(row) {
                    failure = Some(e);
                }
            }
        };
        let iter_seed = iteration_seed(seed, &point, &valid.scenario.route, args.trace_iteration, opts.crn);
        run_iteration(&valid, iter_seed, Some(&mut sink));
        if let Some(e) = failure {
            return Err(CliError::io(path, e));
        }
        tw.finish().map_err(|e| CliError::io(path, e))?;
    }

    let runs = run_cell_runs(&cfg, &point, iterations, seed, opts)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let mut acc = KpiAccumulator::default();
    runs.iter().for_each(|r| acc.push(r));
    let result = SweepResult {
        cells: vec![acc.finish(point)],
        provenance: Provenance {
            master_seed: seed,
            iterations,
            crn: opts.crn,
            config: valid.to_config_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    emit(&result, &args.io)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut cfg = load_config(args.io.config.as_deref())?;
    apply_io(&mut cfg, &args.io);
    let iterations = cfg.scenario.iterations;
    let seed = cfg.scenario.seed;
    let mut spec = match args.preset {
        Some(p) => SweepSpec::preset(p, iterations, seed),
        None => {
            let cases = if args.case_list.is_empty() {
                vec![cfg.scenario.route.label]
            } else {
                args.case_list.iter().map(|&c| c.into()).collect()
            };
            SweepSpec {
                cases,
                ttt_list: if args.ttt_list.is_empty() { vec![cfg.handover.ttt_tics] } else { args.ttt_list },
                density_list: if args.density_list.is_empty() { vec![cfg.scenario.den_gnb] } else { args.density_list },
                velocity_list: if args.velocity_list.is_empty() { vec![cfg.scenario.velocity_kmh] } else { args.velocity_list },
                iterations,
                master_seed: seed,
                options: RunOptions::default(),
            }
        }
    };
    spec.options = options(&args.io);
    let result = run_sweep(&cfg, &spec).map_err(|e| CliError::Invalid(e.to_string()))?;
    emit(&result, &args.io)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let valid = validate_config(cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
    let sc = &valid.scenario;
    let mut out = valid.to_config_string();
    out.push_str(&format!(
        "# velocity {:.2} m/s, {} gNBs, {} tics, noise {:.2} dBm\n",
        sc.velocity_mps(),
        sc.gnb_count(),
        sc.num_tics(),
        crate::radio::noise_power_dbm(&valid.link),
    ));
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

/// Runs the CLI and returns the process exit code.
pub fn main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Invalid(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("I/O error: {m}"),
            }
            e.code()
        }
    }
}
