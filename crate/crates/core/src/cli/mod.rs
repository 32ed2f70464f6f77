//! Command-line front end.
//!
//! Every command writes its table (or plot script) and a run manifest into
//! the output directory. Exit codes: 0 success, 1 numerical failure, 2 bad
//! configuration or arguments, 3 bad input data, 4 no target feasible.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod plot;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::fbl::MuLogMode;
use crate::montecarlo::SimMode;
use crate::optimizer::Objective;
use crate::relaying::{GammaYDistance, MrcBlocklength, Scheme};
use config::{ConfigError, PolicyKind, RunConfig};
use manifest::{content_hash, RunManifest};
use plot::Figure;
use table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "urllc-pilot",
    version,
    about = "Outage, latency and goodput of short-packet links with pilot-based estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (key = value with [scenario], [policy], [sweep], [simulate]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, global = true, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Peak pilot power factor.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Comma-separated outage targets.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    /// Relay-destination path loss distance.
    #[arg(long, global = true, value_enum)]
    pub gamma_y_mode: Option<GammaYArg>,
    /// Data blocklength of the combined decoding attempt.
    #[arg(long, global = true, value_enum)]
    pub mrc_n_mode: Option<MrcArg>,
    /// Rate unit inside the closed-form outage slope.
    #[arg(long, global = true, value_enum)]
    pub mu_log_mode: Option<MuLogArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage against SNR per scheme and pilot policy.
    SweepSnr,
    /// Optimal pilot count against blocklength and kappa.
    SweepKappa,
    /// Minimum latency per outage target.
    Latency,
    /// Maximum goodput per outage target.
    Goodput,
    /// Monte Carlo estimate next to the analytic value.
    Simulate {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Plot script for a table written by another command.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        figure: FigureArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Dt,
    Df,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Apc,
    Ppc,
    Pcsi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GammaYArg {
    Drd,
    Dsd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MrcArg {
    Relay,
    Combined,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MuLogArg {
    Bits,
    Nats,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModeArg {
    Direct,
    RelayDf,
    MrcOnly,
    EstimatorCheck,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Scenario(_) => EXIT_CONFIG,
            Error::InvalidRegime(_) | Error::Quadrature { .. } => EXIT_NUMERICAL,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_DATA, format!("{}: {e}", path.display()))
}

/// Configuration file (or defaults) with command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<(RunConfig, Vec<(String, String)>), Failure> {
    let mut inputs = Vec::new();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_CONFIG, format!("config: {}: {e}", path.display())))?;
            inputs.push(("config".to_string(), content_hash(text.as_bytes())));
            config::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.simulate.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.simulate.samples = samples;
    }
    if let Some(s) = cli.scheme {
        let scheme = match s {
            SchemeArg::Dt => Scheme::Direct,
            SchemeArg::Df => Scheme::DecodeForward,
        };
        cfg.scheme = scheme;
        cfg.sweep.schemes = vec![scheme];
    }
    if let Some(p) = cli.policy {
        let policy = match p {
            PolicyArg::Apc => PolicyKind::Apc,
            PolicyArg::Ppc => PolicyKind::Ppc,
            PolicyArg::Pcsi => PolicyKind::Pcsi,
        };
        cfg.policy = policy;
        cfg.sweep.policies = vec![policy];
    }
    if let Some(k) = cli.kappa {
        cfg.kappa = k;
    }
    if let Some(grid) = &cli.eps_grid {
        cfg.sweep.eps_grid = grid.clone();
    }
    if let Some(m) = cli.gamma_y_mode {
        cfg.scenario.gamma_y_mode = match m {
            GammaYArg::Drd => GammaYDistance::RelayDestination,
            GammaYArg::Dsd => GammaYDistance::SourceDestination,
        };
    }
    if let Some(m) = cli.mrc_n_mode {
        cfg.scenario.mrc_n_mode = match m {
            MrcArg::Relay => MrcBlocklength::RelayPhase,
            MrcArg::Combined => MrcBlocklength::Combined,
        };
    }
    if let Some(m) = cli.mu_log_mode {
        cfg.scenario.mu_log_mode = match m {
            MuLogArg::Bits => MuLogMode::Bits,
            MuLogArg::Nats => MuLogMode::Nats,
        };
    }
    if let Command::Simulate { mode: Some(m) } = cli.command {
        cfg.simulate.mode = match m {
            ModeArg::Direct => SimMode::Direct,
            ModeArg::RelayDf => SimMode::RelayDf,
            ModeArg::MrcOnly => SimMode::MrcOnly,
            ModeArg::EstimatorCheck => SimMode::EstimatorCheck,
        };
    }
    cfg.validate()?;
    Ok((cfg, inputs))
}

fn quote(arg: &str) -> String {
    if !arg.is_empty() && arg.chars().all(|c| c.is_ascii_alphanumeric() || "-_./=,:+".contains(c)) {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', "'\\''"))
    }
}

fn write_output(
    out_dir: &Path,
    file_name: &str,
    content: &str,
    schema: &str,
    command_line: &str,
    inputs: Vec<(String, String)>,
    cfg: &RunConfig,
) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(out_dir).map_err(|e| io_failure(out_dir, e))?;
    let path = out_dir.join(file_name);
    fs::write(&path, content).map_err(|e| io_failure(&path, e))?;
    let manifest = RunManifest {
        command_line: command_line.to_string(),
        schema: schema.to_string(),
        output_file: file_name.to_string(),
        output_hash: content_hash(content.as_bytes()),
        inputs,
        config: cfg.clone(),
    };
    let stem = Path::new(file_name).file_stem().and_then(|s| s.to_str()).unwrap_or(file_name);
    let manifest_path = out_dir.join(format!("{stem}.manifest"));
    fs::write(&manifest_path, manifest.render()).map_err(|e| io_failure(&manifest_path, e))?;
    Ok(vec![path, manifest_path])
}

/// Execute a parsed command line; returns the files written.
pub fn execute(cli: &Cli, command_line: &str) -> Result<Vec<PathBuf>, Failure> {
    let (cfg, mut inputs) = resolve_config(cli)?;
    let emit = |name: &str, table: &Table, inputs: Vec<(String, String)>| {
        write_output(&cli.out, &format!("{name}.csv"), &table.render(), &table.schema, command_line, inputs, &cfg)
    };
    match &cli.command {
        Command::SweepSnr => emit("sweep_snr", &commands::sweep_snr(&cfg)?, inputs),
        Command::SweepKappa => emit("sweep_kappa", &commands::sweep_kappa(&cfg)?, inputs),
        Command::Latency | Command::Goodput => {
            let (name, objective) = match cli.command {
                Command::Latency => ("latency", Objective::Latency),
                _ => ("goodput", Objective::Goodput),
            };
            let (table, none_feasible) = commands::frontier_table(&cfg, objective)?;
            let written = emit(name, &table, inputs)?;
            if none_feasible {
                return Err(Failure::new(EXIT_INFEASIBLE, "no outage target is feasible within the blocklength range"));
            }
            Ok(written)
        }
        Command::Simulate { .. } => emit("simulate", &commands::simulate(&cfg)?, inputs),
        Command::Plot { csv, figure } => {
            let text = fs::read_to_string(csv).map_err(|e| io_failure(csv, e))?;
            inputs.push(("csv".to_string(), content_hash(text.as_bytes())));
            let table = Table::parse(&text).map_err(|m| Failure::new(EXIT_DATA, format!("{}: {m}", csv.display())))?;
            let figure = match figure {
                FigureArg::Fig2 => Figure::Fig2,
                FigureArg::Fig3 => Figure::Fig3,
                FigureArg::Fig4 => Figure::Fig4,
                FigureArg::Fig5 => Figure::Fig5,
            };
            let script = plot::render_script(figure, &table)
                .map_err(|m| Failure::new(EXIT_DATA, format!("{}: {m}", csv.display())))?;
            write_output(
                &cli.out,
                &format!("{}.py", figure.label()),
                &script,
                figure.schema(),
                command_line,
                inputs,
                &cfg,
            )
        }
    }
}

/// Parse `args` (program name first), run, report, and return the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let command_line = args.iter().skip(1).map(|a| quote(a)).collect::<Vec<_>>().join(" ");
    match execute(&cli, &command_line) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
