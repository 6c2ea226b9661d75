use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod failure;

use failure::Failure;

/// Maneuvering simulator for a twin-hull waterjet surface vehicle.
#[derive(Parser, Debug)]
#[command(name = "usvsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run builtin scenarios or scenario files and write logs and summaries
    Run(RunArgs),
    /// Compare the steady-state errors of two logs of the same scenario
    Compare(CompareArgs),
    /// Fit drag or thrust coefficients to measured points
    Fit(FitArgs),
    /// Print the hydrodynamic coefficient table for a condition
    DeriveCoeffs(DeriveArgs),
    /// Convert a log into long (t, channel, value) rows for plotting
    PlotData(PlotArgs),
    /// Print a builtin scenario as TOML
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Builtin scenario names or paths to scenario TOML files
    #[arg(required = true)]
    scenarios: Vec<String>,
    /// Vessel configuration (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; each run gets its own subdirectory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Controllers for closed-loop scenarios, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bs")]
    controller: Vec<ControllerArg>,
    #[arg(long, value_enum)]
    thruster: Option<ThrusterArg>,
    /// Integration step, s
    #[arg(long)]
    dt: Option<f64>,
    /// Seed of the optional sensor-noise stub
    #[arg(long)]
    seed: Option<u64>,
    /// Run length, s
    #[arg(long)]
    duration: Option<f64>,
    /// Output formats, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,json")]
    format: Vec<Format>,
    /// Runs executed concurrently
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    steady: SteadyArgs,
}

#[derive(Args, Debug, Clone, Copy)]
struct SteadyArgs {
    /// Steady-state window, s
    #[arg(long, default_value_t = 10.0)]
    window: f64,
    /// Speed standard deviation below which the run is steady, m/s
    #[arg(long, default_value_t = 0.02)]
    speed_tol: f64,
    /// Heading standard deviation below which the run is steady, deg
    #[arg(long, default_value_t = 0.5)]
    heading_tol: f64,
    /// Time after each event excluded from steady state, s
    #[arg(long, default_value_t = 5.0)]
    exclusion: f64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    log_a: PathBuf,
    log_b: PathBuf,
    /// Directory for comparison.csv and comparison.json
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    steady: SteadyArgs,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV of (u, force) rows, or (u, command, thrust) rows for thrust-decay
    points: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: FitModel,
    /// Bollard pull of both jets, N (thrust-decay without points)
    #[arg(long, default_value_t = 204.0)]
    bollard: f64,
    /// Observed top speed, m/s (thrust-decay without points)
    #[arg(long)]
    top_speed: Option<f64>,
    /// Condition label for thrust-decay and written fragments
    #[arg(long, default_value = "lightship")]
    condition: String,
    /// Vessel configuration (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write a vessel configuration fragment with the fitted surge drag
    #[arg(long)]
    fragment: Option<PathBuf>,
    /// Print JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Vessel configuration (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "lightship")]
    condition: String,
    /// Reference velocity u,v,r
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0])]
    nu: Vec<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: TableFormat,
    /// Write to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    log: PathBuf,
    /// Channels to emit, comma separated; all numeric channels when absent
    #[arg(long, value_delimiter = ',')]
    channels: Vec<String>,
    /// Write to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    name: String,
    #[arg(long, value_enum, default_value = "bs")]
    controller: ControllerArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ControllerArg {
    Bs,
    Abs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ThrusterArg {
    Bollard,
    Pump,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FitModel {
    SurgeDrag,
    TowDrag,
    ThrustDecay,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TableFormat {
    Table,
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return Failure::usage(e.to_string()).report();
        }
    };
    let result = match cli.command {
        Command::Run(args) => commands::run(args),
        Command::Compare(args) => commands::compare(args),
        Command::Fit(args) => commands::fit(args),
        Command::DeriveCoeffs(args) => commands::derive_coeffs(args),
        Command::PlotData(args) => commands::plot_data(args),
        Command::Scenario(args) => commands::scenario(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
