use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use constraint_forge::run::split_binding;
use constraint_forge::sysfile::Ambient;
use constraint_forge::{parse_system_file, run, CliError, Command, Engine, RunOptions, MAX_STAGES_ENV};

#[derive(Parser)]
#[command(name = "constraint-forge", version, about = "Constraint analysis of singular Lagrangian systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Legendre analysis, constraint stabilization and classification.
    Analyze(Args),
    /// Everything from `analyze`, plus the total Hamiltonian and equations of motion.
    Eom(Args),
    /// Everything from `eom`, plus a fixed-step integration and drift report.
    Integrate(Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Algebraic,
    Geometric,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbientArg {
    Stage,
    Primary,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Args {
    /// System definition file.
    file: String,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Ambient distribution for the contact engine's orthogonal complements.
    #[arg(long, value_enum)]
    ambient: Option<AmbientArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Multiplier binding NAME=EXPR (repeatable).
    #[arg(long = "multiplier", value_parser = split_binding)]
    multipliers: Vec<(String, String)>,
    /// Initial value VAR=FLOAT (repeatable).
    #[arg(long = "init", value_parser = parse_init)]
    init: Vec<(String, f64)>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Trajectory CSV output path.
    #[arg(long)]
    out: Option<String>,
}

fn parse_init(s: &str) -> Result<(String, f64), String> {
    let (k, v) = split_binding(s)?;
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k, x))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Eom(a) => (Command::Eom, a),
        Cmd::Integrate(a) => (Command::Integrate, a),
    };
    let max_stages = match std::env::var(MAX_STAGES_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{MAX_STAGES_ENV} must be a nonnegative integer, found `{v}`")))?,
        ),
        Err(_) => None,
    };
    let text = std::fs::read_to_string(&args.file).map_err(|e| CliError::Io(format!("{}: {e}", args.file)))?;
    let file = parse_system_file(&text)?;
    let opts = RunOptions {
        engine: args.engine.map(|e| match e {
            EngineArg::Algebraic => Engine::Algebraic,
            EngineArg::Geometric => Engine::Geometric,
            EngineArg::Both => Engine::Both,
        }),
        ambient: args.ambient.map(|a| match a {
            AmbientArg::Stage => Ambient::Stage,
            AmbientArg::Primary => Ambient::Primary,
        }),
        multipliers: args.multipliers,
        init: args.init,
        t_end: args.t_end,
        dt: args.dt,
        out: args.out,
        max_stages,
    };
    let outcome = run(command, &file, &opts)?;
    match args.format {
        Format::Text => print!("{}", outcome.report.to_text()),
        Format::Json => print!("{}", outcome.report.to_json()),
    }
    if let Some(d) = &outcome.diagnostic {
        eprintln!("{d}");
    }
    Ok(outcome.exit_code as u8)
}
