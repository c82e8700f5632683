use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tripartite::entanglement::ClassifyOptions;
use tripartite::model::{RatioParams, SusceptibilityConvention};
use tripartite::quad_engine::QuadratureSettings;
use tripartite::sweep::{self, Engine, SweepConfig, PRESET_NAMES};
use tripartite::validate::{self, ValidateOptions};
use tripartite::Error;

/// Steady-state entanglement of three coupled oscillators in thermal baths.
#[derive(Parser)]
#[command(name = "tripartite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and classify one parameter point; prints JSON.
    Point(PointArgs),
    /// Evaluate a parameter grid and write CSV, JSON sidecar and plot script.
    Sweep(SweepArgs),
    /// Run the validation suites.
    Validate(ValidateArgs),
    /// Figure presets.
    Preset {
        #[command(subcommand)]
        command: PresetCommand,
    },
}

#[derive(Subcommand)]
enum PresetCommand {
    /// List preset names.
    List,
    /// Print a preset as a TOML sweep config.
    Show { name: String },
}

#[derive(Args)]
struct PointArgs {
    /// Mode frequencies over Omega, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 1.0])]
    freq: Vec<f64>,
    /// Detuning of the central mode; overrides its frequency.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, short = 'k', default_value_t = 0.05)]
    coupling: f64,
    /// Mean temperature 2 k_B T / hbar Omega.
    #[arg(long, short = 'T', default_value_t = 0.05)]
    temperature: f64,
    /// Temperature gradient; left bath at T + dT/2, right at T - dT/2.
    #[arg(long = "dt", default_value_t = 0.0, allow_hyphen_values = true)]
    delta_temperature: f64,
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    #[arg(long, default_value_t = 50.0)]
    cutoff: f64,
    #[arg(long, default_value = "residue", value_parser = parse_engine)]
    engine: Engine,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML sweep config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: `output_dir` of the config, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<Engine>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Random points in the cross-engine suite.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the sign-reversed susceptibility in the physical-limit suites.
    #[arg(long)]
    reversed_susceptibility: bool,
    /// Print the results as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    Engine::parse(s).ok_or_else(|| format!("unknown engine `{s}` (quadrature, residue, both)"))
}

enum Failure {
    Computation(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) | Error::UnstableParameters { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Computation(e.to_string()),
        }
    }
}

fn point(a: PointArgs) -> Result<(), Failure> {
    let mut p = RatioParams {
        frequencies: [a.freq[0], a.freq[1], a.freq[2]],
        coupling: a.coupling,
        temperature: a.temperature,
        delta_temperature: a.delta_temperature,
        gamma: a.gamma,
        cutoff: a.cutoff,
    };
    if let Some(d) = a.delta {
        p.frequencies[1] = p.frequencies[0] + d;
    }
    let mut options = ClassifyOptions::default();
    if let Some(s) = a.seed {
        options.budget.seed = s;
    }
    let (sol, rep) = sweep::evaluate_cell(&p, a.engine, &QuadratureSettings::default(), &options)?;
    let out = json!({
        "params": p,
        "engine": a.engine.to_string(),
        "class": rep.class.label(),
        "covariance": sol.covariance,
        "residue": sol.residue,
        "quadrature": sol.quadrature,
        "engine_deviation": sol.engine_deviation,
        "engine_agreement": sol.engine_deviation.map(|d| d <= 1.0),
        "fallback": sol.fallback,
        "report": rep,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

fn load_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match (&a.preset, &a.config) {
        (Some(name), _) => sweep::preset(name)
            .ok_or_else(|| Failure::Config(format!("unknown preset `{name}` ({})", PRESET_NAMES.join(", "))))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Config("need --preset or --config".into())),
    };
    if let Some(e) = a.engine {
        cfg.engine = e;
    }
    if let Some(w) = a.workers {
        cfg.workers = Some(w);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
        cfg.classify.budget.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_sweep(a: SweepArgs) -> Result<(), Failure> {
    let cfg = load_config(&a)?;
    let dir = a
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let grid = sweep::run_sweep(&cfg)?;
    let paths = grid.write_outputs(&dir, &cfg.name)?;
    let counts: Vec<String> = grid.class_counts().iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("{}: {} cells, {}", cfg.name, grid.cells.len(), counts.join(" "));
    if let Some(d) = grid.worst_engine_deviation() {
        eprintln!("worst cross-engine deviation on spot checks: {d:.3e} of tolerance");
    }
    for p in &paths {
        println!("{}", p.display());
    }
    if grid.failure_fraction() > 0.01 {
        return Err(Failure::Computation(format!(
            "{} of {} cells failed",
            grid.failed(),
            grid.cells.len()
        )));
    }
    Ok(())
}

fn run_validate(a: ValidateArgs) -> Result<(), Failure> {
    let mut opts = ValidateOptions { samples: a.samples, ..ValidateOptions::default() };
    if let Some(s) = a.seed {
        opts.seed = s;
    }
    if a.reversed_susceptibility {
        opts.convention = SusceptibilityConvention::Reversed;
    }
    let results = validate::run_all(&opts);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&results).expect("serializable"));
    } else {
        let w = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &results {
            println!("{:<w$}  {}  {}", r.name, if r.passed { "PASS" } else { "FAIL" }, r.detail);
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Computation(format!("{failed} of {} suites failed", results.len())));
    }
    Ok(())
}

fn preset(c: PresetCommand) -> Result<(), Failure> {
    match c {
        PresetCommand::List => {
            for name in PRESET_NAMES {
                let p = sweep::preset(name).expect("preset");
                println!("{name:<11} {}", p.description);
            }
        }
        PresetCommand::Show { name } => {
            let p = sweep::preset(&name).ok_or_else(|| Failure::Config(format!("unknown preset `{name}`")))?;
            print!("{}", toml::to_string(&p).map_err(|e| Failure::Computation(e.to_string()))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Point(a) => point(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Validate(a) => run_validate(a),
        Command::Preset { command } => preset(command),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Computation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
    }
}
