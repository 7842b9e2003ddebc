use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use orbit_opt::experiments::{run, write_outputs, ConfigOverrides, ExperimentConfig, ExperimentKind};
use orbit_opt::Error;

#[derive(Parser)]
#[command(name = "orbit-opt", version, about = "Run orbit-averaging experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case TV curves of P, GP and GPG
    TvCurves(Flags),
    /// Cut mass split by magnetisation level
    CutByMagnetisation(Flags),
    /// Singleton approximation against the exhaustive optimum
    HalfApproxCompare(Flags),
    /// MM hit rate on the one-sided KL objective
    MmHitRate(Flags),
    /// Coordinate descent hit rate on the two-sided KL objective
    CoordDescentHitRate(Flags),
    /// Exact hypercube distances against the closed-form bounds
    HypercubeBounds(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated temperatures
    #[arg(long = "T", value_delimiter = ',')]
    temperatures: Option<Vec<f64>>,
    /// Comma-separated fields
    #[arg(long = "h", value_delimiter = ',', allow_negative_numbers = true)]
    fields: Option<Vec<f64>>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file; its values take precedence over flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build(kind: ExperimentKind, f: Flags) -> orbit_opt::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(kind);
    cfg.apply(ConfigOverrides {
        d: f.d,
        temperatures: f.temperatures,
        fields: f.fields,
        t_max: f.t_max,
        runs: f.runs,
        seed: f.seed,
        output_dir: f.out,
        ..Default::default()
    });
    if let Some(path) = f.config {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let o = ConfigOverrides::from_json(&text)?;
        if o.experiment.is_some_and(|e| e != kind) {
            return Err(Error::Config("config names a different experiment".into()));
        }
        cfg.apply(o);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match cli.command {
        Command::TvCurves(f) => (ExperimentKind::TvCurves, f),
        Command::CutByMagnetisation(f) => (ExperimentKind::CutByMagnetisation, f),
        Command::HalfApproxCompare(f) => (ExperimentKind::HalfApproxCompare, f),
        Command::MmHitRate(f) => (ExperimentKind::MmHitRate, f),
        Command::CoordDescentHitRate(f) => (ExperimentKind::CoordDescentHitRate, f),
        Command::HypercubeBounds(f) => (ExperimentKind::HypercubeBounds, f),
    };
    let result = build(kind, flags).and_then(|cfg| {
        let start = Instant::now();
        let files = run(&cfg)?;
        write_outputs(&cfg, &files, start.elapsed())
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::NumericalGuard(_) | Error::InequalityViolated(_) => 3,
                _ => 1,
            })
        }
    }
}
