use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use confmap::maps::Target;
use confmap::Complex64;
use confmap_cli::{run_job, JobConfig, Task};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Map,
    Modulus,
    Grid,
    Field,
    Probe,
    Compress,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Disk,
    Annulus,
    Rectangle,
}

/// Numerical conformal maps of planar domains.
#[derive(Debug, Parser)]
#[command(name = "confmap", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum, default_value = "map")]
    task: TaskArg,
    /// Domain description (JSON).
    #[arg(long)]
    domain: PathBuf,
    /// Canonical domain; inferred from the domain when omitted.
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    /// Boundary residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Result JSON path (probe writes CSV next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG output for grid and field.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Grid curve counts as NRxNT.
    #[arg(long, default_value = "8x16", value_parser = parse_grid)]
    grid: (usize, usize),
    /// CSV of x,y points to evaluate.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Degree-of-freedom budget for the adaptive solve.
    #[arg(long, default_value_t = confmap::laplace::DEFAULT_MAX_DOF)]
    max_dof: usize,
    /// Return the best model instead of failing when tol is not reached.
    #[arg(long)]
    best_effort: bool,
    /// Conformal center for disk maps, as x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    center: Option<Complex64>,
    /// Boundary samples for compress.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Degree cap for compress.
    #[arg(long, default_value_t = 200)]
    max_degree: usize,
    /// Accuracy target for compress.
    #[arg(long, default_value_t = 1e-6)]
    rational_tol: f64,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected NRxNT")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Complex64::new(parse(a)?, parse(b)?))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let task = match args.task {
        TaskArg::Map => Task::Map,
        TaskArg::Modulus => Task::Modulus,
        TaskArg::Grid => Task::Grid,
        TaskArg::Field => Task::Field,
        TaskArg::Probe => Task::Probe,
        TaskArg::Compress => Task::Compress,
    };
    let mut config = JobConfig::new(task, args.domain);
    config.target = args.target.map(|t| match t {
        TargetArg::Disk => Target::Disk,
        TargetArg::Annulus => Target::Annulus,
        TargetArg::Rectangle => Target::Rectangle,
    });
    config.tol = args.tol;
    config.out = args.out;
    config.svg = args.svg;
    config.grid = args.grid;
    config.points = args.points;
    config.max_dof = args.max_dof;
    config.best_effort = args.best_effort;
    config.center = args.center;
    config.samples = args.samples;
    config.max_degree = args.max_degree;
    config.rational_tol = args.rational_tol;

    match run_job(&config) {
        Ok(result) => {
            if config.task == Task::Probe && config.out.is_none() {
                eprintln!("{}", result.summary());
            } else {
                println!("{}", result.summary());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("confmap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
