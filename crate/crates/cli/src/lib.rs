//! Job runner behind the `confmap` command.
//!
//! Exit codes: 0 success, 2 parse or usage, 3 geometry, 4 solver,
//! 5 tolerance not reached, 6 rendering or output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use confmap::diagnostics::{elongation_estimate, end_hitting_probability, ProbabilityResult};
use confmap::geometry::{DomainSpec, GeometryError, RawDomain};
use confmap::maps::{conformal_map, evaluate_map, ConformalMap, MapError, MapOptions, Target};
use confmap::rational::{boundary_correspondence, fit_rational, Direction, RationalApproximant, RationalError};
use confmap::render::{render_field_svg, render_grid_svg, RenderSpec};
use confmap::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Map,
    Modulus,
    Grid,
    Field,
    Probe,
    Compress,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Map => "map",
            Task::Modulus => "modulus",
            Task::Grid => "grid",
            Task::Field => "field",
            Task::Probe => "probe",
            Task::Compress => "compress",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub task: Task,
    pub domain_path: PathBuf,
    /// Inferred from the domain when absent.
    pub target: Option<Target>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub grid: (usize, usize),
    pub points: Option<PathBuf>,
    pub max_dof: usize,
    pub best_effort: bool,
    pub center: Option<Complex64>,
    pub samples: usize,
    pub max_degree: usize,
    pub rational_tol: f64,
}

impl JobConfig {
    pub fn new(task: Task, domain_path: impl Into<PathBuf>) -> Self {
        JobConfig {
            task,
            domain_path: domain_path.into(),
            target: None,
            tol: 1e-8,
            out: None,
            svg: None,
            grid: (8, 16),
            points: None,
            max_dof: confmap::laplace::DEFAULT_MAX_DOF,
            best_effort: false,
            center: None,
            samples: 2000,
            max_degree: 200,
            rational_tol: 1e-6,
        }
    }
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("tolerance not reached: {0}")]
    Tolerance(String),
    #[error("render error: {0}")]
    Render(String),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Parse(_) => 2,
            JobError::Geometry(_) => 3,
            JobError::Solver(_) => 4,
            JobError::Tolerance(_) => 5,
            JobError::Render(_) => 6,
        }
    }
}

impl From<GeometryError> for JobError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Parse(m) => JobError::Parse(m),
            e => JobError::Geometry(e.to_string()),
        }
    }
}

impl From<MapError> for JobError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::TolUnreachable { .. } => JobError::Tolerance(e.to_string()),
            MapError::NotSimplyConnected(_)
            | MapError::WrongConnectivity(_)
            | MapError::CenterOutside(_)
            | MapError::NoQuadMarking => JobError::Geometry(e.to_string()),
            MapError::Solver(confmap::laplace::LaplaceError::Geometry(g)) => g.into(),
            e => JobError::Solver(e.to_string()),
        }
    }
}

impl From<RationalError> for JobError {
    fn from(e: RationalError) -> Self {
        match e {
            RationalError::DegreeExhausted { .. } => JobError::Tolerance(e.to_string()),
            e => JobError::Solver(e.to_string()),
        }
    }
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parses a domain file, reporting JSON errors by byte offset.
pub fn parse_domain(text: &str) -> Result<DomainSpec, JobError> {
    let raw = RawDomain::from_json(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg);
        JobError::Parse(format!("{msg} at byte offset {offset}"))
    })?;
    Ok(raw.build()?)
}

pub fn load_domain(path: &Path) -> Result<DomainSpec, JobError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| JobError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_domain(&text)
}

/// Target for `task` when none is given.
pub fn infer_target(domain: &DomainSpec, task: Task) -> Target {
    if !domain.holes().is_empty() {
        Target::Annulus
    } else if domain.quad().is_some() && matches!(task, Task::Modulus | Task::Field) {
        Target::Rectangle
    } else {
        Target::Disk
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Approximants {
    pub forward: serde_json::Value,
    pub inverse: serde_json::Value,
}

/// Contents of the result file.
#[derive(Debug, Clone, Serialize)]
pub struct JobResult {
    pub task: String,
    pub target: Target,
    pub modulus: Option<f64>,
    pub residual: f64,
    pub rms_residual: f64,
    pub dof: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_hitting_probability: Option<ProbabilityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elongation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximants: Option<Approximants>,
    pub version: &'static str,
    pub timing: f64,
}

impl JobResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes") + "\n"
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let modulus = match (self.target, self.modulus) {
            (Target::Annulus, Some(r)) => format!(" R = {r:.12}"),
            (Target::Rectangle, Some(mu)) => format!(" mu = {mu:.12}"),
            _ => String::new(),
        };
        format!(
            "{} {}:{} residual {:.3e} dof {}{}",
            self.task,
            self.target,
            modulus,
            self.residual,
            self.dof,
            if self.certified { "" } else { " (uncertified)" }
        )
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), JobError> {
    std::fs::write(path, contents).map_err(|e| JobError::Render(format!("cannot write {}: {e}", path.display())))
}

/// Reads `x,y` rows; a non-numeric first row is a header.
pub fn read_points(path: &Path) -> Result<Vec<Complex64>, JobError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| JobError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| JobError::Parse(format!("{}: {e}", path.display())))?;
        let parsed: Option<Vec<f64>> = rec.iter().take(2).map(|s| s.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => pts.push(Complex64::new(v[0], v[1])),
            _ if k == 0 => continue,
            _ => {
                return Err(JobError::Parse(format!(
                    "{}: row {} is not an x,y pair",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    Ok(pts)
}

/// Probe CSV with columns `x_in, y_in, x_out, y_out, |f'|`.
pub fn probe_csv(map: &ConformalMap, points: &[Complex64]) -> Result<String, JobError> {
    let values = evaluate_map(map, points)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| JobError::Render(e.to_string());
    w.write_record(["x_in", "y_in", "x_out", "y_out", "|f'|"]).map_err(io)?;
    for (z, (f, df)) in points.iter().zip(values) {
        w.write_record([z.re, z.im, f.re, f.im, df.norm()].map(|v| v.to_string()))
            .map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| JobError::Render(e.to_string()))?)
        .map_err(|e| JobError::Render(e.to_string()))
}

fn approximant_json(r: &RationalApproximant) -> serde_json::Value {
    serde_json::from_str(&r.to_json()).expect("approximant json")
}

/// Runs one job, writing its artifacts; returns the result record.
pub fn run_job(config: &JobConfig) -> Result<JobResult, JobError> {
    let started = Instant::now();
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(JobError::Parse(format!("tolerance must be positive, got {}", config.tol)));
    }
    if config.grid.0 < 2 || config.grid.1 < 2 {
        return Err(JobError::Parse(format!(
            "grid counts must be at least 2, got {}x{}",
            config.grid.0, config.grid.1
        )));
    }
    let domain = load_domain(&config.domain_path)?;
    let target = config.target.unwrap_or_else(|| infer_target(&domain, config.task));
    match config.task {
        Task::Modulus if target == Target::Disk => {
            return Err(JobError::Parse("modulus needs an annulus or rectangle target".into()))
        }
        Task::Field if target != Target::Rectangle => {
            return Err(JobError::Render(format!("field plots need a rectangle map, got {target}")))
        }
        Task::Grid | Task::Field if config.svg.is_none() => {
            return Err(JobError::Parse(format!("task {} needs --svg", config.task)))
        }
        Task::Probe if config.points.is_none() => return Err(JobError::Parse("task probe needs --points".into())),
        _ => {}
    }
    let mut opts = MapOptions::new(config.tol).with_max_dof(config.max_dof);
    if config.best_effort {
        opts = opts.best_effort();
    }
    let map = conformal_map(&domain, target, config.center, &opts)?;
    let report = map.residual();
    let mut result = JobResult {
        task: config.task.to_string(),
        target,
        modulus: map.modulus,
        residual: report.max_residual,
        rms_residual: report.rms_residual,
        dof: report.fitted_dof,
        certified: map.certified,
        center: (target == Target::Disk).then_some([map.center.re, map.center.im]),
        end_hitting_probability: None,
        elongation: None,
        approximants: None,
        version: confmap::VERSION,
        timing: 0.0,
    };

    let spec = RenderSpec::grid(config.grid.0, config.grid.1);
    match config.task {
        Task::Map => {}
        Task::Modulus => {
            result.elongation = Some(elongation_estimate(&domain).l);
            if target == Target::Rectangle {
                result.end_hitting_probability = map.modulus.and_then(|mu| end_hitting_probability(mu).ok());
            }
        }
        Task::Grid => {
            let svg = render_grid_svg(&map, &spec).map_err(|e| JobError::Render(e.to_string()))?;
            write_file(config.svg.as_deref().unwrap(), &svg)?;
        }
        Task::Field => {
            let svg = render_field_svg(&map, &spec).map_err(|e| JobError::Render(e.to_string()))?;
            write_file(config.svg.as_deref().unwrap(), &svg)?;
        }
        Task::Probe => {
            let points = read_points(config.points.as_deref().unwrap())?;
            let csv = probe_csv(&map, &points)?;
            match &config.out {
                Some(out) => write_file(&out.with_extension("csv"), &csv)?,
                None => print!("{csv}"),
            }
        }
        Task::Compress => {
            let table = boundary_correspondence(&map, config.samples)?;
            let forward = fit_rational(&table, Direction::Forward, config.rational_tol, config.max_degree)?;
            let inverse = fit_rational(&table, Direction::Inverse, config.rational_tol, config.max_degree)?;
            result.approximants = Some(Approximants {
                forward: approximant_json(&forward),
                inverse: approximant_json(&inverse),
            });
        }
    }
    result.timing = started.elapsed().as_secs_f64();
    if let Some(out) = &config.out {
        write_file(out, &result.to_json())?;
    }
    Ok(result)
}
