//! Conformal maps onto the disk, a circular annulus, or a rectangle.
//!
//! * disk: `f(z) = (z - z₀)·exp(g(z))` with `Re g = -log|z - z₀|` on the boundary,
//!   so `log|f|` is the Green's function with pole at `z₀`.
//! * annulus: `f = exp(g)` with `Re g = 0` on the hole and `log R` outside.
//! * rectangle: `w = g - i·c₀` from the mixed problem, covering `[0,1] × [0, 1/μ]`.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::Purpose;
use crate::geometry::{DomainSpec, Location};
use crate::laplace::{
    mixed_problem, solve_adaptive, AnalyticModel, BoundaryProblem, Condition, ErrorReport, Escalation, LaplaceError,
    MixedProblem, Part, DEFAULT_MAX_DOF,
};

/// Lattice resolution for inversion seeds.
pub const SEED_LATTICE: usize = 64;
pub const NEWTON_ITERATIONS: usize = 50;
pub const NEWTON_RESEEDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Disk,
    Annulus,
    Rectangle,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Disk => "disk",
            Target::Annulus => "annulus",
            Target::Rectangle => "rectangle",
        })
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "disk" => Ok(Target::Disk),
            "annulus" => Ok(Target::Annulus),
            "rectangle" => Ok(Target::Rectangle),
            other => Err(format!("unknown target '{other}' (expected disk, annulus or rectangle)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("disk maps need a simply connected domain ({0} holes)")]
    NotSimplyConnected(usize),
    #[error("annulus maps need exactly one hole ({0} found)")]
    WrongConnectivity(usize),
    #[error("center ({}, {}) is not inside the domain", .0.re, .0.im)]
    CenterOutside(Complex64),
    #[error("domain has no quadrilateral marks")]
    NoQuadMarking,
    #[error("residual {achieved:.3e} above tolerance {tol:.3e} within {dof} degrees of freedom")]
    TolUnreachable { achieved: f64, tol: f64, dof: usize },
    #[error("tolerance must be positive, got {0}")]
    BadTol(f64),
    #[error("point ({}, {}) is outside the domain", .0.re, .0.im)]
    PointOutsideDomain(Complex64),
    #[error("point ({}, {}) is the map center", .0.re, .0.im)]
    EvalAtCenter(Complex64),
    #[error("target ({}, {}) is not inside the canonical domain", .0.re, .0.im)]
    TargetOutsideCanonical(Complex64),
    #[error("Newton iteration for target ({}, {}) did not converge", .0.re, .0.im)]
    NewtonDiverged(Complex64),
    #[error("operation needs a {expected} map, got {found}")]
    WrongTarget { expected: Target, found: Target },
    #[error(transparent)]
    Solver(#[from] LaplaceError),
}

/// Construction options shared by all targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub tol: f64,
    pub max_dof: usize,
    /// Return the best map found instead of failing when `tol` is not met.
    pub best_effort: bool,
}

impl MapOptions {
    pub fn new(tol: f64) -> Self {
        MapOptions {
            tol,
            max_dof: DEFAULT_MAX_DOF,
            best_effort: false,
        }
    }

    pub fn best_effort(self) -> Self {
        MapOptions {
            best_effort: true,
            ..self
        }
    }

    pub fn with_max_dof(self, max_dof: usize) -> Self {
        MapOptions { max_dof, ..self }
    }
}

/// Values at the normalization point of a disk map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub value: Complex64,
    pub derivative: Complex64,
}

#[derive(Debug, Clone)]
pub struct ConformalMap {
    pub target: Target,
    pub domain: DomainSpec,
    /// Preimage of 0 for disk maps, the expansion center otherwise.
    pub center: Complex64,
    pub model: AnalyticModel,
    /// `R` for annulus maps, `μ` for rectangle maps.
    pub modulus: Option<f64>,
    pub normalization: Option<Normalization>,
    /// Whether the requested tolerance was met.
    pub certified: bool,
    offset: Complex64,
    seeds: OnceLock<Vec<(Complex64, Complex64)>>,
}

impl ConformalMap {
    pub fn residual(&self) -> ErrorReport {
        self.model.residual
    }

    /// `(f(z), f'(z))` without a containment check.
    pub fn eval_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        let (g, dg) = self.model.eval(z);
        match self.target {
            Target::Disk => {
                let e = g.exp();
                let d = z - self.center;
                (d * e, e * (1.0 + d * dg))
            }
            Target::Annulus => {
                let f = g.exp();
                (f, f * dg)
            }
            Target::Rectangle => (g - self.offset, dg),
        }
    }

    /// Whether `w` lies strictly inside the canonical domain.
    pub fn in_canonical(&self, w: Complex64) -> bool {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return false;
        }
        match self.target {
            Target::Disk => w.norm() < 1.0,
            Target::Annulus => {
                let r = w.norm();
                r > 1.0 && r < self.modulus.unwrap_or(f64::INFINITY)
            }
            Target::Rectangle => {
                let h = 1.0 / self.modulus.unwrap_or(1.0);
                w.re > 0.0 && w.re < 1.0 && w.im > 0.0 && w.im < h
            }
        }
    }

    /// Characteristic size of the canonical domain.
    pub fn canonical_scale(&self) -> f64 {
        match self.target {
            Target::Disk => 1.0,
            Target::Annulus => self.modulus.unwrap_or(1.0),
            Target::Rectangle => 1.0f64.max(1.0 / self.modulus.unwrap_or(1.0)),
        }
    }

    fn seeds(&self) -> &[(Complex64, Complex64)] {
        self.seeds.get_or_init(|| {
            self.domain
                .interior_lattice(SEED_LATTICE)
                .into_iter()
                .map(|z| (z, self.eval_unchecked(z).0))
                .filter(|(_, w)| w.re.is_finite() && w.im.is_finite())
                .collect()
        })
    }
}

fn finish(
    target: Target,
    domain: &DomainSpec,
    center: Complex64,
    adaptive: crate::laplace::Adaptive,
    opts: &MapOptions,
) -> Result<ConformalMap, MapError> {
    let model = adaptive.model;
    let achieved = model.residual.max_residual;
    let certified = achieved < opts.tol;
    if !certified && !opts.best_effort {
        return Err(MapError::TolUnreachable {
            achieved,
            tol: opts.tol,
            dof: model.dof(),
        });
    }
    let (modulus, offset) = match target {
        Target::Disk => (None, Complex64::new(0.0, 0.0)),
        Target::Annulus => (Some(model.side_constants[0].exp()), Complex64::new(0.0, 0.0)),
        Target::Rectangle => {
            let (c0, c2) = (model.side_constants[0], model.side_constants[1]);
            (Some(1.0 / (c2 - c0)), Complex64::new(0.0, c0))
        }
    };
    let mut map = ConformalMap {
        target,
        domain: domain.clone(),
        center,
        model,
        modulus,
        normalization: None,
        certified,
        offset,
        seeds: OnceLock::new(),
    };
    if target == Target::Disk {
        let (value, derivative) = map.eval_unchecked(center);
        map.normalization = Some(Normalization { value, derivative });
    }
    Ok(map)
}

fn check_tol(tol: f64) -> Result<(), MapError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(MapError::BadTol(tol))
    }
}

fn escalation(opts: &MapOptions) -> Escalation {
    Escalation::new(opts.tol).with_max_dof(opts.max_dof)
}

/// Map onto the unit disk with `f(z₀) = 0`, `f'(z₀) > 0`.
pub fn disk_map(domain: &DomainSpec, center: Option<Complex64>, opts: &MapOptions) -> Result<ConformalMap, MapError> {
    check_tol(opts.tol)?;
    if !domain.is_simply_connected() {
        return Err(MapError::NotSimplyConnected(domain.holes().len()));
    }
    let z0 = center.unwrap_or_else(|| domain.default_center());
    if domain.contains(z0) != Location::Inside {
        return Err(MapError::CenterOutside(z0));
    }
    let problem = BoundaryProblem::dirichlet(move |z| -(z - z0).norm().ln());
    let adaptive = solve_adaptive(domain, Purpose::Disk, z0, &problem, &escalation(opts))?;
    finish(Target::Disk, domain, z0, adaptive, opts)
}

/// Map onto `1 < |w| < R`, positive at the first junction of the hole.
pub fn annulus_map(domain: &DomainSpec, opts: &MapOptions) -> Result<ConformalMap, MapError> {
    check_tol(opts.tol)?;
    if domain.holes().len() != 1 {
        return Err(MapError::WrongConnectivity(domain.holes().len()));
    }
    let problem = BoundaryProblem {
        levels: 1,
        condition: Box::new(|chain, _, _| Condition {
            part: Part::Re,
            target: 0.0,
            level: (chain == 0).then_some(0),
        }),
        fixed: Vec::new(),
        period: Some(1.0),
    };
    let center = domain.hole_center(0);
    let adaptive = solve_adaptive(domain, Purpose::Annulus, center, &problem, &escalation(opts))?;
    finish(Target::Annulus, domain, center, adaptive, opts)
}

/// Map onto `[0,1] × [0, 1/μ]` sending `q0, q1, q2, q3` to `0, 1, 1 + i/μ, i/μ`.
pub fn rectangle_map(domain: &DomainSpec, opts: &MapOptions) -> Result<ConformalMap, MapError> {
    check_tol(opts.tol)?;
    if domain.quad().is_none() {
        return Err(MapError::NoQuadMarking);
    }
    if !domain.is_simply_connected() {
        return Err(MapError::NotSimplyConnected(domain.holes().len()));
    }
    let problem = mixed_problem(domain, MixedProblem::modulus())?;
    let center = domain.default_center();
    let adaptive = solve_adaptive(domain, Purpose::Quad, center, &problem, &escalation(opts))?;
    finish(Target::Rectangle, domain, center, adaptive, opts)
}

/// Dispatches on `target`; `center` only applies to disk maps.
pub fn conformal_map(
    domain: &DomainSpec,
    target: Target,
    center: Option<Complex64>,
    opts: &MapOptions,
) -> Result<ConformalMap, MapError> {
    match target {
        Target::Disk => disk_map(domain, center, opts),
        Target::Annulus => annulus_map(domain, opts),
        Target::Rectangle => rectangle_map(domain, opts),
    }
}

/// `(f(z), f'(z))` for points in the closed domain.
pub fn evaluate_map(map: &ConformalMap, points: &[Complex64]) -> Result<Vec<(Complex64, Complex64)>, MapError> {
    points
        .iter()
        .map(|&z| {
            if map.domain.contains(z) == Location::Outside || !(z.re.is_finite() && z.im.is_finite()) {
                Err(MapError::PointOutsideDomain(z))
            } else {
                Ok(map.eval_unchecked(z))
            }
        })
        .collect()
}

/// `G(z) = log|f(z)|` for a disk map.
pub fn green_function(map: &ConformalMap, z: Complex64) -> Result<f64, MapError> {
    if map.target != Target::Disk {
        return Err(MapError::WrongTarget {
            expected: Target::Disk,
            found: map.target,
        });
    }
    if z == map.center {
        return Err(MapError::EvalAtCenter(z));
    }
    if map.domain.contains(z) == Location::Outside {
        return Err(MapError::PointOutsideDomain(z));
    }
    Ok((z - map.center).norm().ln() + map.model.value(z).re)
}

fn newton(map: &ConformalMap, w: Complex64, mut z: Complex64, tol: f64) -> Option<Complex64> {
    let (mut fz, mut dz) = map.eval_unchecked(z);
    let mut err = (fz - w).norm();
    for _ in 0..NEWTON_ITERATIONS {
        if err <= tol {
            return Some(z);
        }
        if dz.norm() == 0.0 || !dz.re.is_finite() {
            return None;
        }
        let mut step = (fz - w) / dz;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = z - step;
            let (ft, dt) = map.eval_unchecked(trial);
            let e = (ft - w).norm();
            if e < err && e.is_finite() {
                z = trial;
                fz = ft;
                dz = dt;
                err = e;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return (err <= 100.0 * tol).then_some(z);
        }
    }
    (err <= tol).then_some(z)
}

/// Preimages of canonical-domain points.
pub fn invert_map(map: &ConformalMap, targets: &[Complex64]) -> Result<Vec<Complex64>, MapError> {
    let tol = 1e-14 * map.canonical_scale();
    let accept = 1e-10 * map.domain.diameter().min(map.canonical_scale());
    targets
        .iter()
        .map(|&w| {
            if !map.in_canonical(w) {
                return Err(MapError::TargetOutsideCanonical(w));
            }
            let seeds = map.seeds();
            let mut order: Vec<usize> = (0..seeds.len()).collect();
            let key = |i: &usize| (seeds[*i].1 - w).norm();
            // partial selection of the nearest few seeds
            let k = (NEWTON_RESEEDS + 1).min(order.len());
            if k == 0 {
                return Err(MapError::NewtonDiverged(w));
            }
            order.select_nth_unstable_by(k - 1, |a, b| key(a).total_cmp(&key(b)));
            order.truncate(k);
            order.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
            for &i in &order {
                if let Some(z) = newton(map, w, seeds[i].0, tol) {
                    let err = (map.eval_unchecked(z).0 - w).norm();
                    if err < accept && map.domain.contains(z) != Location::Outside {
                        return Ok(z);
                    }
                }
            }
            Err(MapError::NewtonDiverged(w))
        })
        .collect()
}
