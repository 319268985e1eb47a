//! Least-squares Laplace solvers over a [`BasisSet`].
//!
//! The unknown is an analytic function `g = Σ a_k φ_k`; boundary conditions are
//! imposed on `Re g` (Dirichlet) or on `Im g` (constant stream function on
//! insulated sides), so the harmonic conjugate is part of the solution.

use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

use crate::basis::{build_basis_at, BasisError, BasisSet, BasisTerm, Purpose};
use crate::geometry::{sample_with, DomainSpec, GeometryError, SamplingPlan};
use crate::linalg::lstsq_truncated;

/// Singular values below this fraction of the largest are discarded.
pub const TRUNCATION: f64 = 1e-14;
/// Fitting nodes per real unknown.
pub const OVERSAMPLING: usize = 3;
/// Verification grids are this many times denser than the fitting grid.
pub const VERIFY_REFINE: usize = 4;
/// Weight of the annulus period row relative to a boundary row.
pub const PERIOD_WEIGHT: f64 = 1e3;
/// Escalation stops after this many levels without a `STALL_FACTOR` gain.
pub const STALL_LEVELS: usize = 2;
pub const STALL_FACTOR: f64 = 0.5;
/// Default budget of real degrees of freedom for adaptive solves.
pub const DEFAULT_MAX_DOF: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaplaceError {
    #[error("{nodes} boundary nodes for {unknowns} real unknowns (need {OVERSAMPLING}x)")]
    Underdetermined { nodes: usize, unknowns: usize },
    #[error("least-squares system has no usable columns")]
    RankCollapse,
    #[error("domain has no quadrilateral marks")]
    NoQuadMarking,
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

/// `part(g)(z) - λ_level = target` at a boundary node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub part: Part,
    pub target: f64,
    pub level: Option<usize>,
}

impl Condition {
    pub fn dirichlet(target: f64) -> Self {
        Condition {
            part: Part::Re,
            target,
            level: None,
        }
    }
}

/// Boundary conditions for one solve.
pub struct BoundaryProblem<'a> {
    /// Number of extra real unknowns (`λ` levels).
    pub levels: usize,
    /// Condition at node `z` on arc `arc` of chain `chain`.
    pub condition: Box<dyn Fn(usize, usize, Complex64) -> Condition + Sync + 'a>,
    /// Known terms added to `g` and not fitted.
    pub fixed: Vec<(BasisTerm, Complex64)>,
    /// Annulus problems pin the real log coefficient to this value.
    pub period: Option<f64>,
}

impl<'a> BoundaryProblem<'a> {
    /// `Re g = h` on the whole boundary.
    pub fn dirichlet(h: impl Fn(Complex64) -> f64 + Sync + 'a) -> Self {
        BoundaryProblem {
            levels: 0,
            condition: Box::new(move |_, _, z| Condition::dirichlet(h(z))),
            fixed: Vec::new(),
            period: None,
        }
    }
}

/// Accuracy certificate from a grid independent of the fitting nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub max_residual: f64,
    pub rms_residual: f64,
    pub verification_grid_size: usize,
    pub fitted_dof: usize,
}

/// `g = Σ a_k φ_k + fixed terms`, with `u = Re g`, `v = Im g`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticModel {
    pub basis: BasisSet,
    pub coefficients: Vec<Complex64>,
    pub fixed: Vec<(BasisTerm, Complex64)>,
    /// Fitted `λ` levels (side constants of insulated sides, or the outer
    /// level of an annulus problem).
    pub side_constants: Vec<f64>,
    pub residual: ErrorReport,
    /// Point where `Im g = 0` is imposed.
    pub anchor: Complex64,
    /// Sampling used for the fit; verification grids derive from it.
    pub plan: SamplingPlan,
}

impl AnalyticModel {
    /// Model with all coefficients zero.
    pub fn zero(basis: BasisSet, plan: SamplingPlan) -> Self {
        let n = basis.len();
        let anchor = basis.center;
        AnalyticModel {
            basis,
            coefficients: vec![Complex64::new(0.0, 0.0); n],
            fixed: Vec::new(),
            side_constants: Vec::new(),
            residual: ErrorReport::default(),
            anchor,
            plan,
        }
    }

    /// `(g(z), g'(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        for (t, a) in self.basis.terms.iter().zip(&self.coefficients) {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (v, d) = t.eval(z);
            g += a * v;
            dg += a * d;
        }
        for (t, a) in &self.fixed {
            let (v, d) = t.eval(z);
            g += a * v;
            dg += a * d;
        }
        (g, dg)
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.eval(z).0
    }

    pub fn u(&self, z: Complex64) -> f64 {
        self.value(z).re
    }

    pub fn v(&self, z: Complex64) -> f64 {
        self.value(z).im
    }

    /// Real unknowns of the fit.
    pub fn dof(&self) -> usize {
        real_columns(&self.basis).len() + self.side_constants.len()
    }
}

/// Real unknowns per term: `(term, is_imaginary_part)`. The constant
/// monomial and the log term carry real coefficients only.
fn real_columns(basis: &BasisSet) -> Vec<(usize, bool)> {
    let mut cols = Vec::new();
    for (k, t) in basis.terms.iter().enumerate() {
        cols.push((k, false));
        let real_only = matches!(t, BasisTerm::Monomial { power: 0, .. } | BasisTerm::Log { .. });
        if !real_only {
            cols.push((k, true));
        }
    }
    cols
}

/// Fits `problem` on `domain` with the given basis and fitting plan.
pub fn solve_with(
    domain: &DomainSpec,
    problem: &BoundaryProblem,
    basis: &BasisSet,
    plan: &SamplingPlan,
) -> Result<AnalyticModel, LaplaceError> {
    let sampling = sample_with(domain, plan)?;
    let columns = real_columns(basis);
    let unknowns = columns.len() + problem.levels;
    if sampling.len() < OVERSAMPLING * unknowns {
        return Err(LaplaceError::Underdetermined {
            nodes: sampling.len(),
            unknowns,
        });
    }
    let node_arcs = sampling.node_arcs();
    let conditions: Vec<Condition> = sampling
        .nodes
        .iter()
        .zip(&node_arcs)
        .map(|(z, (c, a))| (problem.condition)(*c, *a, *z))
        .collect();

    let m = sampling.len();
    let extra_row = problem.period.is_some();
    let rows = m + usize::from(extra_row);
    let mut a = Mat::<f64>::zeros(rows, unknowns);
    let mut b = vec![0.0; rows];
    let log_index = basis
        .terms
        .iter()
        .position(|t| matches!(t, BasisTerm::Log { .. }));

    let values: Vec<Vec<Complex64>> = basis
        .terms
        .iter()
        .map(|t| sampling.nodes.iter().map(|z| t.eval(*z).0).collect())
        .collect();
    for (col, &(k, imag)) in columns.iter().enumerate() {
        for (j, cond) in conditions.iter().enumerate() {
            let phi = values[k][j];
            // a = x + iy: Re(aφ) = xφr - yφi, Im(aφ) = xφi + yφr
            a[(j, col)] = match (cond.part, imag) {
                (Part::Re, false) => phi.re,
                (Part::Re, true) => -phi.im,
                (Part::Im, false) => phi.im,
                (Part::Im, true) => phi.re,
            };
        }
    }
    for (j, cond) in conditions.iter().enumerate() {
        if let Some(l) = cond.level {
            a[(j, columns.len() + l)] = -1.0;
        }
        let fixed: Complex64 = problem.fixed.iter().map(|(t, c)| c * t.eval(sampling.nodes[j]).0).sum();
        b[j] = cond.target - cond.part.of(fixed);
    }
    if let Some(period) = problem.period {
        let k = log_index.expect("period condition needs a log term");
        let col = columns.iter().position(|&c| c == (k, false)).unwrap();
        a[(m, col)] = PERIOD_WEIGHT;
        b[m] = PERIOD_WEIGHT * period;
    }

    let sol = lstsq_truncated(&a, &b, TRUNCATION).ok_or(LaplaceError::RankCollapse)?;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (&(k, imag), x) in columns.iter().zip(&sol.x) {
        if imag {
            coefficients[k].im = *x;
        } else {
            coefficients[k].re = *x;
        }
    }
    let mut side_constants = sol.x[columns.len()..].to_vec();

    let anchor = match basis.purpose {
        Purpose::Annulus => domain.holes()[0].junction(0),
        _ => basis.center,
    };
    let mut model = AnalyticModel {
        basis: basis.clone(),
        coefficients,
        fixed: problem.fixed.clone(),
        side_constants: Vec::new(),
        residual: ErrorReport::default(),
        anchor,
        plan: *plan,
    };
    // Im g(anchor) = 0 through the imaginary part of the constant term.
    let shift = -model.value(anchor).im;
    if let Some(k) = basis
        .terms
        .iter()
        .position(|t| matches!(t, BasisTerm::Monomial { power: 0, .. }))
    {
        model.coefficients[k].im += shift;
        let mut level_parts = vec![None; problem.levels];
        for c in &conditions {
            if let Some(l) = c.level {
                level_parts[l] = Some(c.part);
            }
        }
        for (l, part) in level_parts.iter().enumerate() {
            if *part == Some(Part::Im) {
                side_constants[l] += shift;
            }
        }
    }
    model.side_constants = side_constants;
    model.residual = verify_problem(&model, domain, problem, VERIFY_REFINE)?;
    Ok(model)
}

/// Residuals of `model` against `problem` on a grid `refine` times denser
/// than the fitting grid.
pub fn verify_problem(
    model: &AnalyticModel,
    domain: &DomainSpec,
    problem: &BoundaryProblem,
    refine: usize,
) -> Result<ErrorReport, LaplaceError> {
    let grid = sample_with(domain, &model.plan.verification(refine))?;
    let arcs = grid.node_arcs();
    let mut max: f64 = 0.0;
    let mut sum2 = 0.0;
    for (z, (c, a)) in grid.nodes.iter().zip(&arcs) {
        let cond = (problem.condition)(*c, *a, *z);
        let level = cond.level.map_or(0.0, |l| model.side_constants.get(l).copied().unwrap_or(0.0));
        let r = (cond.part.of(model.value(*z)) - level - cond.target).abs();
        max = max.max(r);
        sum2 += r * r;
    }
    Ok(ErrorReport {
        max_residual: max,
        rms_residual: (sum2 / grid.len() as f64).sqrt(),
        verification_grid_size: grid.len(),
        fitted_dof: model.dof(),
    })
}

/// Certificate for Dirichlet data `h` on a grid four times denser than the fit.
pub fn verify_residual(
    model: &AnalyticModel,
    domain: &DomainSpec,
    h: impl Fn(Complex64) -> f64 + Sync,
) -> Result<ErrorReport, LaplaceError> {
    verify_problem(model, domain, &BoundaryProblem::dirichlet(h), VERIFY_REFINE)
}

/// `Re g = h` on the boundary with a given basis and fitting sampling.
///
/// Annulus bases add the unknown outer level `λ` (`Re g = h + λ` on the outer
/// chain) and pin the log coefficient to 1, making `exp(g)` single-valued.
pub fn solve_dirichlet(
    domain: &DomainSpec,
    h: impl Fn(Complex64) -> f64 + Sync,
    basis: &BasisSet,
    plan: &SamplingPlan,
) -> Result<AnalyticModel, LaplaceError> {
    if basis.purpose == Purpose::Annulus {
        let problem = BoundaryProblem {
            levels: 1,
            condition: Box::new(move |chain, _, z| Condition {
                part: Part::Re,
                target: h(z),
                level: (chain == 0).then_some(0),
            }),
            fixed: Vec::new(),
            period: Some(1.0),
        };
        solve_with(domain, &problem, basis, plan)
    } else {
        solve_with(domain, &BoundaryProblem::dirichlet(h), basis, plan)
    }
}

/// Condition on one side of a quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideCondition {
    Dirichlet(f64),
    /// Zero normal flux: `Im g` equals an unknown constant.
    Insulated,
}

/// Conditions on sides `q0→q1, q1→q2, q2→q3, q3→q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedProblem(pub [SideCondition; 4]);

impl MixedProblem {
    /// Potential 0 on `q3→q0`, 1 on `q1→q2`, the other two sides insulated.
    pub fn modulus() -> Self {
        MixedProblem([
            SideCondition::Insulated,
            SideCondition::Dirichlet(1.0),
            SideCondition::Insulated,
            SideCondition::Dirichlet(0.0),
        ])
    }

    fn level_of(&self, side: usize) -> Option<usize> {
        match self.0[side] {
            SideCondition::Insulated => {
                Some(self.0[..side].iter().filter(|c| **c == SideCondition::Insulated).count())
            }
            SideCondition::Dirichlet(_) => None,
        }
    }

    fn levels(&self) -> usize {
        self.0.iter().filter(|c| **c == SideCondition::Insulated).count()
    }
}

/// Known `arg`-type terms that absorb jumps of Dirichlet data at marked
/// vertices between two Dirichlet sides.
fn jump_terms(domain: &DomainSpec, problem: &MixedProblem) -> Vec<(BasisTerm, Complex64)> {
    let (Some(q), outer) = (domain.quad(), domain.outer()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for k in 0..4 {
        let incoming = problem.0[(k + 3) % 4];
        let outgoing = problem.0[k];
        let (SideCondition::Dirichlet(a), SideCondition::Dirichlet(b)) = (incoming, outgoing) else {
            continue;
        };
        if a == b {
            continue;
        }
        let (angle, bisector) = domain
            .corners()
            .iter()
            .find(|c| c.chain == 0 && c.junction == q[k])
            .map(|c| (c.interior_angle, c.bisector))
            .unwrap_or_else(|| (std::f64::consts::PI, Complex64::i() * outer.arcs[q[k]].tangent(0.0)));
        // Re(-iκ log ζ) = κ arg ζ runs from -κα/2 (outgoing side) to κα/2.
        let kappa = (a - b) / angle;
        out.push((
            BasisTerm::CornerLog {
                vertex: outer.junction(q[k]),
                direction: bisector,
            },
            Complex64::new(0.0, -kappa),
        ));
    }
    out
}

/// Builds the boundary problem for a quadrilateral.
pub fn mixed_problem<'a>(domain: &'a DomainSpec, problem: MixedProblem) -> Result<BoundaryProblem<'a>, LaplaceError> {
    if domain.quad().is_none() {
        return Err(LaplaceError::NoQuadMarking);
    }
    Ok(BoundaryProblem {
        levels: problem.levels(),
        condition: Box::new(move |_, arc, _| {
            let side = domain.quad_side(arc).expect("outer arc lies on a side");
            match problem.0[side] {
                SideCondition::Dirichlet(v) => Condition::dirichlet(v),
                SideCondition::Insulated => Condition {
                    part: Part::Im,
                    target: 0.0,
                    level: problem.level_of(side),
                },
            }
        }),
        fixed: jump_terms(domain, &problem),
        period: None,
    })
}

/// Mixed Dirichlet/insulated problem on a quadrilateral with a given basis.
pub fn solve_mixed_with(
    domain: &DomainSpec,
    problem: MixedProblem,
    basis: &BasisSet,
    plan: &SamplingPlan,
) -> Result<AnalyticModel, LaplaceError> {
    let bp = mixed_problem(domain, problem)?;
    solve_with(domain, &bp, basis, plan)
}

/// Degree-escalation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escalation {
    pub tol: f64,
    pub max_dof: usize,
    pub start_degree: usize,
    pub start_poles: usize,
    pub max_levels: usize,
}

impl Escalation {
    pub fn new(tol: f64) -> Self {
        Escalation {
            tol,
            max_dof: DEFAULT_MAX_DOF,
            start_degree: 8,
            start_poles: 6,
            max_levels: 24,
        }
    }

    pub fn with_max_dof(self, max_dof: usize) -> Self {
        Escalation { max_dof, ..self }
    }

    /// `(degree, poles per corner)` at escalation level `level`; both double
    /// every two levels.
    pub fn schedule(&self, level: usize) -> (usize, usize) {
        let f = 2f64.powf(level as f64 / 2.0);
        (
            (self.start_degree as f64 * f).round() as usize,
            (self.start_poles as f64 * f).round() as usize,
        )
    }
}

/// Result of an adaptive solve.
#[derive(Debug, Clone)]
pub struct Adaptive {
    pub model: AnalyticModel,
    pub converged: bool,
    pub levels_tried: usize,
}

/// Fitting nodes per arc for a basis: enough rows overall, and at least as
/// many per half-arc as poles per corner so that sampling resolves the
/// smallest pole distance.
pub fn points_per_arc(domain: &DomainSpec, basis: &BasisSet, levels: usize) -> usize {
    let arcs: usize = domain.chains().map(|c| c.len()).sum();
    let unknowns = real_columns(basis).len() + levels;
    let by_rows = (OVERSAMPLING * unknowns + 4 * arcs).div_ceil(arcs);
    let by_poles = if domain.corners().is_empty() && basis.purpose != Purpose::Quad {
        0
    } else {
        2 * basis.poles_per_corner + 8
    };
    by_rows.max(by_poles).max(8)
}

/// Escalates degree and poles until the certified residual is below `tol`
/// or the degree-of-freedom budget is exhausted; returns the best model.
pub fn solve_adaptive(
    domain: &DomainSpec,
    purpose: Purpose,
    center: Complex64,
    problem: &BoundaryProblem,
    esc: &Escalation,
) -> Result<Adaptive, LaplaceError> {
    let mut best: Option<AnalyticModel> = None;
    let mut tried = 0;
    let mut stalled = 0;
    for level in 0..esc.max_levels {
        let (degree, poles) = esc.schedule(level);
        let basis = build_basis_at(domain, purpose, degree, poles, center)?;
        if real_columns(&basis).len() + problem.levels > esc.max_dof && best.is_some() {
            break;
        }
        let plan = SamplingPlan::fitting(points_per_arc(domain, &basis, problem.levels), true);
        let model = match solve_with(domain, problem, &basis, &plan) {
            Ok(m) => m,
            Err(e) if best.is_none() => return Err(e),
            Err(_) => break,
        };
        tried += 1;
        let better = best
            .as_ref()
            .is_none_or(|b| model.residual.max_residual < b.residual.max_residual);
        let done = model.residual.max_residual < esc.tol;
        let progress = best
            .as_ref()
            .is_none_or(|b| model.residual.max_residual < STALL_FACTOR * b.residual.max_residual);
        stalled = if progress { 0 } else { stalled + 1 };
        if better {
            best = Some(model);
        }
        if done {
            return Ok(Adaptive {
                model: best.unwrap(),
                converged: true,
                levels_tried: tried,
            });
        }
        if stalled >= STALL_LEVELS {
            break;
        }
    }
    Ok(Adaptive {
        model: best.ok_or(LaplaceError::RankCollapse)?,
        converged: false,
        levels_tried: tried,
    })
}

/// Adaptive mixed solve on a quadrilateral.
pub fn solve_mixed(domain: &DomainSpec, problem: MixedProblem, esc: &Escalation) -> Result<Adaptive, LaplaceError> {
    let bp = mixed_problem(domain, problem)?;
    solve_adaptive(domain, Purpose::Quad, domain.default_center(), &bp, esc)
}

/// Conformal modulus from a model of [`MixedProblem::modulus`]: the
/// insulated-side stream constants `c₁ < c₂` give `μ = 1 / (c₂ - c₁)`.
pub fn quad_modulus(model: &AnalyticModel) -> f64 {
    1.0 / (model.side_constants[1] - model.side_constants[0])
}
