use std::ops::Range;

use num_complex::Complex64;

use super::domain::DomainSpec;
use super::GeometryError;

/// Taper exponent shared with the pole clustering in `basis`.
pub const TAPER: f64 = 4.0;

/// Nodes on the boundary of a domain with per-node metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySampling {
    pub nodes: Vec<Complex64>,
    pub tangents: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub corner_distance: Vec<f64>,
    /// Arc parameter of each node.
    pub params: Vec<f64>,
    pub arcs: Vec<ArcRange>,
}

/// The nodes `range` lie on arc `arc` of chain `chain` (0 is the outer chain).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcRange {
    pub chain: usize,
    pub arc: usize,
    pub range: Range<usize>,
}

impl BoundarySampling {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(chain, arc)` of every node, in node order.
    pub fn node_arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for r in &self.arcs {
            out.extend(r.range.clone().map(|_| (r.chain, r.arc)));
        }
        out
    }
}

/// How to place nodes along each arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub per_arc: usize,
    pub cluster: bool,
    /// Density multiplier; values above 1 with `offset` produce verification
    /// grids that interleave the fitting grid of the same `per_arc`.
    pub refine: usize,
    pub offset: bool,
}

impl SamplingPlan {
    pub fn fitting(per_arc: usize, cluster: bool) -> Self {
        SamplingPlan {
            per_arc,
            cluster,
            refine: 1,
            offset: false,
        }
    }

    /// Grid `refine` times denser than `self`, disjoint from it.
    pub fn verification(self, refine: usize) -> Self {
        SamplingPlan {
            refine: refine.max(1),
            offset: true,
            ..self
        }
    }
}

/// Graded map of `[0, 1]` onto itself, exponentially clustered toward 0.
///
/// `A·exp(-c(1 - √u))` with `c = TAPER·√n` up to `u = 1/2`, continued linearly
/// with matching slope so that `G(1) = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Grading {
    c: f64,
    scale: f64,
}

const GRADING_KNEE: f64 = 0.5;

impl Grading {
    pub fn new(n: usize) -> Self {
        let c = TAPER * (n.max(1) as f64).sqrt();
        let e = (-c * (1.0 - GRADING_KNEE.sqrt())).exp();
        let scale = 1.0 / (e * (1.0 + c * (1.0 - GRADING_KNEE) / (2.0 * GRADING_KNEE.sqrt())));
        Grading { c, scale }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let e = |u: f64| (-self.c * (1.0 - u.sqrt())).exp();
        if u <= GRADING_KNEE {
            self.scale * e(u)
        } else {
            let ek = e(GRADING_KNEE);
            let slope = ek * self.c / (2.0 * GRADING_KNEE.sqrt());
            self.scale * (ek + slope * (u - GRADING_KNEE))
        }
    }
}

/// Parameters for one arc. A node at `s = 0` is emitted only when the start is
/// not a corner; `s = 1` belongs to the next arc.
pub(crate) fn arc_params(
    plan: &SamplingPlan,
    corner_start: bool,
    corner_end: bool,
) -> Vec<f64> {
    let m = plan.per_arc;
    let r = plan.refine;
    if !plan.cluster || (!corner_start && !corner_end) {
        let total = m * r;
        let shift = if plan.offset || corner_start { 0.5 } else { 0.0 };
        return (0..total).map(|j| (j as f64 + shift) / total as f64).collect();
    }
    let graded = |n: usize, len: f64| -> Vec<f64> {
        let g = Grading::new(n);
        if plan.offset {
            let total = n * r;
            (1..=total)
                .map(|j| len * g.eval((j as f64 - 0.5) / total as f64))
                .collect()
        } else {
            (1..=n).map(|j| len * g.eval(j as f64 / n as f64)).collect()
        }
    };
    match (corner_start, corner_end) {
        (true, false) => {
            let mut s = graded(m, 1.0);
            if !plan.offset {
                s.pop();
            }
            s
        }
        (false, true) => {
            let mut s: Vec<f64> = graded(m, 1.0).into_iter().map(|x| 1.0 - x).collect();
            s.reverse();
            if !plan.offset {
                s.pop();
                s.insert(0, 0.0);
            }
            s
        }
        _ => {
            let n = m.div_ceil(2).max(1);
            let left = graded(n, 0.5);
            let mut right: Vec<f64> = graded(n, 0.5).into_iter().map(|x| 1.0 - x).collect();
            right.reverse();
            if !plan.offset {
                // the midpoint is already in `left`
                right.remove(0);
            }
            left.into_iter().chain(right).collect()
        }
    }
}

/// Samples every arc of every chain.
pub fn sample_boundary(
    domain: &DomainSpec,
    points_per_arc: usize,
    cluster: bool,
) -> Result<BoundarySampling, GeometryError> {
    sample_with(domain, &SamplingPlan::fitting(points_per_arc, cluster))
}

pub fn sample_with(domain: &DomainSpec, plan: &SamplingPlan) -> Result<BoundarySampling, GeometryError> {
    let arc_count: usize = domain.chains().map(|c| c.len()).sum();
    if plan.per_arc == 0 || plan.per_arc * arc_count < 4 {
        return Err(GeometryError::ZeroPoints);
    }
    let corners = domain.corners();
    let is_corner =
        |chain: usize, junction: usize| corners.iter().any(|k| k.chain == chain && k.junction == junction);

    let mut out = BoundarySampling {
        nodes: Vec::new(),
        tangents: Vec::new(),
        weights: Vec::new(),
        corner_distance: Vec::new(),
        params: Vec::new(),
        arcs: Vec::new(),
    };
    for (ci, chain) in domain.chains().enumerate() {
        let n = chain.len();
        for (ai, arc) in chain.arcs.iter().enumerate() {
            let params = arc_params(plan, is_corner(ci, ai), is_corner(ci, (ai + 1) % n));
            let start = out.nodes.len();
            for (j, &s) in params.iter().enumerate() {
                let left = if j == 0 { 0.0 } else { 0.5 * (params[j - 1] + s) };
                let right = if j + 1 == params.len() {
                    1.0
                } else {
                    0.5 * (s + params[j + 1])
                };
                let z = arc.point(s);
                let d = arc.derivative(s);
                out.nodes.push(z);
                out.tangents.push(d / d.norm());
                out.weights.push(d.norm() * (right - left));
                out.corner_distance.push(
                    corners
                        .iter()
                        .map(|k| (k.location - z).norm())
                        .fold(f64::INFINITY, f64::min),
                );
                out.params.push(s);
            }
            out.arcs.push(ArcRange {
                chain: ci,
                arc: ai,
                range: start..out.nodes.len(),
            });
        }
    }
    Ok(out)
}
