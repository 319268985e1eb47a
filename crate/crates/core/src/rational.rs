//! Boundary correspondence and barycentric rational compression of maps.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DomainSpec, Grading, Location};
use crate::linalg::{eigenvalues, smallest_right_singular};
use crate::maps::{ConformalMap, Target};

/// Strength of the corner grading used for correspondence tables.
pub const TABLE_GRADING: usize = 25;
/// Support-point removals allowed per greedy step when cleaning poles.
const MAX_POLE_REPAIRS: usize = 8;
/// Trial shifts for the pole computation.
const SHIFT_CANDIDATES: usize = 7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalError {
    #[error("at least 4 samples are needed, got {0}")]
    TooFewSamples(usize),
    #[error("correspondences exist only for disk and annulus maps")]
    UnsupportedTarget(Target),
    #[error("tolerance must be positive, got {0}")]
    BadTol(f64),
    #[error("degree {} reached with error {:.3e}", .best.degree(), .best.accuracy)]
    DegreeExhausted { best: Box<RationalApproximant> },
    #[error("invalid approximant: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Domain boundary to canonical boundary.
    Forward,
    /// Canonical boundary back to the domain.
    Inverse,
}

/// Closed set on which an approximant must be pole-free.
#[derive(Debug, Clone, PartialEq)]
pub enum PoleRegion {
    Domain(Box<DomainSpec>),
    Disk,
    Annulus(f64),
    Unchecked,
}

impl PoleRegion {
    pub fn contains(&self, p: Complex64) -> bool {
        if !(p.re.is_finite() && p.im.is_finite()) {
            return false;
        }
        match self {
            PoleRegion::Domain(d) => d.contains(p) != Location::Outside,
            PoleRegion::Disk => p.norm() <= 1.0,
            PoleRegion::Annulus(r) => (1.0..=*r).contains(&p.norm()),
            PoleRegion::Unchecked => false,
        }
    }
}

/// Pairs `(z_j, w_j = f(z_j))` along the outer boundary, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceTable {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub target: Target,
    /// Pole-free region for forward fits.
    pub domain: DomainSpec,
    /// Pole-free region for inverse fits.
    pub canonical: PoleRegion,
}

impl CorrespondenceTable {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Unwrapped increase of `arg w` over one traversal, closing the loop.
    pub fn total_argument(&self) -> f64 {
        let n = self.w.len();
        (0..n).map(|j| (self.w[(j + 1) % n] / self.w[j]).arg()).sum()
    }

    /// Whether `arg w` increases strictly from each entry to the next.
    pub fn is_monotone(&self) -> bool {
        let n = self.w.len();
        (0..n).all(|j| (self.w[(j + 1) % n] / self.w[j]).arg() > 0.0)
    }

    /// Like [`is_monotone`](Self::is_monotone), but steps back by at most
    /// `slack` radians are accepted. Corner-graded samples can be closer in
    /// the image than the map error.
    pub fn is_monotone_within(&self, slack: f64) -> bool {
        let n = self.w.len();
        (0..n).all(|j| (self.w[(j + 1) % n] / self.w[j]).arg() > -slack)
    }

    /// `(points, values, region)` for fitting in `direction`.
    pub fn oriented(&self, direction: Direction) -> (&[Complex64], &[Complex64], PoleRegion) {
        match direction {
            Direction::Forward => (&self.z, &self.w, PoleRegion::Domain(Box::new(self.domain.clone()))),
            Direction::Inverse => (&self.w, &self.z, self.canonical.clone()),
        }
    }
}

/// Arc parameters: equispaced on smooth arcs, graded toward corners otherwise.
/// `shift` in `[0, 1)` offsets the grid; shifted grids avoid corners and
/// interleave the unshifted one.
pub fn correspondence_params(count: usize, corner_start: bool, corner_end: bool, shift: f64) -> Vec<f64> {
    let uniform = |j: usize| (j as f64 + shift) / count as f64;
    if !corner_start && !corner_end {
        return (0..count).map(uniform).collect();
    }
    let g = Grading::new(TABLE_GRADING);
    let shift = if shift == 0.0 { 0.5 } else { shift };
    (0..count)
        .map(|j| {
            let u = (j as f64 + shift) / count as f64;
            match (corner_start, corner_end) {
                (true, false) => g.eval(u),
                (false, true) => 1.0 - g.eval(1.0 - u),
                _ if u <= 0.5 => 0.5 * g.eval(2.0 * u),
                _ => 1.0 - 0.5 * g.eval(2.0 - 2.0 * u),
            }
        })
        .collect()
}

/// `m` points on the outer boundary, split evenly between arcs.
pub fn boundary_points(domain: &DomainSpec, m: usize, shift: f64) -> Vec<Complex64> {
    let outer = domain.outer();
    let n = outer.len();
    let is_corner = |j: usize| domain.corners().iter().any(|c| c.chain == 0 && c.junction == j % n);
    let mut pts = Vec::with_capacity(m);
    for (k, arc) in outer.arcs.iter().enumerate() {
        let count = m / n + usize::from(k < m % n);
        pts.extend(
            correspondence_params(count, is_corner(k), is_corner(k + 1), shift)
                .into_iter()
                .map(|s| arc.point(s)),
        );
    }
    pts
}

pub fn boundary_correspondence(map: &ConformalMap, m: usize) -> Result<CorrespondenceTable, RationalError> {
    if m < 4 {
        return Err(RationalError::TooFewSamples(m));
    }
    let canonical = match map.target {
        Target::Disk => PoleRegion::Disk,
        Target::Annulus => PoleRegion::Annulus(map.modulus.unwrap_or(1.0)),
        t => return Err(RationalError::UnsupportedTarget(t)),
    };
    let z = boundary_points(&map.domain, m, 0.0);
    let w = z.iter().map(|&z| map.eval_unchecked(z).0).collect();
    Ok(CorrespondenceTable {
        z,
        w,
        target: map.target,
        domain: map.domain.clone(),
        canonical,
    })
}

/// `r(z) = Σ w_j f_j / (z - z_j) / Σ w_j / (z - z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalApproximant {
    pub support: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub direction: Direction,
    /// Maximum error over the fitting table.
    pub accuracy: f64,
    /// Best error after each greedy step; nonincreasing.
    pub history: Vec<f64>,
}

impl RationalApproximant {
    pub fn degree(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((s, f), w) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let d = z - s;
            if d.re == 0.0 && d.im == 0.0 {
                return *f;
            }
            let c = w / d;
            num += c * f;
            den += c;
        }
        num / den
    }

    /// Zeros of the denominator `Σ w_j / (z - z_j)`.
    pub fn poles(&self) -> Vec<Complex64> {
        poles_of(&self.support, &self.weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawApproximant::from(self)).expect("approximant serializes")
    }

    pub fn from_json(text: &str) -> Result<RationalApproximant, RationalError> {
        let raw: RawApproximant = serde_json::from_str(text).map_err(|e| RationalError::Invalid(e.to_string()))?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawApproximant {
    direction: Direction,
    support: Vec<[f64; 2]>,
    values: Vec<[f64; 2]>,
    weights: Vec<[f64; 2]>,
    accuracy: f64,
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&RationalApproximant> for RawApproximant {
    fn from(r: &RationalApproximant) -> Self {
        RawApproximant {
            direction: r.direction,
            support: r.support.iter().map(pair).collect(),
            values: r.values.iter().map(pair).collect(),
            weights: r.weights.iter().map(pair).collect(),
            accuracy: r.accuracy,
        }
    }
}

impl TryFrom<RawApproximant> for RationalApproximant {
    type Error = RationalError;

    fn try_from(raw: RawApproximant) -> Result<Self, RationalError> {
        let n = raw.support.len();
        if n == 0 || raw.values.len() != n || raw.weights.len() != n {
            return Err(RationalError::Invalid("support, values and weights must have equal nonzero length".into()));
        }
        if raw.weights.iter().all(|w| w[0] == 0.0 && w[1] == 0.0) {
            return Err(RationalError::Invalid("all weights are zero".into()));
        }
        Ok(RationalApproximant {
            support: raw.support.iter().map(unpair).collect(),
            values: raw.values.iter().map(unpair).collect(),
            weights: raw.weights.iter().map(unpair).collect(),
            direction: raw.direction,
            accuracy: raw.accuracy,
            history: Vec::new(),
        })
    }
}

fn poles_of(support: &[Complex64], weights: &[Complex64]) -> Vec<Complex64> {
    let n = support.len();
    if n < 2 {
        return Vec::new();
    }
    // In ζ = 1/(z - σ) the denominator becomes ζ Σ w'_j/(ζ - ζ_j) with
    // ζ_j = 1/(z_j - σ) and w'_j = w_j/(σ - z_j); σ is chosen where the
    // denominator is large so that Σ w'_j stays away from zero.
    let centroid = support.iter().sum::<Complex64>() / n as f64;
    let spread = support.iter().map(|z| (z - centroid).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let sigma = (0..SHIFT_CANDIDATES)
        .map(|k| centroid + 0.37 * spread * Complex64::from_polar(1.0, TAU * k as f64 / SHIFT_CANDIDATES as f64))
        .max_by(|a, b| shift_quality(*a, support, weights).total_cmp(&shift_quality(*b, support, weights)))
        .expect("candidates");
    let zeta: Vec<Complex64> = support.iter().map(|z| 1.0 / (z - sigma)).collect();
    let w: Vec<Complex64> = weights.iter().zip(support).map(|(w, z)| w / (sigma - z)).collect();
    let sum: Complex64 = w.iter().sum();
    let wnorm: f64 = w.iter().map(|w| w.norm()).sum();
    if sum.norm() <= 1e-14 * wnorm {
        return Vec::new();
    }
    // Eigenvalues of P·diag(ζ), P = I - e w'ᵀ / (w'ᵀe), are the roots of
    // Σ w'_j/(ζ - ζ_j) plus a spurious 0 from the left null vector w'.
    let ev = eigenvalues(n, |i, j| {
        let dj = if i == j { zeta[j] } else { Complex64::new(0.0, 0.0) };
        dj - w[j] * zeta[j] / sum
    });
    let spurious = ev
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| k);
    let tiny = 1e-14 * zeta.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ev.iter()
        .enumerate()
        .filter(|(k, e)| Some(*k) != spurious && e.norm() > tiny)
        .map(|(_, e)| sigma + 1.0 / e)
        .collect()
}

/// `|Σ w_j/(σ - z_j)| · min_j |σ - z_j|`: large when σ is far from poles
/// and support points alike.
fn shift_quality(sigma: Complex64, support: &[Complex64], weights: &[Complex64]) -> f64 {
    let q: Complex64 = weights.iter().zip(support).map(|(w, z)| w / (sigma - z)).sum();
    let near = support.iter().map(|z| (sigma - z).norm()).fold(f64::INFINITY, f64::min);
    q.norm() * near
}

/// Greedy state for one fit.
struct Greedy<'a> {
    z: &'a [Complex64],
    f: &'a [Complex64],
    support: Vec<usize>,
    in_support: Vec<bool>,
    excluded: Vec<bool>,
    weights: Vec<Complex64>,
}

impl Greedy<'_> {
    fn solve_weights(&mut self) {
        let rows: Vec<usize> = (0..self.z.len()).filter(|&i| !self.in_support[i]).collect();
        let s = &self.support;
        if s.len() == 1 || rows.is_empty() {
            self.weights = vec![Complex64::new(1.0, 0.0); s.len()];
            return;
        }
        let (z, f) = (self.z, self.f);
        let (v, _) = smallest_right_singular(rows.len().max(s.len()), s.len(), |i, j| {
            if i >= rows.len() {
                return Complex64::new(0.0, 0.0);
            }
            let (r, c) = (rows[i], s[j]);
            (f[r] - f[c]) / (z[r] - z[c])
        });
        self.weights = v;
    }

    fn approximant(&self, direction: Direction, accuracy: f64, history: &[f64]) -> RationalApproximant {
        RationalApproximant {
            support: self.support.iter().map(|&i| self.z[i]).collect(),
            values: self.support.iter().map(|&i| self.f[i]).collect(),
            weights: self.weights.clone(),
            direction,
            accuracy,
            history: history.to_vec(),
        }
    }

    fn errors(&self, r: &RationalApproximant) -> Vec<f64> {
        (0..self.z.len())
            .map(|i| {
                if self.in_support[i] {
                    0.0
                } else {
                    let e = (r.eval(self.z[i]) - self.f[i]).norm();
                    if e.is_nan() {
                        f64::INFINITY
                    } else {
                        e
                    }
                }
            })
            .collect()
    }
}

/// Adaptive barycentric fit: repeatedly adds the table point of largest error
/// as a support point and recomputes weights from the Loewner least-squares
/// problem. Poles inside the certified region trigger removal of the nearest
/// support point, which is then never re-added.
pub fn fit_rational(
    table: &CorrespondenceTable,
    direction: Direction,
    tol: f64,
    max_degree: usize,
) -> Result<RationalApproximant, RationalError> {
    let (z, f, region) = table.oriented(direction);
    fit_points(z, f, &region, direction, tol, max_degree)
}

/// [`fit_rational`] on arbitrary sample data.
pub fn fit_points(
    z: &[Complex64],
    f: &[Complex64],
    region: &PoleRegion,
    direction: Direction,
    tol: f64,
    max_degree: usize,
) -> Result<RationalApproximant, RationalError> {
    if !(tol > 0.0) {
        return Err(RationalError::BadTol(tol));
    }
    if z.len() < 4 {
        return Err(RationalError::TooFewSamples(z.len()));
    }
    let m = z.len();
    let mean = f.iter().sum::<Complex64>() / m as f64;
    let mut g = Greedy {
        z,
        f,
        support: Vec::new(),
        in_support: vec![false; m],
        excluded: vec![false; m],
        weights: Vec::new(),
    };
    let mut history: Vec<f64> = Vec::new();
    let mut best: Option<RationalApproximant> = None;
    let mut errors: Vec<f64> = f.iter().map(|v| (v - mean).norm()).collect();
    loop {
        let next = (0..m)
            .filter(|&i| !g.in_support[i] && !g.excluded[i])
            .max_by(|&a, &b| errors[a].total_cmp(&errors[b]).then(b.cmp(&a)));
        let Some(next) = next else { break };
        if g.support.len() > max_degree {
            break;
        }
        g.support.push(next);
        g.in_support[next] = true;
        g.solve_weights();

        for _ in 0..MAX_POLE_REPAIRS {
            let poles = poles_of(&g.support.iter().map(|&i| z[i]).collect::<Vec<_>>(), &g.weights);
            let Some(bad) = poles.into_iter().find(|p| region.contains(*p)) else {
                break;
            };
            if g.support.len() <= 1 {
                break;
            }
            let k = (0..g.support.len())
                .min_by(|&a, &b| (z[g.support[a]] - bad).norm().total_cmp(&(z[g.support[b]] - bad).norm()))
                .unwrap();
            let idx = g.support.remove(k);
            g.in_support[idx] = false;
            g.excluded[idx] = true;
            g.solve_weights();
        }

        let r = g.approximant(direction, 0.0, &[]);
        errors = g.errors(&r);
        let err = errors.iter().cloned().fold(0.0, f64::max);
        let clean = !r.poles().into_iter().any(|p| region.contains(p));
        let improved = best.as_ref().is_none_or(|b| err < b.accuracy);
        if clean && improved {
            history.push(err);
            best = Some(RationalApproximant { accuracy: err, ..r });
        } else {
            history.push(best.as_ref().map_or(err, |b| b.accuracy));
        }
        if let Some(b) = &best {
            if b.accuracy < tol {
                break;
            }
        }
        if g.support.len() > max_degree {
            break;
        }
    }
    let mut best = best.ok_or_else(|| RationalError::Invalid("no pole-free approximant found".into()))?;
    best.history = history;
    if best.accuracy < tol {
        Ok(best)
    } else {
        Err(RationalError::DegreeExhausted { best: Box::new(best) })
    }
}

/// Evaluates `r` at every point; non-finite inputs give non-finite outputs.
pub fn evaluate_rational(r: &RationalApproximant, points: &[Complex64]) -> Vec<Complex64> {
    points.iter().map(|&z| r.eval(z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::*;
    use crate::maps::{disk_map, MapOptions};
    use std::f64::consts::{PI, TAU};

    fn identity_map() -> ConformalMap {
        disk_map(&unit_disk(), Some(Complex64::new(0.0, 0.0)), &MapOptions::new(1e-12)).unwrap()
    }

    #[test]
    fn identity_table_has_roots_of_unity() {
        let t = boundary_correspondence(&identity_map(), 8).unwrap();
        assert_eq!(t.len(), 8);
        for k in 0..8 {
            let e = Complex64::from_polar(1.0, PI * k as f64 / 4.0);
            assert!(t.z.iter().any(|z| (z - e).norm() < 1e-14));
            let j = t.z.iter().position(|z| (z - e).norm() < 1e-14).unwrap();
            assert!((t.w[j] - e).norm() < 1e-12);
        }
    }

    #[test]
    fn table_winds_once() {
        let t = boundary_correspondence(&identity_map(), 64).unwrap();
        assert!((t.total_argument() - TAU).abs() < 1e-8);
        assert!(t.is_monotone());
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            boundary_correspondence(&identity_map(), 2),
            Err(RationalError::TooFewSamples(2))
        ));
    }

    #[test]
    fn identity_needs_degree_one() {
        let t = boundary_correspondence(&identity_map(), 64).unwrap();
        let r = fit_rational(&t, Direction::Forward, 1e-13, 50).unwrap();
        assert!(r.degree() <= 1, "{}", r.degree());
        assert!(r.accuracy < 1e-13);
        let z = Complex64::new(0.2, -0.4);
        assert!((r.eval(z) - z).norm() < 1e-12);
    }

    #[test]
    fn nonpositive_tolerance() {
        let t = boundary_correspondence(&identity_map(), 16).unwrap();
        assert!(matches!(fit_rational(&t, Direction::Forward, 0.0, 10), Err(RationalError::BadTol(_))));
    }

    #[test]
    fn exact_at_support_points() {
        let z: Vec<Complex64> = (0..40).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 40.0)).collect();
        let f: Vec<Complex64> = z.iter().map(|z| (z * 0.5).exp() / (z - 2.0)).collect();
        let r = fit_points(&z, &f, &PoleRegion::Unchecked, Direction::Forward, 1e-12, 30).unwrap();
        for (s, v) in r.support.iter().zip(&r.values) {
            assert_eq!(r.eval(*s), *v);
        }
    }

    #[test]
    fn poles_of_a_known_function() {
        let z: Vec<Complex64> = (0..60).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 60.0)).collect();
        let p = Complex64::new(1.5, 0.5);
        let f: Vec<Complex64> = z.iter().map(|z| 1.0 / (z - p) + z).collect();
        let r = fit_points(&z, &f, &PoleRegion::Unchecked, Direction::Forward, 1e-13, 20).unwrap();
        let poles = r.poles();
        assert!(poles.iter().any(|q| (q - p).norm() < 1e-8), "{poles:?}");
    }

    #[test]
    fn json_round_trip() {
        let t = boundary_correspondence(&identity_map(), 32).unwrap();
        let r = fit_rational(&t, Direction::Inverse, 1e-10, 10).unwrap();
        let back = RationalApproximant::from_json(&r.to_json()).unwrap();
        assert_eq!(back.support, r.support);
        assert_eq!(back.weights, r.weights);
        assert_eq!(back.direction, Direction::Inverse);
        assert!(RationalApproximant::from_json("{\"direction\": \"forward\"}").is_err());
    }

    #[test]
    fn rectangle_maps_have_no_correspondence() {
        let m = crate::maps::rectangle_map(&unit_square(), &MapOptions::new(1e-8)).unwrap();
        assert!(matches!(
            boundary_correspondence(&m, 16),
            Err(RationalError::UnsupportedTarget(_))
        ));
    }
}
