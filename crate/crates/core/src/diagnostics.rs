//! Elongation, crowding, resistance and end-hitting probabilities.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::DomainSpec;
use crate::maps::ConformalMap;
use crate::rational::boundary_points;

pub const ELONGATION_DIRECTIONS: usize = 64;
pub const ELONGATION_LATTICE: usize = 64;
/// Relative size of the next term at which the series is cut.
pub const SERIES_CUTOFF: f64 = 1e-16;
pub const SERIES_MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("elongation must be finite and nonnegative, got {0}")]
    NegativeL(f64),
    #[error("modulus must be positive, got {0}")]
    NonpositiveMu(f64),
    #[error("modulus and resistivity must be positive, got {mu} and {rho}")]
    NonpositiveInput { mu: f64, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElongationEstimate {
    #[serde(rename = "L")]
    pub l: f64,
    pub method: &'static str,
}

/// Widest projection over sampled directions divided by twice the largest
/// lattice distance to the boundary.
pub fn elongation_estimate(domain: &DomainSpec) -> ElongationEstimate {
    elongation_with(domain, ELONGATION_DIRECTIONS, ELONGATION_LATTICE)
}

pub fn elongation_with(domain: &DomainSpec, directions: usize, lattice: usize) -> ElongationEstimate {
    let pts = domain.outer().polyline(256);
    let width = (0..directions)
        .map(|k| {
            let dir = Complex64::from_polar(1.0, PI * k as f64 / directions as f64);
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let x = (p * dir.conj()).re;
                (lo.min(x), hi.max(x))
            });
            hi - lo
        })
        .fold(0.0, f64::max);
    let inradius = domain
        .interior_lattice(lattice)
        .into_iter()
        .map(|z| domain.distance_to_boundary(z))
        .fold(0.0, f64::max);
    let l = if inradius > 0.0 { width / (2.0 * inradius) } else { 0.0 };
    ElongationEstimate {
        l,
        method: "width-of-best-strip",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrowdingForecast {
    pub scale: f64,
    pub representable_in_double: bool,
}

/// Distortion `exp(πL)` expected from elongation `L`.
pub fn crowding_forecast(l: f64) -> Result<CrowdingForecast, DiagnosticsError> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(DiagnosticsError::NegativeL(l));
    }
    let scale = (PI * l).exp();
    Ok(CrowdingForecast {
        scale,
        representable_in_double: scale < 1.0 / f64::EPSILON,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityResult {
    pub asymptotic: f64,
    pub series_value: f64,
    pub terms_used: usize,
}

/// Probability that Brownian motion from the center of `(-μ, μ) × (-1, 1)`
/// first hits one of the short ends.
pub fn end_hitting_probability(mu: f64) -> Result<ProbabilityResult, DiagnosticsError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(DiagnosticsError::NonpositiveMu(mu));
    }
    let asymptotic = 8.0 / PI * (-mu * PI / 2.0).exp();
    let term = |j: usize| {
        let k = (2 * j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        // sech x = 2e^{-x} / (1 + e^{-2x}) avoids overflow for large x
        let x = k * PI * mu / 2.0;
        let sech = 2.0 * (-x).exp() / (1.0 + (-2.0 * x).exp());
        sign * 4.0 / (PI * k) * sech
    };
    let mut sum = term(0);
    let mut used = 1;
    while used < SERIES_MAX_TERMS {
        let t = term(used);
        if t.abs() < SERIES_CUTOFF * sum.abs() {
            break;
        }
        sum += t;
        used += 1;
    }
    Ok(ProbabilityResult {
        asymptotic,
        series_value: sum,
        terms_used: used,
    })
}

/// Resistance of a quadrilateral of modulus `μ` cut from a sheet of
/// resistivity `ρ` per square.
pub fn resistance_of_quadrilateral(mu: f64, rho: f64) -> Result<f64, DiagnosticsError> {
    if !(mu > 0.0 && rho > 0.0 && mu.is_finite() && rho.is_finite()) {
        return Err(DiagnosticsError::NonpositiveInput { mu, rho });
    }
    Ok(rho * mu)
}

/// `max |f'| / min |f'|` over `samples` outer-boundary points at distance at
/// least `corner_clearance` from every corner.
pub fn boundary_distortion(map: &ConformalMap, samples: usize, corner_clearance: f64) -> f64 {
    let corners: Vec<Complex64> = map.domain.corners().iter().map(|c| c.location).collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in boundary_points(&map.domain, samples, 0.5) {
        if corners.iter().any(|c| (z - c).norm() < corner_clearance) {
            continue;
        }
        let d = map.eval_unchecked(z).1.norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    hi / lo
}
