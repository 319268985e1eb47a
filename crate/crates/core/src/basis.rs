//! Analytic basis functions whose real parts span the harmonic trial space:
//! scaled monomials, simple poles clustered at corners, and Laurent/log terms
//! about a hole.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{DomainSpec, Location, TAPER};

/// What the basis is for; fixes which term families appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Disk,
    Annulus,
    Quad,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisTerm {
    /// `((z - center) / scale)^power`
    Monomial {
        power: u32,
        center: Complex64,
        scale: f64,
    },
    /// `1 / (z - location)`; `site` indexes the corner or marked vertex.
    Pole {
        location: Complex64,
        site: usize,
        index: usize,
    },
    /// `(scale / (z - center))^power`, `power ≥ 1`
    Laurent {
        power: u32,
        center: Complex64,
        scale: f64,
    },
    /// `log(z - center)` (principal branch)
    Log { center: Complex64 },
    /// `log((z - vertex) / direction)`: branch cut along `-direction` from the
    /// vertex, so a unit interior bisector keeps the cut outside the domain.
    CornerLog {
        vertex: Complex64,
        direction: Complex64,
    },
}

/// Points closer than this to a singularity are rejected by `evaluate_basis`.
pub const SINGULARITY_TOL: f64 = 1e-14;

/// Smallest pole distance from its site, relative to the domain diameter.
pub const MIN_POLE_DISTANCE: f64 = 1e-13;

impl BasisTerm {
    pub fn singularity(&self) -> Option<Complex64> {
        match *self {
            BasisTerm::Monomial { .. } => None,
            BasisTerm::Pole { location, .. } => Some(location),
            BasisTerm::Laurent { center, .. } | BasisTerm::Log { center } => Some(center),
            BasisTerm::CornerLog { vertex, .. } => Some(vertex),
        }
    }

    /// `(φ(z), φ'(z))` without singularity checks.
    #[inline]
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        match *self {
            BasisTerm::Monomial {
                power,
                center,
                scale,
            } => {
                let zeta = (z - center) / scale;
                if power == 0 {
                    (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
                } else {
                    let lower = zeta.powi(power as i32 - 1);
                    (lower * zeta, lower * (power as f64 / scale))
                }
            }
            BasisTerm::Pole { location, .. } => {
                let r = 1.0 / (z - location);
                (r, -r * r)
            }
            BasisTerm::Laurent {
                power,
                center,
                scale,
            } => {
                let d = z - center;
                let v = (scale / d).powi(power as i32);
                (v, -v * (power as f64) / d)
            }
            BasisTerm::Log { center } => {
                let d = z - center;
                (d.ln(), 1.0 / d)
            }
            BasisTerm::CornerLog { vertex, direction } => {
                let d = z - vertex;
                ((d / direction).ln(), 1.0 / d)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisCounts {
    pub monomials: usize,
    pub poles: usize,
    pub laurent: usize,
    pub log: usize,
}

/// Ordered basis: monomials by power, poles by site then index, Laurent
/// powers, then the log term.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub terms: Vec<BasisTerm>,
    /// Expansion center: the interior normalization point for disk and quad
    /// bases, the hole center for annulus bases.
    pub center: Complex64,
    pub purpose: Purpose,
    pub counts: BasisCounts,
    pub degree: usize,
    pub poles_per_corner: usize,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pole locations grouped by site, in term order.
    pub fn poles(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.terms.iter().filter_map(|t| match *t {
            BasisTerm::Pole {
                location,
                site,
                index,
            } => Some((site, index, location)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("{purpose:?} basis needs {expected} hole(s), domain has {found}")]
    PurposeMismatch {
        purpose: Purpose,
        expected: usize,
        found: usize,
    },
    #[error("expansion center ({}, {}) is not inside the domain", .0.re, .0.im)]
    CenterOutside(Complex64),
    #[error("evaluation point ({}, {}) is at a basis singularity", .0.re, .0.im)]
    EvalAtSingularity(Complex64),
    #[error("domain has no quadrilateral marks")]
    NoQuadMarking,
}

/// A boundary point that receives a cluster of poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSite {
    pub location: Complex64,
    /// Unit vector pointing out of the domain along the angle bisector.
    pub exterior: Complex64,
    /// Largest pole distance: the shorter of the two adjacent arcs.
    pub scale: f64,
}

/// Corners, plus marked quadrilateral vertices when `purpose` is `Quad`.
pub fn pole_sites(domain: &DomainSpec, purpose: Purpose) -> Vec<PoleSite> {
    let mut sites: Vec<PoleSite> = domain
        .corners()
        .iter()
        .map(|k| {
            let chain = domain.chain(k.chain);
            PoleSite {
                location: k.location,
                exterior: -k.bisector,
                scale: chain.arcs[k.incoming].length().min(chain.arcs[k.outgoing].length()),
            }
        })
        .collect();
    if purpose == Purpose::Quad {
        if let Some(q) = domain.quad() {
            let outer = domain.outer();
            let n = outer.len();
            for &j in &q {
                if domain.corners().iter().any(|k| k.chain == 0 && k.junction == j) {
                    continue;
                }
                let incoming = &outer.arcs[(j + n - 1) % n];
                let outgoing = &outer.arcs[j];
                sites.push(PoleSite {
                    location: outer.junction(j),
                    exterior: -Complex64::i() * outgoing.tangent(0.0),
                    scale: incoming.length().min(outgoing.length()),
                });
            }
        }
    }
    sites
}

/// Tapered-exponential distances `scale · exp(-TAPER(√N - √j))`, `j = 1..=N`.
pub fn pole_distances(scale: f64, n: usize) -> Vec<f64> {
    let root = (n as f64).sqrt();
    (1..=n)
        .map(|j| scale * (-TAPER * (root - (j as f64).sqrt())).exp())
        .collect()
}

pub fn build_basis(
    domain: &DomainSpec,
    purpose: Purpose,
    degree: usize,
    poles_per_corner: usize,
) -> Result<BasisSet, BasisError> {
    let center = match purpose {
        Purpose::Annulus if domain.holes().len() == 1 => domain.hole_center(0),
        _ => domain.default_center(),
    };
    build_basis_at(domain, purpose, degree, poles_per_corner, center)
}

/// Like [`build_basis`] with an explicit expansion center.
pub fn build_basis_at(
    domain: &DomainSpec,
    purpose: Purpose,
    degree: usize,
    poles_per_corner: usize,
    center: Complex64,
) -> Result<BasisSet, BasisError> {
    let holes = domain.holes().len();
    let expected = if purpose == Purpose::Annulus { 1 } else { 0 };
    if holes != expected {
        return Err(BasisError::PurposeMismatch {
            purpose,
            expected,
            found: holes,
        });
    }
    if purpose == Purpose::Quad && domain.quad().is_none() {
        return Err(BasisError::NoQuadMarking);
    }
    if purpose != Purpose::Annulus && domain.contains(center) != Location::Inside {
        return Err(BasisError::CenterOutside(center));
    }

    let scale = 0.5 * domain.diameter();
    let mut terms: Vec<BasisTerm> = (0..=degree as u32)
        .map(|power| BasisTerm::Monomial {
            power,
            center,
            scale,
        })
        .collect();
    let mut counts = BasisCounts {
        monomials: terms.len(),
        ..Default::default()
    };

    for (site, s) in pole_sites(domain, purpose).iter().enumerate() {
        for (index, delta) in pole_distances(s.scale, poles_per_corner).into_iter().enumerate() {
            // closer poles would round onto the boundary
            let mut d = delta.max(MIN_POLE_DISTANCE * domain.diameter());
            let mut location = s.location + s.exterior * d;
            // a nonconvex neighbourhood can swallow the far end of the ray
            for _ in 0..40 {
                if domain.contains(location) != Location::Inside {
                    break;
                }
                d *= 0.5;
                location = s.location + s.exterior * d;
            }
            terms.push(BasisTerm::Pole {
                location,
                site,
                index,
            });
            counts.poles += 1;
        }
    }

    if purpose == Purpose::Annulus {
        let hole = &domain.holes()[0];
        let inner = hole.distance_to(center);
        for power in 1..=degree.max(1) as u32 {
            terms.push(BasisTerm::Laurent {
                power,
                center,
                scale: inner,
            });
            counts.laurent += 1;
        }
        terms.push(BasisTerm::Log { center });
        counts.log = 1;
    }

    Ok(BasisSet {
        terms,
        center,
        purpose,
        counts,
        degree,
        poles_per_corner,
    })
}

/// Values and derivatives, term-major: entry `(k, j)` is at `k * points + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    pub terms: usize,
    pub points: usize,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
}

impl BasisTable {
    pub fn value(&self, term: usize, point: usize) -> Complex64 {
        self.values[term * self.points + point]
    }

    pub fn derivative(&self, term: usize, point: usize) -> Complex64 {
        self.derivatives[term * self.points + point]
    }
}

pub fn evaluate_basis(basis: &BasisSet, points: &[Complex64]) -> Result<BasisTable, BasisError> {
    for t in &basis.terms {
        if let Some(s) = t.singularity() {
            if let Some(z) = points.iter().find(|z| (**z - s).norm() < SINGULARITY_TOL) {
                return Err(BasisError::EvalAtSingularity(*z));
            }
        }
    }
    let mut values = Vec::with_capacity(basis.len() * points.len());
    let mut derivatives = Vec::with_capacity(basis.len() * points.len());
    for t in &basis.terms {
        for &z in points {
            let (v, d) = t.eval(z);
            values.push(v);
            derivatives.push(d);
        }
    }
    Ok(BasisTable {
        terms: basis.len(),
        points: points.len(),
        values,
        derivatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn smooth_disk_basis_is_monomials() {
        let b = build_basis(&unit_disk(), Purpose::Disk, 3, 0).unwrap();
        assert_eq!(b.len(), 4);
        for (k, t) in b.terms.iter().enumerate() {
            assert!(matches!(t, BasisTerm::Monomial { power, scale, .. } if *power as usize == k && *scale == 1.0));
        }
        // poles requested but there are no corners
        assert_eq!(build_basis(&unit_disk(), Purpose::Disk, 3, 12).unwrap().len(), 4);
    }

    #[test]
    fn square_pole_distances_follow_taper() {
        let d = unit_square();
        let b = build_basis(&d, Purpose::Disk, 4, 12).unwrap();
        assert_eq!(b.counts.poles, 48);
        for (site, corner) in d.corners().iter().enumerate() {
            let dist: Vec<f64> = b
                .poles()
                .filter(|p| p.0 == site)
                .map(|p| (p.2 - corner.location).norm())
                .collect();
            assert_eq!(dist.len(), 12);
            for (j, r) in dist.iter().enumerate() {
                let expect = (-4.0 * (12f64.sqrt() - ((j + 1) as f64).sqrt())).exp();
                assert!((r - expect).abs() <= 1e-12 * expect + 1e-15, "{j}: {r} vs {expect}");
            }
            assert!(dist.windows(2).all(|w| w[1] > w[0]));
            assert!(dist[11] / dist[0] >= 1e3);
        }
    }

    #[test]
    fn poles_lie_outside_including_reentrant_corner() {
        let d = l_shape();
        for purpose in [Purpose::Disk, Purpose::Quad] {
            let b = build_basis(&d, purpose, 4, 16).unwrap();
            for (_, _, p) in b.poles() {
                assert_eq!(d.contains(p), Location::Outside);
            }
        }
    }

    #[test]
    fn quad_vertices_get_poles_at_smooth_points() {
        // half disk marked at both corners and two smooth arc points
        let arcs = vec![
            crate::geometry::Arc::line(c(-1.0, 0.0), c(1.0, 0.0)),
            crate::geometry::Arc::circular(c(1.0, 0.0), c(0.0, 0.0), TAU / 8.0),
            crate::geometry::Arc::circular(
                Complex64::from_polar(1.0, TAU / 8.0),
                c(0.0, 0.0),
                TAU / 4.0,
            ),
            crate::geometry::Arc::circular(
                Complex64::from_polar(1.0, 3.0 * TAU / 8.0),
                c(0.0, 0.0),
                TAU / 8.0,
            ),
        ];
        let d = crate::geometry::build_domain(arcs, vec![], Some([0, 1, 2, 3])).unwrap();
        assert_eq!(d.corners().len(), 2);
        let b = build_basis(&d, Purpose::Quad, 2, 5).unwrap();
        assert_eq!(b.counts.poles, 20);
        let b = build_basis(&d, Purpose::Disk, 2, 5).unwrap();
        assert_eq!(b.counts.poles, 10);
    }

    #[test]
    fn purpose_mismatch() {
        assert!(matches!(
            build_basis(&unit_disk(), Purpose::Annulus, 3, 0),
            Err(BasisError::PurposeMismatch { .. })
        ));
        assert!(matches!(
            build_basis(&concentric_annulus(1.0, 2.0), Purpose::Disk, 3, 0),
            Err(BasisError::PurposeMismatch { .. })
        ));
        assert!(matches!(
            build_basis(&unit_disk(), Purpose::Quad, 3, 0),
            Err(BasisError::NoQuadMarking)
        ));
        assert!(matches!(
            build_basis_at(&unit_disk(), Purpose::Disk, 3, 0, c(3.0, 0.0)),
            Err(BasisError::CenterOutside(_))
        ));
    }

    #[test]
    fn annulus_basis_layout() {
        let b = build_basis(&concentric_annulus(1.0, 2.0), Purpose::Annulus, 5, 0).unwrap();
        assert_eq!(b.counts, BasisCounts { monomials: 6, poles: 0, laurent: 5, log: 1 });
        assert!(matches!(b.terms.last(), Some(BasisTerm::Log { .. })));
    }

    #[test]
    fn simple_values() {
        let mono = BasisTerm::Monomial {
            power: 2,
            center: c(0.0, 0.0),
            scale: 1.0,
        };
        let (v, d) = mono.eval(c(1.0, 1.0));
        assert_eq!((v, d), (c(0.0, 2.0), c(2.0, 2.0)));
        let pole = BasisTerm::Pole {
            location: c(2.0, 0.0),
            site: 0,
            index: 0,
        };
        let (v, d) = pole.eval(c(0.0, 0.0));
        assert_eq!((v, d), (c(-0.5, 0.0), c(-0.25, 0.0)));
    }

    #[test]
    fn singular_point_rejected() {
        let b = build_basis(&unit_square(), Purpose::Disk, 2, 3).unwrap();
        let (_, _, p) = b.poles().next().unwrap();
        assert!(matches!(
            evaluate_basis(&b, &[c(0.5, 0.5), p]),
            Err(BasisError::EvalAtSingularity(_))
        ));
    }

    #[test]
    fn log_term_gains_two_pi_around_outer_boundary() {
        let d = eccentric_annulus(0.3, 0.3);
        let b = build_basis(&d, Purpose::Annulus, 2, 0).unwrap();
        let log = *b.terms.last().unwrap();
        let pts = d.outer().polyline(256);
        let mut total = 0.0;
        for k in 0..pts.len() {
            let a = log.eval(pts[k]).0.im;
            let z = log.eval(pts[(k + 1) % pts.len()]).0.im;
            total += (Complex64::from_polar(1.0, z) / Complex64::from_polar(1.0, a)).arg();
        }
        assert!((total - TAU).abs() < 1e-12);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let d = l_shape();
        let b = build_basis(&d, Purpose::Disk, 10, 8).unwrap();
        let pts = d.interior_lattice(8);
        assert_eq!(evaluate_basis(&b, &pts).unwrap(), evaluate_basis(&b, &pts).unwrap());
    }
}
