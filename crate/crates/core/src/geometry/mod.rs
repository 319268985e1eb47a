//! Planar domains bounded by piecewise-smooth Jordan curves.

mod arc;
mod domain;
pub mod fixtures;
mod io;
mod sampling;

use num_complex::Complex64;
use thiserror::Error;

pub use arc::{segment_distance, trig_frequency, Arc};
pub use domain::{build_domain, corner_list, Chain, Corner, DomainSpec, Location, CORNER_THRESHOLD};
pub use io::{RawArc, RawDomain};
pub use sampling::{
    sample_boundary, sample_with, ArcRange, BoundarySampling, Grading, SamplingPlan, TAPER,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("domain needs at least one arc per chain")]
    NoArcs,
    #[error("non-finite coordinate in arc description")]
    NonFinite,
    #[error("degenerate arc: {0}")]
    DegenerateArc(String),
    #[error("chain {chain} is not closed at junction {junction} (gap {gap:e})")]
    NotClosed { chain: usize, junction: usize, gap: f64 },
    #[error("chain {chain} intersects the boundary near ({}, {})", near.re, near.im)]
    SelfIntersecting { chain: usize, near: Complex64 },
    #[error("bad quadrilateral marking: {0}")]
    BadQuadMarking(String),
    #[error("at most one hole is supported, got {0}")]
    TooManyHoles(usize),
    #[error("hole is not inside the outer boundary")]
    HoleOutside,
    #[error("cusp at junction {junction} of chain {chain}")]
    Cusp { chain: usize, junction: usize },
    #[error("too few boundary points requested")]
    ZeroPoints,
    #[error("invalid domain file: {0}")]
    Parse(String),
}
