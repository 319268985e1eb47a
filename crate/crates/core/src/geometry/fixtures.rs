//! Standard domains used throughout the tests, examples and benchmarks.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{build_domain, Arc, DomainSpec};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Closed polygon through `pts` (in order).
pub fn polygon_arcs(pts: &[Complex64]) -> Vec<Arc> {
    (0..pts.len())
        .map(|k| Arc::line(pts[k], pts[(k + 1) % pts.len()]))
        .collect()
}

/// Circle as four quarter arcs, counterclockwise unless `clockwise`.
pub fn circle_arcs(center: Complex64, radius: f64, clockwise: bool) -> Vec<Arc> {
    let sweep = if clockwise { -FRAC_PI_2 } else { FRAC_PI_2 };
    let starts = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    let order: Vec<usize> = if clockwise { vec![0, 3, 2, 1] } else { vec![0, 1, 2, 3] };
    order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let from = center + radius * starts[i];
            let to = center + radius * starts[order[(k + 1) % 4]];
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            }
        })
        .collect()
}

pub fn disk(center: Complex64, radius: f64) -> DomainSpec {
    build_domain(circle_arcs(center, radius, false), vec![], None).expect("valid disk")
}

pub fn unit_disk() -> DomainSpec {
    disk(c(0.0, 0.0), 1.0)
}

/// `[0, width] × [0, height]` with quadrilateral marks at its corners.
pub fn rectangle(width: f64, height: f64) -> DomainSpec {
    let pts = [c(0.0, 0.0), c(width, 0.0), c(width, height), c(0.0, height)];
    build_domain(polygon_arcs(&pts), vec![], Some([0, 1, 2, 3])).expect("valid rectangle")
}

/// `(-half_length, half_length) × (-1, 1)` with marks at its corners; the long
/// sides are `q0→q1` and `q2→q3`.
pub fn centered_rectangle(half_length: f64) -> DomainSpec {
    let (a, b) = (half_length, 1.0);
    let pts = [c(-a, -b), c(a, -b), c(a, b), c(-a, b)];
    build_domain(polygon_arcs(&pts), vec![], Some([0, 1, 2, 3])).expect("valid rectangle")
}

pub fn unit_square() -> DomainSpec {
    rectangle(1.0, 1.0)
}

/// `[0,2]² \ [1,2]²`, marked at `(0,0), (2,0), (2,1), (1,2)`.
pub fn l_shape() -> DomainSpec {
    let pts = [
        c(0.0, 0.0),
        c(2.0, 0.0),
        c(2.0, 1.0),
        c(1.0, 1.0),
        c(1.0, 2.0),
        c(0.0, 2.0),
    ];
    build_domain(polygon_arcs(&pts), vec![], Some([0, 1, 2, 4])).expect("valid L-shape")
}

/// A convex hexagon with unequal sides and angles.
pub fn irregular_hexagon() -> DomainSpec {
    let pts = [
        c(0.0, 0.0),
        c(2.1, -0.4),
        c(3.0, 0.9),
        c(2.3, 2.2),
        c(0.7, 2.5),
        c(-0.6, 1.2),
    ];
    build_domain(polygon_arcs(&pts), vec![], None).expect("valid hexagon")
}

/// Image of the unit disk under `w ↦ w + a w²` (univalent for `|a| ≤ 1/2`).
pub fn polynomial_image(a: f64) -> DomainSpec {
    build_domain(vec![Arc::trig(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(a, 0.0)])], vec![], None)
        .expect("valid polynomial image")
}

/// Ellipse with semi-axes `a` (horizontal) and `b`.
pub fn ellipse(a: f64, b: f64) -> DomainSpec {
    build_domain(
        vec![Arc::trig(vec![c(0.0, 0.0), c(0.5 * (a + b), 0.0), c(0.5 * (a - b), 0.0)])],
        vec![],
        None,
    )
    .expect("valid ellipse")
}

/// `r_in < |z| < r_out`.
pub fn concentric_annulus(r_in: f64, r_out: f64) -> DomainSpec {
    build_domain(
        circle_arcs(c(0.0, 0.0), r_out, false),
        vec![circle_arcs(c(0.0, 0.0), r_in, true)],
        None,
    )
    .expect("valid annulus")
}

/// Unit disk minus the closed disk `|z - center| ≤ radius`.
pub fn eccentric_annulus(center: f64, radius: f64) -> DomainSpec {
    build_domain(
        circle_arcs(c(0.0, 0.0), 1.0, false),
        vec![circle_arcs(c(center, 0.0), radius, true)],
        None,
    )
    .expect("valid eccentric annulus")
}

/// Half-disk `{|z| < 1, Im z > 0}` (two corners of angle π/2).
pub fn half_disk() -> DomainSpec {
    build_domain(
        vec![Arc::line(c(-1.0, 0.0), c(1.0, 0.0)), Arc::circular(c(1.0, 0.0), c(0.0, 0.0), PI)],
        vec![],
        None,
    )
    .expect("valid half disk")
}
