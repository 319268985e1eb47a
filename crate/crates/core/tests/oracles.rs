//! Independent reference values: closed forms, finite differences, series.

use std::f64::consts::{PI, TAU};

use confmap::basis::{build_basis, evaluate_basis, Purpose};
use confmap::diagnostics::{elongation_estimate, elongation_with, end_hitting_probability};
use confmap::geometry::fixtures::*;
use confmap::geometry::{DomainSpec, SamplingPlan};
use confmap::laplace::{points_per_arc, solve_dirichlet, solve_mixed, verify_residual, Escalation, MixedProblem, SideCondition};
use confmap::maps::{
    annulus_map, disk_map, evaluate_map, green_function, invert_map, ConformalMap, MapOptions,
};
use confmap::rational::{boundary_correspondence, boundary_points, evaluate_rational, fit_rational, Direction};
use confmap::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn interior_points(domain: &DomainSpec, count: usize, margin: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounding_box();
    let mut pts = Vec::new();
    while pts.len() < count {
        let z = c(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im));
        if domain.contains(z) == confmap::geometry::Location::Inside && domain.distance_to_boundary(z) > margin {
            pts.push(z);
        }
    }
    pts
}

#[test]
fn basis_derivatives_match_central_differences() {
    let d = l_shape();
    let basis = build_basis(&d, Purpose::Disk, 6, 4).unwrap();
    for z in interior_points(&d, 10, 0.05, 1) {
        let table = evaluate_basis(&basis, &[z]).unwrap();
        for k in 0..basis.len() {
            let exact = table.derivative(k, 0);
            let mut errors = Vec::new();
            for h in [1e-4, 1e-5] {
                let t = evaluate_basis(&basis, &[z + h, z - h]).unwrap();
                let fd = (t.value(k, 0) - t.value(k, 1)) / (2.0 * h);
                errors.push((fd - exact).norm() / exact.norm().max(1.0));
            }
            // O(h²) truncation plus O(ε/h) rounding
            assert!(errors[0] < 1e-6 && errors[1] < 1e-6, "term {k}: {errors:?}");
        }
    }
}

#[test]
fn denser_certificate_is_consistent() {
    let d = ellipse(2.0, 1.0);
    let h = |z: Complex64| (z.re * 3.0).sin() * (z.im).cosh();
    let basis = build_basis(&d, Purpose::Disk, 24, 0).unwrap();
    let plan = SamplingPlan::fitting(points_per_arc(&d, &basis, 0), false);
    let model = solve_dirichlet(&d, h, &basis, &plan).unwrap();
    let r4 = verify_residual(&model, &d, h).unwrap();
    let r8 = confmap::laplace::verify_problem(
        &model,
        &d,
        &confmap::laplace::BoundaryProblem::dirichlet(h),
        8,
    )
    .unwrap();
    assert!(r8.verification_grid_size > r4.verification_grid_size);
    assert!(r8.max_residual <= 2.0 * r4.max_residual, "{} vs {}", r8.max_residual, r4.max_residual);
}

#[test]
fn polynomial_image_inverts_generating_polynomial() {
    let d = polynomial_image(0.2);
    let m = disk_map(&d, Some(c(0.0, 0.0)), &MapOptions::new(1e-10)).unwrap();
    let worst = (0..256)
        .map(|k| {
            let w = Complex64::from_polar(0.9, TAU * k as f64 / 256.0);
            (m.eval_unchecked(w + 0.2 * w * w).0 - w).norm()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

/// Modulus of `{|z| < 1} \ {|z - center| ≤ radius}` from the real Möbius map
/// `(z - a)/(1 - a z)` that makes both circles concentric.
pub fn eccentric_modulus(center: f64, radius: f64) -> f64 {
    let (x1, x2) = (center - radius, center + radius);
    let t = |a: f64, x: f64| (x - a) / (1.0 - a * x);
    let (mut lo, mut hi) = (x1, x2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t(mid, x1) + t(mid, x2) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    1.0 / t(a, x2).abs()
}

#[test]
fn eccentric_annulus_matches_moebius_reduction() {
    let m = annulus_map(&eccentric_annulus(0.3, 0.3), &MapOptions::new(1e-10)).unwrap();
    let exact = eccentric_modulus(0.3, 0.3);
    assert!((m.modulus.unwrap() - exact).abs() < 1e-8, "{} vs {exact}", m.modulus.unwrap());
}

fn hexagon_map() -> ConformalMap {
    disk_map(&irregular_hexagon(), None, &MapOptions::new(1e-10)).unwrap()
}

#[test]
fn derivative_matches_finite_differences() {
    let m = hexagon_map();
    let pts = interior_points(&m.domain, 50, 0.05, 2);
    let values = evaluate_map(&m, &pts).unwrap();
    let h = 1e-5;
    for (z, (_, df)) in pts.iter().zip(values) {
        let fd = (m.eval_unchecked(z + h).0 - m.eval_unchecked(z - h).0) / (2.0 * h);
        assert!((fd - df).norm() / df.norm() < 1e-6);
    }
}

#[test]
fn inversion_round_trip() {
    let m = hexagon_map();
    let pts: Vec<Complex64> = m.domain.interior_lattice(18).into_iter().take(200).collect();
    assert!(pts.len() >= 150);
    let w: Vec<Complex64> = evaluate_map(&m, &pts).unwrap().into_iter().map(|p| p.0).collect();
    let back = invert_map(&m, &w).unwrap();
    let worst = pts.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn green_function_is_negative_inside_and_small_on_boundary() {
    let m = hexagon_map();
    for z in interior_points(&m.domain, 100, 1e-3, 3) {
        assert!(green_function(&m, z).unwrap() < 0.0);
    }
    let bound = m.residual().max_residual;
    for z in boundary_points(&m.domain, 200, 0.31) {
        assert!(m.eval_unchecked(z).0.norm().ln().abs() <= bound * 1.01 + 1e-15);
    }
}

#[test]
fn hexagon_approximant_cross_validates() {
    let m = disk_map(&irregular_hexagon(), None, &MapOptions::new(1e-10)).unwrap();
    let tol = 1e-6;
    let table = boundary_correspondence(&m, 2000).unwrap();
    let forward = fit_rational(&table, Direction::Forward, tol, 200).unwrap();
    let inverse = fit_rational(&table, Direction::Inverse, tol, 200).unwrap();
    let fresh = boundary_points(&m.domain, 1000, 0.37);
    let exact: Vec<Complex64> = fresh.iter().map(|z| m.eval_unchecked(*z).0).collect();
    let fwd_err = evaluate_rational(&forward, &fresh)
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let inv_err = evaluate_rational(&inverse, &exact)
        .iter()
        .zip(&fresh)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(fwd_err < 2.0 * tol, "{fwd_err}");
    assert!(inv_err < 2.0 * tol, "{inv_err}");
}

fn fourier_center_potential(mu: f64) -> f64 {
    let mut sum = 0.0;
    for j in 0..10_000 {
        let k = (2 * j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * 4.0 / (PI * k) / (k * PI * mu / 2.0).cosh();
        sum += t;
        if t.abs() < 1e-18 {
            break;
        }
    }
    sum
}

#[test]
fn rectangle_center_potential_matches_series() {
    use SideCondition::Dirichlet;
    for mu in [2.0, 3.0, 4.0] {
        let problem = MixedProblem([Dirichlet(0.0), Dirichlet(1.0), Dirichlet(0.0), Dirichlet(1.0)]);
        let a = solve_mixed(&centered_rectangle(mu), problem, &Escalation::new(1e-10)).unwrap();
        let u = a.model.u(c(0.0, 0.0));
        assert!((u - fourier_center_potential(mu)).abs() < 1e-8, "mu {mu}: {u}");
    }
}

#[test]
fn hitting_probability_asymptotics() {
    let p = end_hitting_probability(4.0).unwrap();
    assert!((p.series_value - p.asymptotic).abs() / p.series_value < 1e-4);
    let sum: f64 = (0..50)
        .map(|j| {
            let k = (2 * j + 1) as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * 4.0 / (PI * k) / (k * PI * 4.0 / 2.0).cosh()
        })
        .sum();
    assert!((p.series_value - sum).abs() < 1e-15);
}

#[test]
fn elongation_close_to_brute_force() {
    let d = ellipse(10.0, 1.0);
    let fast = elongation_estimate(&d).l;
    let brute = elongation_with(&d, 1024, 256).l;
    assert!((fast - brute).abs() < 0.2 * brute, "{fast} vs {brute}");
}

#[test]
fn grid_curves_meet_at_right_angles() {
    let m = hexagon_map();
    let delta = 1e-5;
    for r in [0.3, 0.5, 0.7] {
        for k in 0..8 {
            let w = Complex64::from_polar(r, TAU * k as f64 / 8.0);
            let z = invert_map(&m, &[w, w * Complex64::from_polar(1.0, delta), w * (1.0 + delta)]).unwrap();
            let (_, df) = m.eval_unchecked(z[0]);
            assert!(df.norm() > 1e-3);
            let along_circle = z[1] - z[0];
            let along_ray = z[2] - z[0];
            let angle = (along_circle / along_ray).arg().abs().to_degrees();
            assert!((angle - 90.0).abs() < 1.0, "r {r} k {k}: {angle}");
        }
    }
}
