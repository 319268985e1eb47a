//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use confmap::diagnostics::{boundary_distortion, end_hitting_probability};
use confmap::geometry::fixtures::*;
use confmap::geometry::{DomainSpec, Location};
use confmap::laplace::{solve_mixed, Escalation, MixedProblem, SideCondition};
use confmap::maps::{
    annulus_map, disk_map, evaluate_map, green_function, invert_map, rectangle_map, ConformalMap, MapOptions, Target,
};
use confmap::rational::{boundary_correspondence, boundary_points, evaluate_rational, fit_rational, Direction};
use confmap::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn disk_exactness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in [("unit disk", unit_disk()), ("radius 2", disk(c(0.0, 0.0), 2.0))] {
        let t = Instant::now();
        let r = disk_map(&d, None, &MapOptions::new(1e-13)).map(|m| m.residual().max_residual);
        let el = t.elapsed();
        match r {
            Ok(r) => {
                pass &= r < 1e-12 && within(el, 1.0);
                parts.push(format!("{name} residual {r:.2e} in {el:.2?}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn polynomial_oracle() -> Outcome {
    let t = Instant::now();
    let m = match disk_map(&polynomial_image(0.2), Some(c(0.0, 0.0)), &MapOptions::new(1e-10)) {
        Ok(m) => m,
        Err(e) => return outcome(false, e.to_string()),
    };
    let worst = (0..512)
        .map(|k| {
            let w = Complex64::from_polar(0.9, TAU * k as f64 / 512.0);
            (m.eval_unchecked(w + 0.2 * w * w).0 - w).norm()
        })
        .fold(0.0, f64::max);
    let el = t.elapsed();
    outcome(worst < 1e-8 && within(el, 10.0), format!("max deviation {worst:.2e} in {el:.2?}"))
}

fn corner_handling() -> Outcome {
    let t = Instant::now();
    let r = disk_map(&l_shape(), None, &MapOptions::new(1e-6).with_max_dof(1000));
    let el = t.elapsed();
    match r {
        Ok(m) => {
            let (res, dof) = (m.residual().max_residual, m.model.dof());
            outcome(
                res < 1e-6 && dof <= 1000 && within(el, 30.0),
                format!("residual {res:.2e} with {dof} real dof in {el:.2?}"),
            )
        }
        Err(e) => outcome(false, format!("{e} after {el:.2?}")),
    }
}

/// Real Möbius reduction of `{|z| < 1} \ {|z - center| ≤ radius}` to a
/// concentric annulus; returns the outer-to-inner radius ratio.
fn eccentric_modulus(center: f64, radius: f64) -> f64 {
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
    1.0 / t(0.5 * (lo + hi), x2).abs()
}

fn annulus_modulus() -> Outcome {
    let t = Instant::now();
    let opts = MapOptions::new(1e-12).best_effort();
    let mut pass = true;
    let mut parts = Vec::new();
    for (r_in, r_out) in [(1.0, 2.0), (0.5, 3.0)] {
        match annulus_map(&concentric_annulus(r_in, r_out), &opts) {
            Ok(m) => {
                let err = (m.modulus.unwrap() - r_out / r_in).abs();
                pass &= err < 1e-10;
                parts.push(format!("R({r_in},{r_out}) error {err:.2e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(e.to_string());
            }
        }
    }
    match annulus_map(&eccentric_annulus(0.3, 0.3), &MapOptions::new(1e-10)) {
        Ok(m) => {
            let err = (m.modulus.unwrap() - eccentric_modulus(0.3, 0.3)).abs();
            pass &= err < 1e-8;
            parts.push(format!("eccentric error {err:.2e}"));
        }
        Err(e) => {
            pass = false;
            parts.push(e.to_string());
        }
    }
    let el = t.elapsed();
    outcome(pass && within(el, 10.0), format!("{} in {el:.2?}", parts.join(", ")))
}

fn quad_modulus() -> Outcome {
    let t = Instant::now();
    let opts = MapOptions::new(1e-9);
    let mu = |d: &DomainSpec| rectangle_map(d, &opts).map(|m| m.modulus.unwrap());
    let mut pass = true;
    let mut parts = Vec::new();
    for l in [1.0, 2.0, 3.0] {
        match mu(&rectangle(l, 1.0)) {
            Ok(m) => {
                pass &= (m - l).abs() < 1e-8;
                parts.push(format!("mu({l}) error {:.2e}", (m - l).abs()));
            }
            Err(e) => {
                pass = false;
                parts.push(e.to_string());
            }
        }
    }
    let l = l_shape();
    match (mu(&l), mu(&l.conjugate_quad().unwrap())) {
        (Ok(a), Ok(b)) => {
            let err = (a * b - 1.0).abs();
            pass &= err < 1e-7;
            parts.push(format!("L-shape mu {a:.10} reciprocal error {err:.2e}"));
        }
        (Err(e), _) | (_, Err(e)) => {
            pass = false;
            parts.push(e.to_string());
        }
    }
    let el = t.elapsed();
    outcome(pass && within(el, 30.0), format!("{} in {el:.2?}", parts.join(", ")))
}

fn fourier_center_potential(mu: f64) -> f64 {
    let mut sum = 0.0;
    for j in 0..10_000 {
        let k = (2 * j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * 4.0 / (PI * k) / (k * PI * mu / 2.0).cosh();
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn series_consistency() -> Outcome {
    use SideCondition::Dirichlet;
    let mut pass = true;
    let mut parts = Vec::new();
    for mu in [2.0, 3.0, 4.0] {
        let problem = MixedProblem([Dirichlet(0.0), Dirichlet(1.0), Dirichlet(0.0), Dirichlet(1.0)]);
        match solve_mixed(&centered_rectangle(mu), problem, &Escalation::new(1e-10)) {
            Ok(a) => {
                let diff = (a.model.u(c(0.0, 0.0)) - fourier_center_potential(mu)).abs();
                pass &= diff < 1e-8;
                parts.push(format!("mu {mu}: {diff:.2e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("mu {mu}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn hitting_probability() -> Outcome {
    let t = Instant::now();
    let p = match end_hitting_probability(18.20539) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    let el = t.elapsed();
    let six = (p.asymptotic - 9.692555e-13).abs() < 5e-19;
    let three = (p.series_value - p.asymptotic).abs() < 5e-4 * p.asymptotic;
    outcome(
        six && three && within(el, 1e-3),
        format!("asymptotic {:.9e}, series {:.9e} in {el:.2?}", p.asymptotic, p.series_value),
    )
}

fn rational_degrees() -> Outcome {
    let t = Instant::now();
    let tol = 1e-6;
    let run = || -> Result<String, String> {
        let m = disk_map(&irregular_hexagon(), None, &MapOptions::new(1e-10)).map_err(|e| e.to_string())?;
        let table = boundary_correspondence(&m, 2000).map_err(|e| e.to_string())?;
        let fwd = fit_rational(&table, Direction::Forward, tol, 200).map_err(|e| e.to_string())?;
        let inv = fit_rational(&table, Direction::Inverse, tol, 200).map_err(|e| e.to_string())?;
        let fresh = boundary_points(&m.domain, 1000, 0.37);
        let exact: Vec<Complex64> = fresh.iter().map(|z| m.eval_unchecked(*z).0).collect();
        let max_err = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        let fwd_fresh = max_err(&evaluate_rational(&fwd, &fresh), &exact);
        let inv_fresh = max_err(&evaluate_rational(&inv, &exact), &fresh);
        let ok = fwd.degree() <= 200
            && inv.degree() <= 200
            && fwd.accuracy < tol
            && inv.accuracy < tol
            && fwd_fresh < tol
            && inv_fresh < tol;
        let detail = format!(
            "forward degree {} error {:.2e} (fresh {:.2e}), inverse degree {} error {:.2e} (fresh {:.2e})",
            fwd.degree(),
            fwd.accuracy,
            fwd_fresh,
            inv.degree(),
            inv.accuracy,
            inv_fresh
        );
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    };
    let r = run();
    let el = t.elapsed();
    match r {
        Ok(d) => outcome(within(el, 30.0), format!("{d} in {el:.2?}")),
        Err(d) => outcome(false, format!("{d} in {el:.2?}")),
    }
}

fn evaluation_speed() -> Outcome {
    let t = Instant::now();
    let m = match disk_map(&irregular_hexagon(), None, &MapOptions::new(1e-10)) {
        Ok(m) => m,
        Err(e) => return outcome(false, e.to_string()),
    };
    let table = match boundary_correspondence(&m, 2000) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let r = match fit_rational(&table, Direction::Forward, 1e-6, 200) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let n = 1_000_000;
    let pts: Vec<Complex64> = (0..n)
        .map(|k| {
            let s = k as f64 / n as f64;
            c(0.2 + 2.5 * s, 0.3 + 1.8 * (s * 977.0).fract())
        })
        .collect();
    let start = Instant::now();
    let values = evaluate_rational(&r, &pts);
    let eval = start.elapsed();
    let rate = n as f64 / eval.as_secs_f64();
    let finite = values.iter().all(|w| w.re.is_finite() && w.im.is_finite());
    let el = t.elapsed();
    outcome(
        rate >= 1e5 && finite && within(el, 10.0),
        format!("degree {}: {rate:.3e} points/s, total {el:.2?}", r.degree()),
    )
}

fn crowding_law() -> Outcome {
    let t = Instant::now();
    let opts = MapOptions::new(1e-6).best_effort();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for l in [2.0, 3.0, 4.0] {
        match disk_map(&rectangle(l, 1.0), None, &opts) {
            Ok(m) => {
                xs.push(l);
                ys.push(boundary_distortion(&m, 2000, 0.25).ln());
            }
            Err(e) => return outcome(false, format!("L {l}: {e}")),
        }
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let el = t.elapsed();
    outcome(
        (0.8 * PI / 2.0..=1.2 * PI).contains(&slope) && within(el, 60.0),
        format!("slope {slope:.4} in {el:.2?}"),
    )
}

fn kite() -> DomainSpec {
    let pts = [c(0.0, 0.0), c(2.0, -0.3), c(2.4, 1.1), c(0.3, 1.4)];
    confmap::geometry::build_domain(polygon_arcs(&pts), vec![], Some([0, 1, 2, 3])).unwrap()
}

fn lattice(domain: &DomainSpec, n: usize, margin: f64) -> Vec<Complex64> {
    domain
        .interior_lattice(n)
        .into_iter()
        .filter(|z| domain.contains(*z) == Location::Inside && domain.distance_to_boundary(*z) > margin)
        .collect()
}

/// Property checks for one map; returns the first violation.
fn check_map(m: &ConformalMap) -> Result<(), String> {
    if m.target != Target::Rectangle {
        let t = boundary_correspondence(m, 512).map_err(|e| e.to_string())?;
        if !t.is_monotone_within(10.0 * m.residual().max_residual) {
            return Err("boundary argument not monotone".into());
        }
        if (t.total_argument() - TAU).abs() > 1e-8 {
            return Err(format!("winding {}", t.total_argument() / TAU));
        }
    }
    if m.target == Target::Disk {
        for z in lattice(&m.domain, 12, 1e-3) {
            if green_function(m, z).map_err(|e| e.to_string())? >= 0.0 {
                return Err(format!("Green's function nonnegative at {z}"));
            }
        }
    }
    let pts = lattice(&m.domain, 10, 0.02 * m.domain.diameter());
    let w: Vec<Complex64> = evaluate_map(m, &pts).map_err(|e| e.to_string())?.into_iter().map(|p| p.0).collect();
    let back = invert_map(m, &w).map_err(|e| e.to_string())?;
    let comp = pts.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if comp >= 1e-8 {
        return Err(format!("composition error {comp:.2e}"));
    }
    let h = 1e-5;
    for z in lattice(&m.domain, 8, 0.05 * m.domain.diameter()) {
        let (_, df) = m.eval_unchecked(z);
        let fd = (m.eval_unchecked(z + h).0 - m.eval_unchecked(z - h).0) / (2.0 * h);
        if (fd - df).norm() / df.norm() >= 1e-6 {
            return Err(format!("derivative mismatch at {z}"));
        }
    }
    Ok(())
}

fn property_suite() -> Outcome {
    let t = Instant::now();
    let opts = MapOptions::new(1e-8);
    let mut maps: Vec<(&str, Result<ConformalMap, String>)> = Vec::new();
    for (name, d) in [
        ("unit disk", unit_disk()),
        ("polynomial image", polynomial_image(0.2)),
        ("ellipse", ellipse(2.0, 1.0)),
        ("half disk", half_disk()),
        ("hexagon", irregular_hexagon()),
        ("L-shape", l_shape()),
    ] {
        maps.push((name, disk_map(&d, None, &opts).map_err(|e| e.to_string())));
    }
    maps.push(("concentric annulus", annulus_map(&concentric_annulus(1.0, 2.0), &opts).map_err(|e| e.to_string())));
    maps.push(("eccentric annulus", annulus_map(&eccentric_annulus(0.3, 0.3), &opts).map_err(|e| e.to_string())));
    maps.push(("rectangle", rectangle_map(&rectangle(3.0, 1.0), &opts).map_err(|e| e.to_string())));
    maps.push(("kite", rectangle_map(&kite(), &opts).map_err(|e| e.to_string())));
    let mut failures = Vec::new();
    for (name, m) in &maps {
        if let Err(e) = m.as_ref().map_err(String::clone).and_then(check_map) {
            failures.push(format!("{name}: {e}"));
        }
    }

    let motion = [
        (Complex64::from_polar(3.7, 1.1), c(-5.0, 2.0)),
        (Complex64::from_polar(0.3, -2.0), c(4.0, 7.0)),
    ];
    let fine = MapOptions::new(1e-9);
    for (name, d) in [("rectangle 2x1", rectangle(2.0, 1.0)), ("kite", kite()), ("L-shape", l_shape())] {
        let base = rectangle_map(&d, &fine).map(|m| m.modulus.unwrap());
        for (a, b) in motion {
            let moved = d.transformed(a, b).map_err(|e| e.to_string());
            let mu = moved.and_then(|d| rectangle_map(&d, &fine).map(|m| m.modulus.unwrap()).map_err(|e| e.to_string()));
            match (&base, mu) {
                (Ok(x), Ok(y)) if (x - y).abs() < 1e-8 => {}
                (Ok(x), Ok(y)) => failures.push(format!("{name}: modulus {x} moved to {y}")),
                (Err(e), _) => failures.push(format!("{name}: {e}")),
                (_, Err(e)) => failures.push(format!("{name}: {e}")),
            }
        }
    }
    let d = eccentric_annulus(0.3, 0.3);
    let base = annulus_map(&d, &fine).map(|m| m.modulus.unwrap());
    for (a, b) in motion {
        let r = d
            .transformed(a, b)
            .map_err(|e| e.to_string())
            .and_then(|d| annulus_map(&d, &fine).map(|m| m.modulus.unwrap()).map_err(|e| e.to_string()));
        match (&base, r) {
            (Ok(x), Ok(y)) if (x - y).abs() < 1e-8 => {}
            (Ok(x), Ok(y)) => failures.push(format!("annulus: R {x} moved to {y}")),
            (Err(e), _) => failures.push(format!("annulus: {e}")),
            (_, Err(e)) => failures.push(format!("annulus: {e}")),
        }
    }
    let el = t.elapsed();
    if failures.is_empty() {
        outcome(true, format!("{} maps and 8 rigid motions in {el:.2?}", maps.len()))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn domain_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../domains").join(format!("{name}.json"))
}

fn determinism() -> Outcome {
    let t = Instant::now();
    let dir = match tempfile::TempDir::new() {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let hex = domain_file("hexagon");
    let rect = domain_file("rectangle_3x1");
    let ann = domain_file("annulus");
    let pts = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/probe_points.csv");
    let (hex, rect, ann, pts) = (hex.to_str().unwrap(), rect.to_str().unwrap(), ann.to_str().unwrap(), pts.to_str().unwrap());
    let jobs: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["map", "--domain", hex, "--tol", "1e-6"], vec!["r.json"]),
        (vec!["modulus", "--domain", rect], vec!["r.json"]),
        (vec!["modulus", "--domain", ann], vec!["r.json"]),
        (vec!["grid", "--domain", hex, "--tol", "1e-6", "--grid", "3x6"], vec!["r.json", "f.svg"]),
        (vec!["field", "--domain", rect], vec!["r.json", "f.svg"]),
        (vec!["probe", "--domain", hex, "--tol", "1e-6", "--points", pts], vec!["r.json", "r.csv"]),
        (vec!["compress", "--domain", hex, "--tol", "1e-8", "--samples", "600"], vec!["r.json"]),
    ];
    let mut differing = Vec::new();
    for (args, files) in &jobs {
        let mut runs = Vec::new();
        for run in 0..2 {
            let base = dir.path().join(format!("{}{run}", args[0]));
            std::fs::create_dir_all(&base).unwrap();
            let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            full.extend(["--out".into(), base.join("r.json").to_str().unwrap().into()]);
            if files.contains(&"f.svg") {
                full.extend(["--svg".into(), base.join("f.svg").to_str().unwrap().into()]);
            }
            let status = Command::new(env!("CARGO_BIN_EXE_confmap")).args(&full).output();
            match status {
                Ok(o) if o.status.success() => {}
                Ok(o) => return outcome(false, format!("{} exited with {:?}", args[0], o.status.code())),
                Err(e) => return outcome(false, e.to_string()),
            }
            let contents: Vec<String> = files
                .iter()
                .map(|f| {
                    let text = std::fs::read_to_string(base.join(f)).unwrap_or_default();
                    if f.ends_with(".json") {
                        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap_or_default();
                        if let Some(o) = v.as_object_mut() {
                            o.remove("timing");
                        }
                        v.to_string()
                    } else {
                        text
                    }
                })
                .collect();
            runs.push(contents);
        }
        if runs[0] != runs[1] {
            differing.push(args[0]);
        }
    }
    let el = t.elapsed();
    if differing.is_empty() {
        outcome(true, format!("{} jobs byte-identical in {el:.2?}", jobs.len()))
    } else {
        outcome(false, format!("outputs differ for {differing:?}"))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("disk-map exactness on disks", disk_exactness),
        ("polynomial-image oracle", polynomial_oracle),
        ("corner handling", corner_handling),
        ("annulus modulus", annulus_modulus),
        ("quadrilateral modulus", quad_modulus),
        ("solver-series consistency", series_consistency),
        ("hitting probability", hitting_probability),
        ("rational degrees", rational_degrees),
        ("evaluation speed", evaluation_speed),
        ("crowding law", crowding_law),
        ("property suite", property_suite),
        ("determinism", determinism),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !filter.is_empty() && !filter.contains(&number) {
            continue;
        }
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {number:2} {tag}  {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
