//! Boundary arcs: line segments, circular arcs and trigonometric curves.
//!
//! Every arc is parametrized over `s ∈ [0, 1]`. `point(0)` and `point(1)`
//! return the stored endpoints bit-exactly so that chain reversal is an exact
//! involution.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::GeometryError;

/// A single piece of a boundary chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Arc {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// Circular arc about `center` turning by `sweep` radians (positive is
    /// counterclockwise). `to` must agree with the rotated `from`.
    Circular {
        from: Complex64,
        to: Complex64,
        center: Complex64,
        sweep: f64,
    },
    /// `z(t) = Σ c_k e^{2πi k t}` for `t` running from `t0` to `t1`.
    ///
    /// Coefficients are stored in the order of frequencies `0, 1, -1, 2, -2, …`.
    Trig {
        coeffs: Vec<Complex64>,
        t0: f64,
        t1: f64,
    },
}

/// Frequency of the `i`-th trigonometric coefficient.
pub fn trig_frequency(i: usize) -> i64 {
    if i == 0 {
        0
    } else if i % 2 == 1 {
        i.div_ceil(2) as i64
    } else {
        -((i / 2) as i64)
    }
}

// 5-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Composite Gauss–Legendre integral of `f` over `[0, 1]`.
pub(crate) fn integrate_unit(panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

impl Arc {
    pub fn line(from: Complex64, to: Complex64) -> Self {
        Arc::Line { from, to }
    }

    /// Circular arc from `from` about `center` by `sweep`; the end point is computed.
    pub fn circular(from: Complex64, center: Complex64, sweep: f64) -> Self {
        let to = center + (from - center) * Complex64::from_polar(1.0, sweep);
        Arc::Circular {
            from,
            to,
            center,
            sweep,
        }
    }

    /// Full-period trigonometric curve.
    pub fn trig(coeffs: Vec<Complex64>) -> Self {
        Arc::Trig {
            coeffs,
            t0: 0.0,
            t1: 1.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), GeometryError> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            Arc::Line { from, to } => {
                if !finite(from) || !finite(to) {
                    return Err(GeometryError::NonFinite);
                }
                if from == to {
                    return Err(GeometryError::DegenerateArc("line segment has zero length".into()));
                }
            }
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => {
                if !finite(from) || !finite(to) || !finite(center) || !sweep.is_finite() {
                    return Err(GeometryError::NonFinite);
                }
                let r = (from - center).norm();
                if r == 0.0 {
                    return Err(GeometryError::DegenerateArc("circular arc has zero radius".into()));
                }
                if *sweep == 0.0 || sweep.abs() >= TAU {
                    return Err(GeometryError::DegenerateArc(format!(
                        "sweep {sweep} outside (-2π, 2π) \\ {{0}}"
                    )));
                }
                let end = center + (from - center) * Complex64::from_polar(1.0, *sweep);
                if (end - to).norm() > 1e-9 * r {
                    return Err(GeometryError::DegenerateArc(format!(
                        "arc end ({}, {}) inconsistent with center and sweep",
                        to.re, to.im
                    )));
                }
            }
            Arc::Trig { coeffs, t0, t1 } => {
                if coeffs.iter().any(|c| !finite(c)) || !t0.is_finite() || !t1.is_finite() {
                    return Err(GeometryError::NonFinite);
                }
                if t0 == t1 || coeffs.iter().skip(1).all(|c| c.norm() == 0.0) {
                    return Err(GeometryError::DegenerateArc("trigonometric arc is constant".into()));
                }
                for k in 0..=256 {
                    if self.derivative(k as f64 / 256.0).norm() == 0.0 {
                        return Err(GeometryError::DegenerateArc(
                            "trigonometric arc has a vanishing tangent".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn point(&self, s: f64) -> Complex64 {
        match self {
            Arc::Line { from, to } => {
                if s == 0.0 {
                    *from
                } else if s == 1.0 {
                    *to
                } else {
                    from + (to - from) * s
                }
            }
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => {
                if s == 0.0 {
                    *from
                } else if s == 1.0 {
                    *to
                } else {
                    center + (from - center) * Complex64::from_polar(1.0, sweep * s)
                }
            }
            Arc::Trig { coeffs, t0, t1 } => {
                let t = t0 + (t1 - t0) * s;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * Complex64::from_polar(1.0, TAU * trig_frequency(i) as f64 * t))
                    .sum()
            }
        }
    }

    /// `dz/ds`.
    pub fn derivative(&self, s: f64) -> Complex64 {
        match self {
            Arc::Line { from, to } => to - from,
            Arc::Circular {
                from, center, sweep, ..
            } => (from - center) * Complex64::i() * sweep * Complex64::from_polar(1.0, sweep * s),
            Arc::Trig { coeffs, t0, t1 } => {
                let t = t0 + (t1 - t0) * s;
                let dt = t1 - t0;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let k = trig_frequency(i) as f64;
                        c * Complex64::new(0.0, TAU * k * dt) * Complex64::from_polar(1.0, TAU * k * t)
                    })
                    .sum()
            }
        }
    }

    /// Unit tangent at `s`.
    pub fn tangent(&self, s: f64) -> Complex64 {
        let d = self.derivative(s);
        d / d.norm()
    }

    /// Upper bound on `|dz/ds|` over the whole arc.
    pub fn speed_bound(&self) -> f64 {
        match self {
            Arc::Line { from, to } => (to - from).norm(),
            Arc::Circular {
                from, center, sweep, ..
            } => (from - center).norm() * sweep.abs(),
            Arc::Trig { coeffs, t0, t1 } => {
                TAU * (t1 - t0).abs()
                    * coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, c)| trig_frequency(i).unsigned_abs() as f64 * c.norm())
                        .sum::<f64>()
            }
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Arc::Line { .. } | Arc::Circular { .. } => self.speed_bound(),
            Arc::Trig { .. } => integrate_unit(128, |s| self.derivative(s).norm()),
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Arc::Line { from, to } => Arc::Line { from: *to, to: *from },
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => Arc::Circular {
                from: *to,
                to: *from,
                center: *center,
                sweep: -sweep,
            },
            Arc::Trig { coeffs, t0, t1 } => Arc::Trig {
                coeffs: coeffs.clone(),
                t0: *t1,
                t1: *t0,
            },
        }
    }

    /// `½ Im ∫ conj(z) dz` along the arc; sums to the signed area of a closed chain.
    pub fn area_contribution(&self) -> f64 {
        match self {
            Arc::Line { from, to } => 0.5 * (from.conj() * (to - from)).im,
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => {
                let r2 = (from - center).norm_sqr();
                0.5 * ((center.conj() * (to - from)).im + r2 * sweep)
            }
            Arc::Trig { .. } => {
                0.5 * integrate_unit(128, |s| (self.point(s).conj() * self.derivative(s)).im)
            }
        }
    }

    /// Total rotation of the tangent along the arc (curvature integral).
    pub fn turning(&self) -> f64 {
        match self {
            Arc::Line { .. } => 0.0,
            Arc::Circular { sweep, .. } => *sweep,
            Arc::Trig { .. } => {
                let n = 2048;
                let mut total = 0.0;
                let mut prev = self.derivative(0.0);
                for k in 1..=n {
                    let d = self.derivative(k as f64 / n as f64);
                    total += (d / prev).arg();
                    prev = d;
                }
                total
            }
        }
    }

    /// Euclidean distance from `z` to the arc.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match self {
            Arc::Line { from, to } => segment_distance(z, *from, *to),
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => {
                let r = (from - center).norm();
                let rel = z - center;
                let endpoints = (z - from).norm().min((z - to).norm());
                if rel.norm() == 0.0 {
                    return r;
                }
                let mut psi = (rel / (from - center)).arg();
                if *sweep > 0.0 && psi < 0.0 {
                    psi += TAU;
                } else if *sweep < 0.0 && psi > 0.0 {
                    psi -= TAU;
                }
                if psi.abs() <= sweep.abs() {
                    (rel.norm() - r).abs().min(endpoints)
                } else {
                    endpoints
                }
            }
            Arc::Trig { .. } => {
                let n = 512;
                let (mut best_s, mut best) = (0.0, f64::INFINITY);
                for k in 0..=n {
                    let s = k as f64 / n as f64;
                    let d = (self.point(s) - z).norm();
                    if d < best {
                        best = d;
                        best_s = s;
                    }
                }
                // golden-section refinement on the bracketing cells
                let h = 1.0 / n as f64;
                let (mut a, mut b) = ((best_s - h).max(0.0), (best_s + h).min(1.0));
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let dist = |s: f64| (self.point(s) - z).norm();
                let mut c = b - g * (b - a);
                let mut d = a + g * (b - a);
                let (mut fc, mut fd) = (dist(c), dist(d));
                for _ in 0..60 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = dist(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = dist(d);
                    }
                }
                best.min(fc).min(fd)
            }
        }
    }

    /// Change of `arg(z(s) - p)` along the arc.
    ///
    /// Pieces are subdivided until each lies inside a disk that excludes `p`;
    /// the principal argument of the endpoint ratio is then exact for the piece.
    pub fn winding_angle(&self, p: Complex64) -> f64 {
        if let Arc::Line { from, to } = self {
            return ((to - p) / (from - p)).arg();
        }
        let bound = self.speed_bound();
        let mut total = 0.0;
        let mut stack = vec![(0.0_f64, 1.0_f64, self.point(0.0), self.point(1.0), 0u32)];
        while let Some((a, b, za, zb, depth)) = stack.pop() {
            let reach = bound * (b - a);
            if (za - p).norm() > reach * (1.0 + 1e-12) || depth >= 64 {
                total += ((zb - p) / (za - p)).arg();
            } else {
                let m = 0.5 * (a + b);
                let zm = self.point(m);
                stack.push((m, b, zm, zb, depth + 1));
                stack.push((a, m, za, zm, depth + 1));
            }
        }
        total
    }
}

/// Distance from `z` to the segment `[a, b]`.
pub fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * d.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t <= -PI {
        t += TAU;
    } else if t > PI {
        t -= TAU;
    }
    t
}
