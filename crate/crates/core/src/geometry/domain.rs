use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::arc::{integrate_unit, wrap_angle, Arc};
use super::GeometryError;

/// Validation polylines use this many samples per arc.
const POLYLINE_POINTS: usize = 64;
/// Joins whose tangent directions differ by less than this are smooth.
pub const CORNER_THRESHOLD: f64 = 1e-10;

/// A closed, ordered chain of arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub arcs: Vec<Arc>,
}

impl Chain {
    pub fn new(arcs: Vec<Arc>) -> Self {
        Chain { arcs }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Start point of arc `k` (the junction between arcs `k - 1` and `k`).
    pub fn junction(&self, k: usize) -> Complex64 {
        self.arcs[k % self.arcs.len()].start()
    }

    pub fn signed_area(&self) -> f64 {
        self.arcs.iter().map(Arc::area_contribution).sum()
    }

    pub fn length(&self) -> f64 {
        self.arcs.iter().map(Arc::length).sum()
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        Chain {
            arcs: self.arcs.iter().rev().map(Arc::reversed).collect(),
        }
    }

    pub fn winding_number(&self, p: Complex64) -> f64 {
        self.arcs.iter().map(|a| a.winding_angle(p)).sum::<f64>() / TAU
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.arcs
            .iter()
            .map(|a| a.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed polyline through `per_arc` equispaced parameters of every arc.
    pub fn polyline(&self, per_arc: usize) -> Vec<Complex64> {
        self.arcs
            .iter()
            .flat_map(|a| (0..per_arc).map(move |k| a.point(k as f64 / per_arc as f64)))
            .collect()
    }

    /// Tangent rotation over the smooth parts plus turning at the junctions.
    pub fn total_turning(&self) -> f64 {
        let n = self.arcs.len();
        let smooth: f64 = self.arcs.iter().map(Arc::turning).sum();
        let joins: f64 = (0..n)
            .map(|k| {
                let t_in = self.arcs[(k + n - 1) % n].tangent(1.0);
                let t_out = self.arcs[k].tangent(0.0);
                (t_out / t_in).arg()
            })
            .sum();
        smooth + joins
    }

    /// `(∬ x dA, ∬ y dA)` for the region enclosed counterclockwise.
    fn first_moments(&self) -> (f64, f64) {
        let mut mx = 0.0;
        let mut my = 0.0;
        for a in &self.arcs {
            mx += 0.5 * integrate_unit(128, |s| a.point(s).re.powi(2) * a.derivative(s).im);
            my -= 0.5 * integrate_unit(128, |s| a.point(s).im.powi(2) * a.derivative(s).re);
        }
        (mx, my)
    }
}

/// Junction where one-sided tangents disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    pub location: Complex64,
    /// Interior angle in `(0, 2π)`; `π` never occurs.
    pub interior_angle: f64,
    /// 0 for the outer chain, `1 + h` for hole `h`.
    pub chain: usize,
    /// Index of the arc that starts at this corner.
    pub junction: usize,
    pub incoming: usize,
    pub outgoing: usize,
    /// Unit vector bisecting the interior angle.
    pub bisector: Complex64,
}

/// Result of a point-location query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// A validated Jordan domain, optionally with one hole and four marked
/// boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    outer: Chain,
    holes: Vec<Chain>,
    corners: Vec<Corner>,
    quad: Option<[usize; 4]>,
    diameter: f64,
}

/// Builds and validates a domain. Chains with the wrong orientation are reversed.
pub fn build_domain(
    outer: Vec<Arc>,
    holes: Vec<Vec<Arc>>,
    quad: Option<[usize; 4]>,
) -> Result<DomainSpec, GeometryError> {
    if outer.is_empty() || holes.iter().any(Vec::is_empty) {
        return Err(GeometryError::NoArcs);
    }
    if holes.len() > 1 {
        return Err(GeometryError::TooManyHoles(holes.len()));
    }
    for a in outer.iter().chain(holes.iter().flatten()) {
        a.validate()?;
    }
    let mut outer = Chain::new(outer);
    let mut holes: Vec<Chain> = holes.into_iter().map(Chain::new).collect();

    let provisional = diameter_of(std::iter::once(&outer).chain(&holes));
    let tol = 1e-12 * provisional;
    for (ci, chain) in std::iter::once(&outer).chain(&holes).enumerate() {
        let n = chain.len();
        for k in 0..n {
            let gap = (chain.arcs[k].end() - chain.arcs[(k + 1) % n].start()).norm();
            if gap > tol {
                return Err(GeometryError::NotClosed {
                    chain: ci,
                    junction: (k + 1) % n,
                    gap,
                });
            }
        }
    }

    let mut quad = quad;
    if let Some(q) = quad {
        check_quad(&q, outer.len())?;
    }
    if outer.signed_area() < 0.0 {
        let n = outer.len();
        outer = outer.reversed();
        quad = quad.map(|q| {
            let m = |i: usize| (n - i) % n;
            [m(q[1]), m(q[0]), m(q[3]), m(q[2])]
        });
    }
    for h in holes.iter_mut() {
        if h.signed_area() > 0.0 {
            *h = h.reversed();
        }
    }

    let diameter = diameter_of(std::iter::once(&outer).chain(&holes));
    check_simple(std::iter::once(&outer).chain(&holes).collect(), 1e-12 * diameter)?;
    for h in &holes {
        if outer.winding_number(h.junction(0)).round() != 1.0 {
            return Err(GeometryError::HoleOutside);
        }
    }

    let mut corners = Vec::new();
    for (ci, chain) in std::iter::once(&outer).chain(&holes).enumerate() {
        corners.extend(find_corners(chain, ci)?);
    }

    Ok(DomainSpec {
        outer,
        holes,
        corners,
        quad,
        diameter,
    })
}

fn check_quad(q: &[usize; 4], n: usize) -> Result<(), GeometryError> {
    if q.iter().any(|&i| i >= n) {
        return Err(GeometryError::BadQuadMarking(format!(
            "vertex index out of range for {n} junctions"
        )));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if q[i] == q[j] {
                return Err(GeometryError::BadQuadMarking("vertices must be distinct".into()));
            }
        }
    }
    let descents = (0..4).filter(|&i| q[(i + 1) % 4] < q[i]).count();
    if descents != 1 {
        return Err(GeometryError::BadQuadMarking(
            "vertices are not in cyclic order".into(),
        ));
    }
    Ok(())
}

fn diameter_of<'a>(chains: impl Iterator<Item = &'a Chain>) -> f64 {
    let pts: Vec<Complex64> = chains.flat_map(|c| c.polyline(POLYLINE_POINTS)).collect();
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    ((b - a).conj() * (c - a)).im
}

fn segments_touch(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: f64) -> bool {
    // signs within rounding of zero are collinear, not crossing
    let (sab, scd) = (tol * (b - a).norm(), tol * (d - c).norm());
    let side = |o: f64, s: f64| if o > s { 1 } else if o < -s { -1 } else { 0 };
    let (o1, o2) = (side(orient(a, b, c), sab), side(orient(a, b, d), sab));
    let (o3, o4) = (side(orient(c, d, a), scd), side(orient(c, d, b), scd));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    use super::arc::segment_distance as sd;
    sd(c, a, b).min(sd(d, a, b)).min(sd(a, c, d)).min(sd(b, c, d)) <= tol
}

/// Sample-based check that no two non-adjacent polyline segments meet.
fn check_simple(chains: Vec<&Chain>, tol: f64) -> Result<(), GeometryError> {
    let rings: Vec<Vec<Complex64>> = chains.iter().map(|c| c.polyline(POLYLINE_POINTS)).collect();
    for (ci, ring) in rings.iter().enumerate() {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_touch(a, b, ring[j], ring[(j + 1) % n], tol) {
                    return Err(GeometryError::SelfIntersecting {
                        chain: ci,
                        near: 0.5 * (a + b),
                    });
                }
            }
        }
        for (cj, other) in rings.iter().enumerate().skip(ci + 1) {
            let m = other.len();
            for i in 0..n {
                for j in 0..m {
                    if segments_touch(ring[i], ring[(i + 1) % n], other[j], other[(j + 1) % m], tol) {
                        return Err(GeometryError::SelfIntersecting {
                            chain: cj,
                            near: ring[i],
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn find_corners(chain: &Chain, ci: usize) -> Result<Vec<Corner>, GeometryError> {
    let n = chain.len();
    let mut out = Vec::new();
    for k in 0..n {
        let incoming = (k + n - 1) % n;
        let t_in = chain.arcs[incoming].tangent(1.0);
        let t_out = chain.arcs[k].tangent(0.0);
        let turn = wrap_angle((t_out / t_in).arg());
        if turn.abs() <= CORNER_THRESHOLD {
            continue;
        }
        if PI - turn.abs() <= CORNER_THRESHOLD {
            return Err(GeometryError::Cusp {
                chain: ci,
                junction: k,
            });
        }
        let angle = PI - turn;
        out.push(Corner {
            location: chain.junction(k),
            interior_angle: angle,
            chain: ci,
            junction: k,
            incoming,
            outgoing: k,
            bisector: t_out * Complex64::from_polar(1.0, 0.5 * angle),
        });
    }
    Ok(out)
}

impl DomainSpec {
    pub fn outer(&self) -> &Chain {
        &self.outer
    }

    pub fn holes(&self) -> &[Chain] {
        &self.holes
    }

    /// Outer chain followed by the holes.
    pub fn chains(&self) -> impl Iterator<Item = &Chain> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn chain(&self, index: usize) -> &Chain {
        if index == 0 {
            &self.outer
        } else {
            &self.holes[index - 1]
        }
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn quad(&self) -> Option<[usize; 4]> {
        self.quad
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_simply_connected(&self) -> bool {
        self.holes.is_empty()
    }

    /// Same boundary with the quadrilateral marks shifted by one vertex.
    pub fn conjugate_quad(&self) -> Option<DomainSpec> {
        self.quad.map(|q| DomainSpec {
            quad: Some([q[1], q[2], q[3], q[0]]),
            ..self.clone()
        })
    }

    /// Replaces the quadrilateral marks.
    pub fn with_quad(&self, quad: [usize; 4]) -> Result<DomainSpec, GeometryError> {
        check_quad(&quad, self.outer.len())?;
        Ok(DomainSpec {
            quad: Some(quad),
            ..self.clone()
        })
    }

    /// Marked points in the order `q0..q3`.
    pub fn quad_points(&self) -> Option<[Complex64; 4]> {
        self.quad.map(|q| q.map(|i| self.outer.junction(i)))
    }

    /// Side `0..4` of the quadrilateral containing outer arc `arc`; side `k`
    /// runs from vertex `k` to vertex `k + 1`.
    pub fn quad_side(&self, arc: usize) -> Option<usize> {
        let q = self.quad?;
        let n = self.outer.len();
        (0..4).find(|&k| {
            let (a, b) = (q[k], q[(k + 1) % 4]);
            let span = (b + n - a) % n;
            (arc + n - a) % n < span
        })
    }

    pub fn area(&self) -> f64 {
        self.chains().map(Chain::signed_area).sum()
    }

    pub fn centroid(&self) -> Complex64 {
        let (mut mx, mut my) = (0.0, 0.0);
        for c in self.chains() {
            let (x, y) = c.first_moments();
            mx += x;
            my += y;
        }
        let a = self.area();
        Complex64::new(mx / a, my / a)
    }

    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let pts = self.outer.polyline(POLYLINE_POINTS);
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        // arcs can bulge beyond their samples
        let pad = 1e-3 * self.diameter;
        (lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad))
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        self.chains()
            .map(|c| c.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding-number point location with a `1e-12 · diameter` boundary band.
    pub fn contains(&self, z: Complex64) -> Location {
        if self.distance_to_boundary(z) <= 1e-12 * self.diameter {
            return Location::Boundary;
        }
        let w: f64 = self.chains().map(|c| c.winding_number(z)).sum();
        if w.round() == 1.0 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Uniform `n × n` lattice over the bounding box, keeping interior points.
    pub fn interior_lattice(&self, n: usize) -> Vec<Complex64> {
        let (lo, hi) = self.bounding_box();
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / n as f64;
                let y = lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / n as f64;
                let z = Complex64::new(x, y);
                if self.contains(z) == Location::Inside {
                    pts.push(z);
                }
            }
        }
        pts
    }

    /// Centroid when it lies well inside, else the 64×64 lattice point farthest
    /// from the boundary.
    pub fn default_center(&self) -> Complex64 {
        let c = self.centroid();
        if self.holes.is_empty()
            && self.contains(c) == Location::Inside
            && self.distance_to_boundary(c) > 0.05 * self.diameter
        {
            return c;
        }
        self.interior_lattice(64)
            .into_iter()
            .map(|z| (z, self.distance_to_boundary(z)))
            .fold((c, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0
    }

    /// Area centroid of hole `h`, used as its expansion center.
    pub fn hole_center(&self, h: usize) -> Complex64 {
        let hole = &self.holes[h];
        let (mx, my) = hole.first_moments();
        let a = hole.signed_area();
        Complex64::new(mx / a, my / a)
    }

    /// Transforms every arc by `z ↦ a·z + b` (`a ≠ 0`), keeping marks.
    pub fn transformed(&self, a: Complex64, b: Complex64) -> Result<DomainSpec, GeometryError> {
        let map = |z: Complex64| a * z + b;
        let tx = |arc: &Arc| match arc {
            Arc::Line { from, to } => Arc::Line {
                from: map(*from),
                to: map(*to),
            },
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => Arc::Circular {
                from: map(*from),
                to: map(*to),
                center: map(*center),
                sweep: *sweep,
            },
            Arc::Trig { coeffs, t0, t1 } => {
                let mut c: Vec<Complex64> = coeffs.iter().map(|c| a * c).collect();
                c[0] += b;
                Arc::Trig {
                    coeffs: c,
                    t0: *t0,
                    t1: *t1,
                }
            }
        };
        build_domain(
            self.outer.arcs.iter().map(tx).collect(),
            self.holes.iter().map(|h| h.arcs.iter().map(tx).collect()).collect(),
            self.quad,
        )
    }
}

/// Corners of a validated domain.
pub fn corner_list(domain: &DomainSpec) -> Vec<Corner> {
    domain.corners.clone()
}
