//! SVG figures: curvilinear grids and colored potential fields.

use std::f64::consts::TAU;
use std::fmt::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{DomainSpec, Location};
use crate::maps::{invert_map, ConformalMap, Target};

/// Figure width in SVG user units.
pub const FIGURE_WIDTH: f64 = 600.0;
/// Samples along each grid curve.
pub const CURVE_SAMPLES: usize = 96;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("grid counts must be at least 2, got {0}x{1}")]
    BadGridCount(usize, usize),
    #[error("field plots need a rectangle map, got {0}")]
    WrongTarget(Target),
    #[error("field resolution must be at least 2, got {0}")]
    BadResolution(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    /// Circles (disk, annulus) or lines of constant potential (rectangle).
    pub radial: usize,
    /// Rays (disk, annulus) or flow lines (rectangle).
    pub angular: usize,
    /// Stroke width in pixels.
    pub stroke_width: f64,
    /// Field cells along the longer side of the bounding box.
    pub resolution: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            radial: 8,
            angular: 16,
            stroke_width: 1.0,
            resolution: 120,
        }
    }
}

impl RenderSpec {
    pub fn grid(radial: usize, angular: usize) -> Self {
        RenderSpec {
            radial,
            angular,
            ..Default::default()
        }
    }
}

/// Maps domain coordinates to the SVG canvas (y up).
struct Canvas {
    lo: Complex64,
    scale: f64,
    height: f64,
}

impl Canvas {
    fn new(domain: &DomainSpec) -> Self {
        let (lo, hi) = domain.bounding_box();
        let scale = FIGURE_WIDTH / (hi.re - lo.re);
        Canvas {
            lo,
            scale,
            height: (hi.im - lo.im) * scale,
        }
    }

    fn xy(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.lo.re) * self.scale, self.height - (z.im - self.lo.im) * self.scale)
    }

    fn header(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n",
            w = FIGURE_WIDTH,
            h = self.height
        )
    }
}

fn path_data(canvas: &Canvas, pieces: &[Vec<Complex64>], closed: bool) -> String {
    let mut d = String::new();
    for piece in pieces.iter().filter(|p| p.len() >= 2) {
        for (k, z) in piece.iter().enumerate() {
            let (x, y) = canvas.xy(*z);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
        }
        if closed {
            d.push_str("Z ");
        }
    }
    d.trim_end().to_string()
}

/// Canonical-domain curves as point lists: `(kind, points)`.
fn canonical_curves(map: &ConformalMap, spec: &RenderSpec) -> Vec<(&'static str, Vec<Complex64>)> {
    let (nr, nt) = (spec.radial, spec.angular);
    let n = CURVE_SAMPLES;
    let mut curves = Vec::new();
    match map.target {
        Target::Disk | Target::Annulus => {
            let (r0, r1) = match map.target {
                Target::Disk => (0.0, 1.0),
                _ => (1.0, map.modulus.unwrap_or(1.0)),
            };
            let radius = |t: f64| match map.target {
                Target::Disk => t,
                _ => r1.powf(t),
            };
            for k in 1..=nr {
                let r = radius(k as f64 / (nr + 1) as f64);
                curves.push((
                    "circle",
                    (0..=n).map(|j| Complex64::from_polar(r, TAU * j as f64 / n as f64)).collect(),
                ));
            }
            // stop short of the boundary, where inversion is ill-posed
            let inset = 1e-3;
            for k in 0..nt {
                let theta = TAU * k as f64 / nt as f64;
                let start = if map.target == Target::Disk { 0.0 } else { inset };
                curves.push((
                    "ray",
                    (0..=n)
                        .map(|j| {
                            let t = start + (1.0 - inset - start) * j as f64 / n as f64;
                            let r = if map.target == Target::Disk { r0 + t * (r1 - r0) } else { radius(t) };
                            Complex64::from_polar(r, theta)
                        })
                        .collect(),
                ));
            }
        }
        Target::Rectangle => {
            let h = 1.0 / map.modulus.unwrap_or(1.0);
            let inset = 1e-3;
            for k in 1..=nr {
                let x = k as f64 / (nr + 1) as f64;
                curves.push((
                    "potential",
                    (0..=n)
                        .map(|j| Complex64::new(x, h * (inset + (1.0 - 2.0 * inset) * j as f64 / n as f64)))
                        .collect(),
                ));
            }
            for k in 1..=nt {
                let y = h * k as f64 / (nt + 1) as f64;
                curves.push((
                    "flow",
                    (0..=n)
                        .map(|j| Complex64::new(inset + (1.0 - 2.0 * inset) * j as f64 / n as f64, y))
                        .collect(),
                ));
            }
        }
    }
    curves
}

/// Preimages of a canonical polar or Cartesian grid, plus the boundary.
/// Points that fail to invert split their curve and mark it truncated.
pub fn render_grid_svg(map: &ConformalMap, spec: &RenderSpec) -> Result<String, RenderError> {
    if spec.radial < 2 || spec.angular < 2 {
        return Err(RenderError::BadGridCount(spec.radial, spec.angular));
    }
    let canvas = Canvas::new(&map.domain);
    let mut svg = canvas.header();
    let _ = writeln!(
        svg,
        "<g fill=\"none\" stroke-linejoin=\"round\" stroke-width=\"{:.3}\">",
        spec.stroke_width
    );
    for (kind, curve) in canonical_curves(map, spec) {
        let mut pieces: Vec<Vec<Complex64>> = vec![Vec::new()];
        let mut truncated = false;
        for w in curve {
            match invert_map(map, &[w]) {
                Ok(z) => pieces.last_mut().unwrap().push(z[0]),
                Err(_) => {
                    truncated = true;
                    if !pieces.last().unwrap().is_empty() {
                        pieces.push(Vec::new());
                    }
                }
            }
        }
        let color = if matches!(kind, "circle" | "potential") { "#c0392b" } else { "#2c3e80" };
        if truncated {
            svg.push_str("<!-- warning: inversion failed on part of this curve -->\n");
        }
        let _ = writeln!(
            svg,
            "<path class=\"{kind}\"{} stroke=\"{color}\" d=\"{}\"/>",
            if truncated { " data-truncated=\"true\"" } else { "" },
            path_data(&canvas, &pieces, false)
        );
    }
    let boundary: Vec<Vec<Complex64>> = map.domain.chains().map(|c| c.polyline(64)).collect();
    let _ = writeln!(
        svg,
        "<path class=\"boundary\" stroke=\"#000000\" stroke-width=\"{:.3}\" d=\"{}\"/>",
        2.0 * spec.stroke_width,
        path_data(&canvas, &boundary, true)
    );
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

/// `1 - ŷ²`, where `ŷ ∈ [-1, 1]` is `Im w` rescaled across the rectangle's
/// short dimension `[0, 1/μ]`.
pub fn lightness_factor(w: Complex64, mu: f64) -> f64 {
    let y = (2.0 * mu * w.im - 1.0).clamp(-1.0, 1.0);
    1.0 - y * y
}

/// Field color of a rectangle-map value: hue from red (`Re w = 0`) to blue
/// (`Re w = 1`), lightness scaled by [`lightness_factor`].
pub fn field_color(w: Complex64, mu: f64) -> [u8; 3] {
    let hue = 240.0 * w.re.clamp(0.0, 1.0);
    hsl_to_rgb(hue, 1.0, 0.5 * lightness_factor(w, mu))
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> [u8; 3] {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    [r, g, b].map(|v| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8)
}

/// Cells covering the domain colored by [`field_color`] of the rectangle map.
pub fn render_field_svg(map: &ConformalMap, spec: &RenderSpec) -> Result<String, RenderError> {
    if map.target != Target::Rectangle {
        return Err(RenderError::WrongTarget(map.target));
    }
    if spec.resolution < 2 {
        return Err(RenderError::BadResolution(spec.resolution));
    }
    let mu = map.modulus.unwrap_or(1.0);
    let canvas = Canvas::new(&map.domain);
    let (lo, hi) = map.domain.bounding_box();
    let cell = (hi.re - lo.re).max(hi.im - lo.im) / spec.resolution as f64;
    let nx = ((hi.re - lo.re) / cell).ceil() as usize;
    let ny = ((hi.im - lo.im) / cell).ceil() as usize;
    let px = cell * canvas.scale;
    let mut svg = canvas.header();
    svg.push_str("<g shape-rendering=\"crispEdges\">\n");
    for j in 0..ny {
        for i in 0..nx {
            let z = lo + Complex64::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
            if map.domain.contains(z) != Location::Inside {
                continue;
            }
            let [r, g, b] = field_color(map.eval_unchecked(z).0, mu);
            let (x, y) = canvas.xy(z - Complex64::new(0.5 * cell, -0.5 * cell));
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{px:.3}\" height=\"{px:.3}\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>"
            );
        }
    }
    let boundary: Vec<Vec<Complex64>> = map.domain.chains().map(|c| c.polyline(64)).collect();
    let _ = writeln!(
        svg,
        "<path class=\"boundary\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{:.3}\" d=\"{}\"/>",
        spec.stroke_width,
        path_data(&canvas, &boundary, true)
    );
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lightness_rule() {
        let mu = 2.0;
        assert_eq!(lightness_factor(Complex64::new(0.3, 0.25), mu), 1.0);
        assert_eq!(lightness_factor(Complex64::new(0.3, 0.0), mu), 0.0);
        assert_eq!(lightness_factor(Complex64::new(0.3, 0.5), mu), 0.0);
    }

    #[test]
    fn hue_endpoints() {
        assert_eq!(field_color(Complex64::new(0.0, 0.25), 2.0), [255, 0, 0]);
        assert_eq!(field_color(Complex64::new(1.0, 0.25), 2.0), [0, 0, 255]);
        assert_eq!(field_color(Complex64::new(0.5, 0.0), 2.0), [0, 0, 0]);
    }
}
