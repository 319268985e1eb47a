//! JSON domain files.
//!
//! ```json
//! {"outer": [{"type": "line", "from": [0, 0], "to": [1, 0]},
//!            {"type": "arc", "from": [1, 0], "to": [0, 1], "center": [0, 0], "sweep": 1.5707963267948966},
//!            {"type": "trig", "coeffs": [[0, 0], [1, 0]], "range": [0.25, 1.0]}],
//!  "holes": [[...]],
//!  "quad": [0, 1, 2, 3]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_domain, Arc, DomainSpec, GeometryError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RawArc {
    Line {
        from: [f64; 2],
        to: [f64; 2],
    },
    Arc {
        from: [f64; 2],
        to: [f64; 2],
        center: [f64; 2],
        sweep: f64,
    },
    Trig {
        coeffs: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDomain {
    pub outer: Vec<RawArc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<RawArc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<[usize; 4]>,
}

fn pt(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn raw(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl From<&RawArc> for Arc {
    fn from(r: &RawArc) -> Arc {
        match r {
            RawArc::Line { from, to } => Arc::Line {
                from: pt(*from),
                to: pt(*to),
            },
            RawArc::Arc {
                from,
                to,
                center,
                sweep,
            } => Arc::Circular {
                from: pt(*from),
                to: pt(*to),
                center: pt(*center),
                sweep: *sweep,
            },
            RawArc::Trig { coeffs, range } => {
                let [t0, t1] = range.unwrap_or([0.0, 1.0]);
                Arc::Trig {
                    coeffs: coeffs.iter().copied().map(pt).collect(),
                    t0,
                    t1,
                }
            }
        }
    }
}

impl From<&Arc> for RawArc {
    fn from(a: &Arc) -> RawArc {
        match a {
            Arc::Line { from, to } => RawArc::Line {
                from: raw(*from),
                to: raw(*to),
            },
            Arc::Circular {
                from,
                to,
                center,
                sweep,
            } => RawArc::Arc {
                from: raw(*from),
                to: raw(*to),
                center: raw(*center),
                sweep: *sweep,
            },
            Arc::Trig { coeffs, t0, t1 } => RawArc::Trig {
                coeffs: coeffs.iter().copied().map(raw).collect(),
                range: if (*t0, *t1) == (0.0, 1.0) {
                    None
                } else {
                    Some([*t0, *t1])
                },
            },
        }
    }
}

impl RawDomain {
    pub fn build(&self) -> Result<DomainSpec, GeometryError> {
        build_domain(
            self.outer.iter().map(Arc::from).collect(),
            self.holes
                .iter()
                .map(|h| h.iter().map(Arc::from).collect())
                .collect(),
            self.quad,
        )
    }

    /// Every chain traversed backwards, with the marks carried along.
    pub fn reversed(&self) -> RawDomain {
        let rev = |chain: &[RawArc]| -> Vec<RawArc> {
            chain
                .iter()
                .rev()
                .map(|r| RawArc::from(&Arc::from(r).reversed()))
                .collect()
        };
        let n = self.outer.len();
        let m = |i: usize| (n - i) % n;
        RawDomain {
            outer: rev(&self.outer),
            holes: self.holes.iter().map(|h| rev(h)).collect(),
            quad: self.quad.map(|q| [m(q[1]), m(q[0]), m(q[3]), m(q[2])]),
        }
    }

    pub fn from_json(text: &str) -> Result<RawDomain, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("domain serializes")
    }
}

impl DomainSpec {
    /// Canonical description; re-parsing it reproduces `self` exactly.
    pub fn to_raw(&self) -> RawDomain {
        RawDomain {
            outer: self.outer().arcs.iter().map(RawArc::from).collect(),
            holes: self
                .holes()
                .iter()
                .map(|h| h.arcs.iter().map(RawArc::from).collect())
                .collect(),
            quad: self.quad(),
        }
    }

    pub fn from_json(text: &str) -> Result<DomainSpec, GeometryError> {
        RawDomain::from_json(text)
            .map_err(|e| GeometryError::Parse(e.to_string()))?
            .build()
    }
}
