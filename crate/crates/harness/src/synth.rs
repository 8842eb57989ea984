//! Deterministic synthetic binary shapes.
//!
//! A shape is written `kind:a[:b]@WxH` and is centered on the cell
//! `(W / 2, H / 2)` (integer division):
//!
//! | spec | foreground |
//! |---|---|
//! | `disk:r` | `(u-cu)^2 + (v-cv)^2 <= r^2` |
//! | `ring:outer:inner` | `inner^2 < d^2 <= outer^2` |
//! | `bar:len:thick` | horizontal `len` x `thick` rectangle, `N = len * thick` |
//! | `lshape:arm:thick` | vertical and bottom arms of an `arm` x `arm` box, `N = 2 arm thick - thick^2` |
//! | `two-blobs:r:sep` | two disks of radius `r` whose centers are `sep` columns apart; `sep >= 2r + 2` |

use std::fmt;
use std::str::FromStr;

use lattice_itc::GridField64;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Disk { radius: usize },
    Ring { outer: usize, inner: usize },
    Bar { length: usize, thickness: usize },
    LShape { arm: usize, thickness: usize },
    TwoBlobs { radius: usize, separation: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub width: usize,
    pub height: usize,
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Disk { .. } => "disk",
            ShapeKind::Ring { .. } => "ring",
            ShapeKind::Bar { .. } => "bar",
            ShapeKind::LShape { .. } => "lshape",
            ShapeKind::TwoBlobs { .. } => "two-blobs",
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.kind.name();
        match self.kind {
            ShapeKind::Disk { radius } => write!(f, "{name}:{radius}")?,
            ShapeKind::Ring { outer, inner } => write!(f, "{name}:{outer}:{inner}")?,
            ShapeKind::Bar { length, thickness } => write!(f, "{name}:{length}:{thickness}")?,
            ShapeKind::LShape { arm, thickness } => write!(f, "{name}:{arm}:{thickness}")?,
            ShapeKind::TwoBlobs { radius, separation } => write!(f, "{name}:{radius}:{separation}")?,
        }
        write!(f, "@{}x{}", self.width, self.height)
    }
}

fn usage(msg: String) -> HarnessError {
    HarnessError::Usage(msg)
}

impl FromStr for ShapeSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let (shape, dims) = s
            .split_once('@')
            .ok_or_else(|| usage(format!("shape '{s}' lacks '@WxH'")))?;
        let (w, h) = dims
            .split_once('x')
            .ok_or_else(|| usage(format!("grid '{dims}' is not WxH")))?;
        let int = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| usage(format!("'{t}' in shape '{s}' is not a non-negative integer")))
        };
        let (width, height) = (int(w)?, int(h)?);
        if width == 0 || height == 0 {
            return Err(usage(format!("grid '{dims}' is empty")));
        }
        let mut parts = shape.split(':');
        let name = parts.next().unwrap_or_default();
        let args = parts.map(int).collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(usage(format!("{name} takes {n} size parameter(s), got {}", args.len())))
            }
        };
        let kind = match name {
            "disk" => {
                arity(1)?;
                ShapeKind::Disk { radius: args[0] }
            }
            "ring" => {
                arity(2)?;
                if args[1] >= args[0] {
                    return Err(usage(format!("ring inner radius {} must be below outer {}", args[1], args[0])));
                }
                ShapeKind::Ring {
                    outer: args[0],
                    inner: args[1],
                }
            }
            "bar" => {
                arity(2)?;
                ShapeKind::Bar {
                    length: args[0],
                    thickness: args[1],
                }
            }
            "lshape" => {
                arity(2)?;
                if args[1] > args[0] {
                    return Err(usage(format!("lshape thickness {} exceeds arm {}", args[1], args[0])));
                }
                ShapeKind::LShape {
                    arm: args[0],
                    thickness: args[1],
                }
            }
            "two-blobs" => {
                arity(2)?;
                if args[1] < 2 * args[0] + 2 {
                    return Err(usage(format!(
                        "two-blobs separation {} must be at least 2r + 2 = {}",
                        args[1],
                        2 * args[0] + 2
                    )));
                }
                ShapeKind::TwoBlobs {
                    radius: args[0],
                    separation: args[1],
                }
            }
            other => return Err(usage(format!("unknown shape '{other}'"))),
        };
        if matches!(kind, ShapeKind::Bar { length: 0, .. } | ShapeKind::Bar { thickness: 0, .. })
            || matches!(kind, ShapeKind::LShape { thickness: 0, .. })
        {
            return Err(usage(format!("shape '{s}' has no area")));
        }
        Ok(ShapeSpec { kind, width, height })
    }
}

/// Half-open bounding box `(u0, u1, v0, v1)` in lattice coordinates,
/// possibly negative.
fn bounds(spec: &ShapeSpec) -> (i64, i64, i64, i64) {
    let cu = (spec.width / 2) as i64;
    let cv = (spec.height / 2) as i64;
    match spec.kind {
        ShapeKind::Disk { radius } | ShapeKind::Ring { outer: radius, .. } => {
            let r = radius as i64;
            (cu - r, cu + r + 1, cv - r, cv + r + 1)
        }
        ShapeKind::Bar { length, thickness } => {
            let (l, t) = (length as i64, thickness as i64);
            (cu - l / 2, cu - l / 2 + l, cv - t / 2, cv - t / 2 + t)
        }
        ShapeKind::LShape { arm, .. } => {
            let a = arm as i64;
            (cu - a / 2, cu - a / 2 + a, cv - a / 2, cv - a / 2 + a)
        }
        ShapeKind::TwoBlobs { radius, separation } => {
            let (r, s) = (radius as i64, separation as i64);
            let left = cu - s / 2;
            (left - r, left + s + r + 1, cv - r, cv + r + 1)
        }
    }
}

fn inside(spec: &ShapeSpec, u: i64, v: i64) -> bool {
    let cu = (spec.width / 2) as i64;
    let cv = (spec.height / 2) as i64;
    let d2 = |a: i64, b: i64| (u - a).pow(2) + (v - b).pow(2);
    let (u0, u1, v0, v1) = bounds(spec);
    match spec.kind {
        ShapeKind::Disk { radius } => d2(cu, cv) <= (radius * radius) as i64,
        ShapeKind::Ring { outer, inner } => {
            let d = d2(cu, cv);
            d > (inner * inner) as i64 && d <= (outer * outer) as i64
        }
        ShapeKind::Bar { .. } => (u0..u1).contains(&u) && (v0..v1).contains(&v),
        ShapeKind::LShape { thickness, .. } => {
            let t = thickness as i64;
            (u0..u1).contains(&u) && (v0..v1).contains(&v) && (u < u0 + t || v >= v1 - t)
        }
        ShapeKind::TwoBlobs { radius, separation } => {
            let left = cu - separation as i64 / 2;
            let r2 = (radius * radius) as i64;
            d2(left, cv) <= r2 || d2(left + separation as i64, cv) <= r2
        }
    }
}

/// Rasterizes `spec` into a 0/1 field.
pub fn synth_shape(spec: &ShapeSpec) -> Result<GridField64> {
    let (u0, u1, v0, v1) = bounds(spec);
    if u0 < 0 || v0 < 0 || u1 > spec.width as i64 || v1 > spec.height as i64 {
        return Err(HarnessError::ShapeOverflow(format!(
            "{spec} covers columns {u0}..{u1} and rows {v0}..{v1}"
        )));
    }
    Ok(GridField64::from_fn(spec.width, spec.height, |u, v| {
        if inside(spec, u as i64, v as i64) {
            1.0
        } else {
            0.0
        }
    })?)
}

/// Parses and rasterizes in one step.
pub fn synth(spec: &str) -> Result<GridField64> {
    synth_shape(&spec.parse()?)
}
