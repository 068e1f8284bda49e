//! Triangle picture of a probability triple.
//!
//! The simplex triangle has side `sqrt(2)` and vertices
//! `V1 = (0, 0)`, `V2 = (sqrt 2, 0)`, `V3 = (sqrt 2 / 2, sqrt 6 / 2)`.
//! Point `A_k` sits on side `V_k V_{k+1}` at distance `sqrt(2) p_k` from `V_k`
//! (indices cyclic). The sides of the inner triangle are
//! `d1 = |A1 A2|`, `d2 = |A2 A3|`, `d3 = |A3 A1|`; by the law of cosines at the
//! shared vertex `V_{k+1}` (angle 60 degrees)
//!
//! ```text
//! d_k^2 = 2 (1 - p_k)^2 + 2 p_{k+1}^2 - 2 (1 - p_k) p_{k+1}
//! ```
//!
//! and summing gives the area of the three squares built on the sides,
//!
//! ```text
//! S = 2 [3 (1 - p1 - p2 - p3) + 2 (p1^2 + p2^2 + p3^2) + p1 p2 + p2 p3 + p3 p1]
//! ```
//!
//! In terms of `u = p - 1/2` this is `S = 3/2 + 4|u|^2 + 2 (u1 u2 + u2 u3 + u3 u1)`.
//! The quadratic form has eigenvalue 6 along `(1, 1, 1)` and 3 across it, so
//! on the quantum ball `|u| <= 1/2` the maximum is `3/2 + 6/4 = 3`, while the
//! cube corners `(0, 0, 0)` and `(1, 1, 1)` reach 6.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::qubit::{ProbabilityTriple, QUANTUM_TOL};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Vertices of the simplex triangle.
pub fn outer_triangle() -> [[f64; 2]; 3] {
    [[0.0, 0.0], [SQRT2, 0.0], [SQRT2 / 2.0, 6f64.sqrt() / 2.0]]
}

/// Points `A1, A2, A3`.
pub fn inner_triangle(p: &ProbabilityTriple) -> [[f64; 2]; 3] {
    let v = outer_triangle();
    let p = p.as_array();
    std::array::from_fn(|k| {
        let (a, b) = (v[k], v[(k + 1) % 3]);
        [a[0] + p[k] * (b[0] - a[0]), a[1] + p[k] * (b[1] - a[1])]
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuprematismError {
    #[error("bad render spec: {0}")]
    BadSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareTriada {
    pub sides: [f64; 3],
    pub areas: [f64; 3],
    pub total: f64,
}

/// Sides measured from the point coordinates.
pub fn triada(p: &ProbabilityTriple) -> SquareTriada {
    let a = inner_triangle(p);
    let sides: [f64; 3] = std::array::from_fn(|k| {
        let (u, v) = (a[k], a[(k + 1) % 3]);
        (u[0] - v[0]).hypot(u[1] - v[1])
    });
    let areas = sides.map(|d| d * d);
    SquareTriada {
        sides,
        areas,
        total: areas.iter().sum(),
    }
}

/// Law-of-cosines side lengths.
pub fn side_lengths(p: &ProbabilityTriple) -> [f64; 3] {
    let p = p.as_array();
    std::array::from_fn(|k| {
        let (a, b) = (1.0 - p[k], p[(k + 1) % 3]);
        (2.0 * a * a + 2.0 * b * b - 2.0 * a * b).sqrt()
    })
}

/// Closed-form total area.
pub fn total_area(p: &ProbabilityTriple) -> f64 {
    let [p1, p2, p3] = p.as_array();
    area_formula(p1, p2, p3)
}

#[inline]
fn area_formula(p1: f64, p2: f64, p3: f64) -> f64 {
    2.0 * (3.0 * (1.0 - p1 - p2 - p3)
        + 2.0 * (p1 * p1 + p2 * p2 + p3 * p3)
        + p1 * p2
        + p2 * p3
        + p3 * p1)
}

fn area_gradient(p: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|k| 2.0 * (-3.0 + 4.0 * p[k] + p[(k + 1) % 3] + p[(k + 2) % 3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    ClassicalCube,
    QuantumBall,
}

impl Region {
    pub fn contains(self, p: [f64; 3]) -> bool {
        let in_cube = p.iter().all(|v| (0.0..=1.0).contains(v));
        match self {
            Region::ClassicalCube => in_cube,
            Region::QuantumBall => in_cube && radius_sqr(p) <= 0.25 + QUANTUM_TOL,
        }
    }

    fn project(self, p: [f64; 3]) -> [f64; 3] {
        match self {
            Region::ClassicalCube => p.map(|v| v.clamp(0.0, 1.0)),
            Region::QuantumBall => {
                let r = radius_sqr(p).sqrt();
                if r <= 0.5 {
                    p
                } else {
                    p.map(|v| 0.5 + (v - 0.5) * 0.5 / r)
                }
            }
        }
    }
}

fn radius_sqr(p: [f64; 3]) -> f64 {
    p.iter().map(|v| (v - 0.5) * (v - 0.5)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxAreaConfig {
    pub grid_step: f64,
    pub refine_tol: f64,
    pub exec: Execution,
}

impl Default for MaxAreaConfig {
    fn default() -> Self {
        MaxAreaConfig {
            grid_step: 1e-3,
            refine_tol: 1e-8,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxArea {
    pub region: Region,
    pub s_max: f64,
    pub argmax: [f64; 3],
    pub grid_best: f64,
    pub grid_argmax: [f64; 3],
}

/// Dense grid search followed by projected gradient ascent.
pub fn max_area(region: Region, cfg: &MaxAreaConfig) -> MaxArea {
    let n = (1.0 / cfg.grid_step).round() as usize;
    let coord = |i: usize| i as f64 / n as f64;
    let (_, grid_best, grid_argmax) = exec::argmax_range(cfg.exec, n + 1, |i| {
        let p1 = coord(i);
        let mut best: Option<(f64, [f64; 3])> = None;
        for j in 0..=n {
            let p2 = coord(j);
            for k in 0..=n {
                let p = [p1, p2, coord(k)];
                if region == Region::QuantumBall && radius_sqr(p) > 0.25 {
                    continue;
                }
                let s = area_formula(p[0], p[1], p[2]);
                if best.map_or(true, |(b, _)| s > b) {
                    best = Some((s, p));
                }
            }
        }
        best
    })
    .expect("the grid contains the center point");

    let argmax = refine(region, grid_argmax, cfg.refine_tol);
    let s_max = area_formula(argmax[0], argmax[1], argmax[2]);
    MaxArea {
        region,
        s_max,
        argmax,
        grid_best,
        grid_argmax,
    }
}

fn refine(region: Region, start: [f64; 3], tol: f64) -> [f64; 3] {
    let s = |p: [f64; 3]| area_formula(p[0], p[1], p[2]);
    let mut x = start;
    let mut eta = 0.1;
    for _ in 0..100_000 {
        let g = area_gradient(x);
        let y = region.project(std::array::from_fn(|k| x[k] + eta * g[k]));
        if s(y) >= s(x) {
            let moved = (0..3).map(|k| (y[k] - x[k]).abs()).fold(0.0, f64::max);
            x = y;
            if moved < tol {
                break;
            }
            eta = (eta * 2.0).min(1.0);
        } else {
            eta *= 0.5;
            if eta < 1e-16 {
                break;
            }
        }
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaExtremes {
    pub classical: MaxArea,
    pub quantum: MaxArea,
    /// `S_classical / S_quantum`.
    pub ratio: f64,
}

pub fn area_extremes(cfg: &MaxAreaConfig) -> AreaExtremes {
    let classical = max_area(Region::ClassicalCube, cfg);
    let quantum = max_area(Region::QuantumBall, cfg);
    AreaExtremes {
        classical,
        quantum,
        ratio: classical.s_max / quantum.s_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    Triangle,
    #[default]
    Triada,
    Tower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareStyle {
    pub fill: String,
    pub stroke: Option<String>,
}

impl SquareStyle {
    fn new(fill: &str, stroke: Option<&str>) -> Self {
        SquareStyle {
            fill: fill.into(),
            stroke: stroke.map(Into::into),
        }
    }
}

/// Squares on `d1, d2, d3`: red, black, white with a black outline.
pub fn default_colors() -> [SquareStyle; 3] {
    [
        SquareStyle::new("#D40000", None),
        SquareStyle::new("#000000", None),
        SquareStyle::new("#FFFFFF", Some("#000000")),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub width: f64,
    pub height: f64,
    /// Pixels per unit length.
    pub scale: f64,
    pub layout: Layout,
    pub colors: [SquareStyle; 3],
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 480.0,
            height: 320.0,
            scale: 100.0,
            layout: Layout::default(),
            colors: default_colors(),
        }
    }
}

const MARGIN: f64 = 10.0;
const GAP: f64 = 10.0;

fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), SuprematismError> {
        for (name, v) in [("width", self.width), ("height", self.height), ("scale", self.scale)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SuprematismError::BadSpec(format!("{name} must be positive, got {v}")));
            }
        }
        for style in &self.colors {
            for col in std::iter::once(&style.fill).chain(style.stroke.as_ref()) {
                if !is_hex_color(col) {
                    return Err(SuprematismError::BadSpec(format!("color {col:?} is not #RRGGBB")));
                }
            }
        }
        Ok(())
    }
}

fn style_attrs(s: &SquareStyle) -> String {
    match &s.stroke {
        Some(stroke) => format!(r#"fill="{}" stroke="{}" stroke-width="1""#, s.fill, stroke),
        None => format!(r#"fill="{}""#, s.fill),
    }
}

/// SVG 1.1 document; identical inputs give identical bytes.
pub fn render_svg(p: &ProbabilityTriple, spec: &RenderSpec) -> Result<String, SuprematismError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let [p1, p2, p3] = p.as_array();
    let _ = writeln!(out, "  <title>p = ({p1}, {p2}, {p3})</title>");

    let t = triada(p);
    match spec.layout {
        Layout::Triangle => {
            let to_px = |v: [f64; 2]| [MARGIN + v[0] * spec.scale, h - MARGIN - v[1] * spec.scale];
            let points = |tri: [[f64; 2]; 3]| {
                tri.iter()
                    .map(|&v| {
                        let q = to_px(v);
                        format!("{:.3},{:.3}", q[0], q[1])
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                out,
                r##"  <polygon id="simplex" points="{}" fill="none" stroke="#000000" stroke-width="1"/>"##,
                points(outer_triangle())
            );
            let _ = writeln!(
                out,
                r##"  <polygon id="state" points="{}" fill="none" stroke="#D40000" stroke-width="2"/>"##,
                points(inner_triangle(p))
            );
            for (k, v) in inner_triangle(p).into_iter().enumerate() {
                let q = to_px(v);
                let _ = writeln!(
                    out,
                    r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">A{}</text>"#,
                    q[0] + 4.0,
                    q[1] - 4.0,
                    k + 1
                );
            }
        }
        Layout::Triada => {
            let mut x = MARGIN;
            for (k, d) in t.sides.iter().enumerate() {
                let side = d * spec.scale;
                let _ = writeln!(
                    out,
                    r#"  <rect id="d{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {}/>"#,
                    k + 1,
                    x,
                    h - MARGIN - side,
                    side,
                    side,
                    style_attrs(&spec.colors[k])
                );
                x += side + GAP;
            }
        }
        Layout::Tower => {
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| t.sides[b].total_cmp(&t.sides[a]));
            let mut bottom = h - MARGIN;
            for k in order {
                let side = t.sides[k] * spec.scale;
                let _ = writeln!(
                    out,
                    r#"  <rect id="d{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {}/>"#,
                    k + 1,
                    (w - side) / 2.0,
                    bottom - side,
                    side,
                    side,
                    style_attrs(&spec.colors[k])
                );
                bottom -= side;
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(p1: f64, p2: f64, p3: f64) -> ProbabilityTriple {
        ProbabilityTriple::new(p1, p2, p3).unwrap()
    }

    #[test]
    fn corner_and_center() {
        let tr = triada(&t(0.0, 0.0, 0.0));
        for d in tr.sides {
            assert!((d - SQRT2).abs() < 1e-15);
        }
        assert!((tr.total - 6.0).abs() < 1e-12);
        assert_eq!(total_area(&t(0.0, 0.0, 0.0)), 6.0);

        let tr = triada(&t(0.5, 0.5, 0.5));
        for a in tr.areas {
            assert!((a - 0.5).abs() < 1e-15);
        }
        assert!((total_area(&t(0.5, 0.5, 0.5)) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn quantum_maximizer() {
        let v = 0.5 + 0.5 / 3f64.sqrt();
        assert!((total_area(&t(v, v, v)) - 3.0).abs() < 1e-12);
        assert!((triada(&t(v, v, v)).total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let p = t(rng.gen(), rng.gen(), rng.gen());
            let tr = triada(&p);
            assert!((tr.total - total_area(&p)).abs() < 1e-12);
            for (a, b) in tr.sides.iter().zip(side_lengths(&p)) {
                assert!((a - b).abs() < 1e-12);
            }
            let [a, b, c] = tr.sides;
            assert!(a <= b + c + 1e-12 && b <= a + c + 1e-12 && c <= a + b + 1e-12);
            let rotated = t(p.p2(), p.p3(), p.p1());
            assert!((triada(&rotated).total - tr.total).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_extremes() {
        let cfg = MaxAreaConfig {
            grid_step: 0.02,
            ..MaxAreaConfig::default()
        };
        let ext = area_extremes(&cfg);
        assert_eq!(ext.classical.s_max, 6.0);
        assert_eq!(ext.classical.argmax, [0.0; 3]);
        assert!((ext.quantum.s_max - 3.0).abs() < 1e-9);
        assert!(ext.quantum.grid_best < 3.0);
        assert!((ext.ratio - 2.0).abs() < 1e-9);
        let u = ext.quantum.argmax.map(|v| v - 0.5);
        assert!((u[0] - u[1]).abs() < 1e-6 && (u[1] - u[2]).abs() < 1e-6);

        let seq = area_extremes(&MaxAreaConfig {
            exec: Execution::Sequential,
            ..cfg
        });
        assert_eq!(seq, ext);
    }

    #[test]
    fn region_membership() {
        assert!(Region::QuantumBall.contains([0.5, 0.5, 1.0]));
        assert!(!Region::QuantumBall.contains([1.0, 1.0, 0.5]));
        assert!(Region::ClassicalCube.contains([1.0, 1.0, 0.5]));
        assert!(!Region::ClassicalCube.contains([1.1, 0.0, 0.0]));
    }

    #[test]
    fn render_is_deterministic_and_counts_squares() {
        let p = t(0.2, 0.7, 0.4);
        for layout in [Layout::Triada, Layout::Tower] {
            let spec = RenderSpec {
                layout,
                ..RenderSpec::default()
            };
            let a = render_svg(&p, &spec).unwrap();
            assert_eq!(a, render_svg(&p, &spec).unwrap());
            assert_eq!(a.matches("<rect").count(), 3);
        }
        let tri = render_svg(&p, &RenderSpec { layout: Layout::Triangle, ..RenderSpec::default() }).unwrap();
        assert_eq!(tri.matches("<polygon").count(), 2);
        assert_eq!(tri.matches("<rect").count(), 0);
    }

    #[test]
    fn bad_specs() {
        let p = ProbabilityTriple::center();
        let zero = RenderSpec { width: 0.0, ..RenderSpec::default() };
        assert!(render_svg(&p, &zero).is_err());
        let mut bad_color = RenderSpec::default();
        bad_color.colors[0].fill = "red\"/><script".into();
        assert!(render_svg(&p, &bad_color).is_err());
    }
}
