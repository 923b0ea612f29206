//! SVG drawing in the Poincaré disk.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{approx_acosh, FrameMap, IdealLine, MinkowskiPoint};
use crate::embed::EmbeddingTable;
use crate::error::HyperbolicError;
use crate::graph::Graph;

/// Optional drawing layers. Vertex dots and the disk are always drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub edges: bool,
    pub circles: bool,
    pub buffers: bool,
    pub heptagons: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers { edges: true, circles: true, buffers: false, heptagons: false }
    }
}

impl FromStr for Layers {
    type Err = String;

    /// Comma-separated subset of `edges,circles,buffers,heptagons`, or `all`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut layers = Layers { edges: false, circles: false, buffers: false, heptagons: false };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "edges" => layers.edges = true,
                "circles" => layers.circles = true,
                "buffers" => layers.buffers = true,
                "heptagons" => layers.heptagons = true,
                "all" => layers = Layers { edges: true, circles: true, buffers: true, heptagons: true },
                other => return Err(format!("unknown layer {other:?}")),
            }
        }
        Ok(layers)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub layers: Layers,
    /// Width and height of the drawing in pixels.
    pub disk_size: u32,
    /// Refuse graphs with more vertices than this.
    pub max_vertices: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { layers: Layers::default(), disk_size: 800, max_vertices: 512 }
    }
}

/// Maps Poincaré coordinates to pixels, `v` pointing up.
struct Canvas {
    out: String,
    half: f64,
}

impl Canvas {
    fn px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x + 1.0) * self.half, (1.0 - y) * self.half)
    }

    /// SVG path segment continuing from `p` along the geodesic to `q`.
    fn geodesic_to(&self, p: (f64, f64), q: (f64, f64)) -> String {
        let (sq, sp) = (self.px(q), self.px(p));
        let det = p.0 * q.1 - p.1 * q.0;
        let scale = (p.0.hypot(p.1) * q.0.hypot(q.1)).max(1e-300);
        if det.abs() <= 1e-9 * scale {
            return format!("L {:.3} {:.3}", sq.0, sq.1);
        }
        // center c of the circle through p and q orthogonal to the unit circle:
        // c·p = (|p|² + 1)/2, c·q = (|q|² + 1)/2
        let (bp, bq) = ((p.0 * p.0 + p.1 * p.1 + 1.0) / 2.0, (q.0 * q.0 + q.1 * q.1 + 1.0) / 2.0);
        let c = ((bp * q.1 - bq * p.1) / det, (p.0 * bq - q.0 * bp) / det);
        let r = (c.0 * c.0 + c.1 * c.1 - 1.0).max(0.0).sqrt();
        if !r.is_finite() || r > 1e6 {
            return format!("L {:.3} {:.3}", sq.0, sq.1);
        }
        let sc = self.px(c);
        let cross = (sp.0 - sc.0) * (sq.1 - sc.1) - (sp.1 - sc.1) * (sq.0 - sc.0);
        let sweep = u8::from(cross > 0.0);
        format!("A {:.3} {:.3} 0 0 {sweep} {:.3} {:.3}", r * self.half, r * self.half, sq.0, sq.1)
    }

    /// Path segment from `p` to `q` along the boundary circle, short way.
    fn boundary_to(&self, p: (f64, f64), q: (f64, f64)) -> String {
        let (sp, sq) = (self.px(p), self.px(q));
        let cross = (sp.0 - self.half) * (sq.1 - self.half) - (sp.1 - self.half) * (sq.0 - self.half);
        format!("A {:.3} {:.3} 0 0 {} {:.3} {:.3}", self.half, self.half, u8::from(cross > 0.0), sq.0, sq.1)
    }

    fn line(&mut self, line: &IdealLine, p: usize, style: &str) {
        let [a, b] = line.endpoints_poincare(p);
        let sa = self.px(a);
        let seg = self.geodesic_to(a, b);
        let _ = writeln!(self.out, r#"<path d="M {:.3} {:.3} {seg}" {style}/>"#, sa.0, sa.1);
    }
}

fn poincare_circle(center: &MinkowskiPoint, radius: f64, p: usize) -> ((f64, f64), f64) {
    // the circle's diameter on the ray through the origin spans hyperbolic
    // radii d0 − r .. d0 + r, i.e. Poincaré radii tanh(·/2)
    let d0 = approx_acosh(&center.t);
    let (u, v) = center.to_poincare(p);
    let norm = u.hypot(v);
    let dir = if norm > 0.0 { (u / norm, v / norm) } else { (0.0, 1.0) };
    let (lo, hi) = (((d0 - radius) / 2.0).tanh(), ((d0 + radius) / 2.0).tanh());
    let mid = (lo + hi) / 2.0;
    ((dir.0 * mid, dir.1 * mid), (hi - lo) / 2.0)
}

/// Draws the realized embedding of `g` in the Poincaré disk.
pub fn render_svg(
    table: &EmbeddingTable,
    g: &Graph,
    frames: &FrameMap,
    options: &RenderOptions,
) -> Result<String, HyperbolicError> {
    if table.len() > options.max_vertices {
        return Err(HyperbolicError::RenderLimitExceeded { vertices: table.len(), limit: options.max_vertices });
    }
    let params = frames.params();
    let p = params.precision_bits;
    let points = table.points().iter().map(|q| frames.vertex_point(q)).collect::<Result<Vec<_>, _>>()?;
    let disk: Vec<(f64, f64)> = points.iter().map(|q| q.to_poincare(p)).collect();
    let size = options.disk_size.max(16) as f64;
    let mut c = Canvas { out: String::new(), half: size / 2.0 };
    let _ = writeln!(c.out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        c.out,
        r##"<circle id="disk" cx="{h:.3}" cy="{h:.3}" r="{h:.3}" fill="#fbfbf8" stroke="#333" stroke-width="1"/>"##,
        h = c.half
    );
    let addresses = frames.addresses();

    if options.layers.buffers {
        let _ = writeln!(c.out, r#"<g id="buffers">"#);
        for child in addresses.iter().filter(|a| !a.is_root()) {
            let zone = frames.buffer_zone(child)?;
            let [na, nb] = zone.near.endpoints_poincare(p);
            let [fa, fb] = zone.far.endpoints_poincare(p);
            let start = c.px(na);
            let d = format!(
                "M {:.3} {:.3} {} {} {} {} Z",
                start.0,
                start.1,
                c.geodesic_to(na, nb),
                c.boundary_to(nb, fb),
                c.geodesic_to(fb, fa),
                c.boundary_to(fa, na)
            );
            let _ = writeln!(c.out, r##"<path class="buffer" data-child="{child}" d="{d}" fill="#9ecae1" fill-opacity="0.35" stroke="none"/>"##);
        }
        let _ = writeln!(c.out, "</g>");
    }

    if options.layers.heptagons {
        let _ = writeln!(c.out, r#"<g id="heptagons">"#);
        for a in &addresses {
            for side in frames.heptagon(a)? {
                c.line(&side, p, r##"fill="none" stroke="#bbb" stroke-width="0.6""##);
            }
        }
        let _ = writeln!(c.out, "</g>");
    }

    if options.layers.circles {
        let _ = writeln!(c.out, r#"<g id="circles">"#);
        let mut xs: Vec<_> = table.points().iter().map(|q| q.x().clone()).collect();
        xs.sort();
        xs.dedup();
        for x in xs {
            let center = frames.get(&x).expect("frames cover every x").position();
            let (ctr, r) = poincare_circle(&center, params.circle_radius, p);
            let (sx, sy) = c.px(ctr);
            let _ = writeln!(
                c.out,
                r##"<circle class="node" data-address="{x}" cx="{sx:.3}" cy="{sy:.3}" r="{:.3}" fill="none" stroke="#e6550d" stroke-width="0.8"/>"##,
                r * c.half
            );
        }
        let _ = writeln!(c.out, "</g>");
    }

    if options.layers.edges {
        let _ = writeln!(c.out, r#"<g id="edges">"#);
        for (u, v) in g.edges() {
            let start = c.px(disk[u]);
            let seg = c.geodesic_to(disk[u], disk[v]);
            let _ = writeln!(
                c.out,
                r##"<path class="edge" d="M {:.3} {:.3} {seg}" fill="none" stroke="#3182bd" stroke-width="1"/>"##,
                start.0,
                start.1
            );
        }
        let _ = writeln!(c.out, "</g>");
    }

    let _ = writeln!(c.out, r#"<g id="vertices">"#);
    for (v, &q) in disk.iter().enumerate() {
        let (sx, sy) = c.px(q);
        let _ = writeln!(
            c.out,
            r##"<circle class="vertex" cx="{sx:.3}" cy="{sy:.3}" r="2.5" fill="#111"><title>{v} {}</title></circle>"##,
            table.point(v)
        );
    }
    let _ = writeln!(c.out, "</g>\n</svg>");
    Ok(c.out)
}
