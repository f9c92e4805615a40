use std::fmt::Write as _;

use super::{DoublePacking, Model};
use crate::graph::VertexId;

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    /// Endpoints of the forest edges, drawn as segments between primal
    /// centres.
    pub forest: Vec<(VertexId, VertexId)>,
    /// Vertices whose primal circle is filled.
    pub highlight: Vec<VertexId>,
    pub show_dual: bool,
    /// Image width and height in pixels (default 800).
    pub size: Option<u32>,
}

impl RenderOptions {
    pub fn new() -> Self {
        Self {
            show_dual: true,
            ..Self::default()
        }
    }
}

/// SVG of a packing with `y` pointing up. Primal circles are solid, dual
/// circles dashed.
pub fn render_svg(p: &DoublePacking, opts: &RenderOptions) -> String {
    let size = opts.size.unwrap_or(800) as f64;
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = match p.model {
        Model::UnitDisc => (-1.0, -1.0, 1.0, 1.0),
        Model::EuclideanPlane => (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
    };
    if p.model == Model::EuclideanPlane {
        for c in &p.primal {
            lo_x = lo_x.min(c.centre.re - c.radius);
            hi_x = hi_x.max(c.centre.re + c.radius);
            lo_y = lo_y.min(c.centre.im - c.radius);
            hi_y = hi_y.max(c.centre.im + c.radius);
        }
        if !lo_x.is_finite() {
            (lo_x, lo_y, hi_x, hi_y) = (-1.0, -1.0, 1.0, 1.0);
        }
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE) * 1.02;
    let (cx, cy) = ((lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0);
    let scale = size / span;
    let sx = |x: f64| (x - cx) * scale + size / 2.0;
    let sy = |y: f64| size / 2.0 - (y - cy) * scale;
    let stroke = (size / 1000.0).max(0.2);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{size}" height="{size}" fill="white"/>"#
    );
    if p.model == Model::UnitDisc {
        let _ = writeln!(
            svg,
            r#"<circle class="boundary" cx="{:.4}" cy="{:.4}" r="{:.4}" fill="none" stroke="gray" stroke-width="{stroke:.3}"/>"#,
            sx(0.0),
            sy(0.0),
            scale
        );
    }
    let mut highlighted = vec![false; p.primal.len()];
    for &v in &opts.highlight {
        if v < highlighted.len() {
            highlighted[v] = true;
        }
    }
    if opts.show_dual {
        let _ = writeln!(
            svg,
            r#"<g class="dual" fill="none" stroke="steelblue" stroke-dasharray="4 3" stroke-width="{stroke:.3}">"#
        );
        for (f, c) in p.dual.iter().enumerate() {
            if let Some(c) = c {
                let _ = writeln!(
                    svg,
                    r#"<circle id="f{f}" cx="{:.4}" cy="{:.4}" r="{:.4}"/>"#,
                    sx(c.centre.re),
                    sy(c.centre.im),
                    c.radius * scale
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(
        svg,
        r#"<g class="primal" stroke="black" stroke-width="{stroke:.3}">"#
    );
    for (v, c) in p.primal.iter().enumerate() {
        let fill = if highlighted[v] { "orange" } else { "none" };
        let _ = writeln!(
            svg,
            r#"<circle id="v{v}" cx="{:.4}" cy="{:.4}" r="{:.4}" fill="{fill}"/>"#,
            sx(c.centre.re),
            sy(c.centre.im),
            c.radius * scale
        );
    }
    let _ = writeln!(svg, "</g>");
    if !opts.forest.is_empty() {
        let _ = writeln!(
            svg,
            r#"<g class="forest" stroke="firebrick" stroke-width="{:.3}">"#,
            2.0 * stroke
        );
        for (e, &(u, v)) in opts.forest.iter().enumerate() {
            if u >= p.primal.len() || v >= p.primal.len() {
                continue;
            }
            let (a, b) = (p.primal[u].centre, p.primal[v].centre);
            let _ = writeln!(
                svg,
                r#"<line id="e{e}" x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
                sx(a.re),
                sy(a.im),
                sx(b.re),
                sy(b.im)
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}
