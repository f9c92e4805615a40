//! The `planenet v1` text format.
//!
//! ```text
//! planenet v1
//! vertices 3
//! 0 1:0 2:2
//! 1 2:1 0:0
//! 2 0:2 1:1
//! edges 3
//! 0 1
//! 1 1
//! 2 0.5
//! outer 1
//! boundary 2
//! ```
//!
//! Vertex lines list `neighbour:edge` in counterclockwise order. The `outer`
//! and `boundary` lines are optional; blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;

use super::{OuterFace, PlaneNetwork};
use crate::error::{Error, Result};

pub const HEADER: &str = "planenet v1";

pub fn write_planenet(net: &PlaneNetwork) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "vertices {}", net.vertex_count());
    for (v, list) in net.rotation_system().iter().enumerate() {
        let _ = write!(out, "{v}");
        for (w, e) in list {
            let _ = write!(out, " {w}:{e}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "edges {}", net.edge_count());
    for (e, c) in net.conductances().iter().enumerate() {
        let _ = writeln!(out, "{e} {c}");
    }
    let _ = writeln!(out, "outer {}", net.outer_face());
    if let Some(b) = net.boundary_vertex() {
        let _ = writeln!(out, "boundary {b}");
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank, non-comment line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| {
            Error::parse(
                self.last + 1,
                1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn number<T: std::str::FromStr>(line: usize, col: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, col, format!("expected {what}, found `{tok}`")))
}

fn keyword_count(lines: &mut Lines, keyword: &str) -> Result<usize> {
    let (ln, line) = lines.expect(keyword)?;
    let toks = tokens(line);
    match toks.as_slice() {
        [(_, k), (c, n)] if *k == keyword => number(ln, *c, n, "a count"),
        [(c, k), ..] if *k != keyword => Err(Error::parse(
            ln,
            *c,
            format!("expected `{keyword} <count>`"),
        )),
        _ => Err(Error::parse(ln, 1, format!("expected `{keyword} <count>`"))),
    }
}

pub fn read_planenet(text: &str) -> Result<PlaneNetwork> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (ln, header) = lines.expect("header")?;
    if header.trim() != HEADER {
        return Err(Error::parse(ln, 1, format!("expected header `{HEADER}`")));
    }
    let n = keyword_count(&mut lines, "vertices")?;
    let mut rotation = Vec::with_capacity(n);
    for v in 0..n {
        let (ln, line) = lines.expect("a vertex line")?;
        let toks = tokens(line);
        let (c0, id) = toks[0];
        let id: usize = number(ln, c0, id, "a vertex id")?;
        if id != v {
            return Err(Error::parse(
                ln,
                c0,
                format!("expected vertex {v}, found {id}"),
            ));
        }
        let mut list = Vec::with_capacity(toks.len() - 1);
        for &(col, tok) in &toks[1..] {
            let Some((w, e)) = tok.split_once(':') else {
                return Err(Error::parse(
                    ln,
                    col,
                    format!("expected `neighbour:edge`, found `{tok}`"),
                ));
            };
            let w: usize = number(ln, col, w, "a neighbour id")?;
            let e: usize = number(ln, col + tok.find(':').unwrap_or(0) + 1, e, "an edge id")?;
            if w >= n {
                return Err(Error::parse(ln, col, format!("neighbour {w} out of range")));
            }
            list.push((w, e));
        }
        rotation.push(list);
    }
    let m = keyword_count(&mut lines, "edges")?;
    let mut conductance = Vec::with_capacity(m);
    for e in 0..m {
        let (ln, line) = lines.expect("an edge line")?;
        let toks = tokens(line);
        if toks.len() != 2 {
            return Err(Error::parse(ln, 1, "expected `<edge id> <conductance>`"));
        }
        let id: usize = number(ln, toks[0].0, toks[0].1, "an edge id")?;
        if id != e {
            return Err(Error::parse(
                ln,
                toks[0].0,
                format!("expected edge {e}, found {id}"),
            ));
        }
        let c: f64 = number(ln, toks[1].0, toks[1].1, "a conductance")?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::parse(
                ln,
                toks[1].0,
                format!("conductance must be positive and finite, found {c}"),
            ));
        }
        conductance.push(c);
    }
    let mut outer = OuterFace::Largest;
    let mut boundary = None;
    while let Some((ln, line)) = lines.next() {
        let toks = tokens(line);
        match toks.as_slice() {
            [(_, "outer"), (c, f)] => outer = OuterFace::Face(number(ln, *c, f, "a face id")?),
            [(_, "boundary"), (c, b)] => {
                let b: usize = number(ln, *c, b, "a vertex id")?;
                if b >= n {
                    return Err(Error::parse(
                        ln,
                        *c,
                        format!("boundary vertex {b} out of range"),
                    ));
                }
                boundary = Some(b);
            }
            [(c, other), ..] => return Err(Error::parse(ln, *c, format!("unexpected `{other}`"))),
            [] => unreachable!("blank lines are skipped"),
        }
    }
    Ok(PlaneNetwork::from_rotation_system(&rotation, conductance, outer)?.with_boundary(boundary))
}
