//! The `dcp v1` text format for double circle packings.
//!
//! ```text
//! dcp v1
//! model disc
//! residuals <tangency> <orthogonality> <angle_sum>
//! v <id> <x> <y> <r> [h]
//! f <id> <x> <y> <r>
//! ```
//!
//! Vertex lines come first in id order; a trailing `h` marks a horocycle.
//! Faces without a circle are omitted.

use std::fmt::Write as _;

use super::{Circle, DoublePacking, Model, Residuals};
use crate::error::{Error, Result};

pub const HEADER: &str = "dcp v1";

pub fn write_packing(p: &DoublePacking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "model {}", p.model.name());
    let r = p.residuals;
    let _ = writeln!(
        out,
        "residuals {:.16e} {:.16e} {:.16e}",
        r.tangency, r.orthogonality, r.angle_sum
    );
    for (v, c) in p.primal.iter().enumerate() {
        let _ = write!(
            out,
            "v {v} {:.16e} {:.16e} {:.16e}",
            c.centre.re, c.centre.im, c.radius
        );
        out.push_str(if p.horocycle[v] { " h\n" } else { "\n" });
    }
    for (f, c) in p.dual.iter().enumerate() {
        if let Some(c) = c {
            let _ = writeln!(
                out,
                "f {f} {:.16e} {:.16e} {:.16e}",
                c.centre.re, c.centre.im, c.radius
            );
        }
    }
    out
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(&'a str, usize)> {
        let rest = &self.text[self.pos..];
        let skip = rest.len() - rest.trim_start().len();
        let start = self.pos + skip;
        let tok = self.text[start..].split_whitespace().next();
        match tok {
            Some(t) => {
                self.pos = start + t.len();
                Ok((t, start + 1))
            }
            None => Err(Error::parse(
                self.line,
                self.text.len() + 1,
                format!("expected {what}"),
            )),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (t, col) = self.next(what)?;
        t.parse()
            .map_err(|_| Error::parse(self.line, col, format!("expected {what}, found `{t}`")))
    }

    fn optional(&mut self) -> Option<(&'a str, usize)> {
        self.next("").ok()
    }
}

pub fn read_packing(text: &str) -> Result<DoublePacking> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        Some((i, _)) => return Err(Error::parse(i, 1, format!("expected header `{HEADER}`"))),
        None => return Err(Error::parse(1, 1, format!("expected header `{HEADER}`"))),
    }
    let mut model = None;
    let mut residuals = Residuals::default();
    let mut primal: Vec<Circle> = Vec::new();
    let mut horocycle = Vec::new();
    let mut dual: Vec<Option<Circle>> = Vec::new();
    for (line, text) in lines {
        let mut c = Cursor { line, text, pos: 0 };
        let (kind, col) = c.next("a record")?;
        match kind {
            "model" => {
                let (name, col) = c.next("a model name")?;
                model = Some(match name {
                    "disc" => Model::UnitDisc,
                    "euclidean" => Model::EuclideanPlane,
                    _ => return Err(Error::parse(line, col, format!("unknown model `{name}`"))),
                });
            }
            "residuals" => {
                residuals = Residuals {
                    tangency: c.number("a residual")?,
                    orthogonality: c.number("a residual")?,
                    angle_sum: c.number("a residual")?,
                };
            }
            "v" | "f" => {
                let (id_tok, id_col) = c.next("an id")?;
                let id: usize = id_tok.parse().map_err(|_| {
                    Error::parse(line, id_col, format!("expected an id, found `{id_tok}`"))
                })?;
                let x: f64 = c.number("a coordinate")?;
                let y: f64 = c.number("a coordinate")?;
                let r: f64 = c.number("a radius")?;
                let circle = Circle::new(x, y, r);
                if kind == "v" {
                    if id != primal.len() {
                        return Err(Error::parse(
                            line,
                            id_col,
                            format!("expected vertex {}", primal.len()),
                        ));
                    }
                    let h = match c.optional() {
                        None => false,
                        Some(("h", _)) => true,
                        Some((t, col)) => {
                            return Err(Error::parse(line, col, format!("unexpected `{t}`")))
                        }
                    };
                    primal.push(circle);
                    horocycle.push(h);
                } else {
                    if id < dual.len() {
                        return Err(Error::parse(
                            line,
                            id_col,
                            format!("face {id} out of order"),
                        ));
                    }
                    dual.resize(id, None);
                    dual.push(Some(circle));
                }
            }
            _ => return Err(Error::parse(line, col, format!("unknown record `{kind}`"))),
        }
    }
    let model = model.ok_or_else(|| Error::parse(2, 1, "missing `model` line"))?;
    Ok(DoublePacking {
        model,
        primal,
        dual,
        horocycle,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::packing::{solve_double_packing, PackingOptions};

    #[test]
    fn byte_identical_round_trip() {
        let net =
            generators::tessellation_ball(&generators::TessellationSpec::new(3, 7, 2)).unwrap();
        let p = solve_double_packing(&net, &PackingOptions::new(Model::UnitDisc)).unwrap();
        let text = write_packing(&p);
        let q = read_packing(&text).unwrap();
        assert_eq!(write_packing(&q), text);
        assert_eq!(q.horocycle, p.horocycle);
    }

    #[test]
    fn errors_are_located() {
        let err = read_packing("dcp v1\nmodel disc\nv 0 1.0 oops 0.5\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 3,
                    column: 9,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = read_packing("dcp v1\nmodel sphere\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 7,
                    ..
                }
            ),
            "{err:?}"
        );
    }
}
