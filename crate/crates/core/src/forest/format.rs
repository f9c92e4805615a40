//! The `forest v1` format: a header line, then one edge id per line.

use crate::error::{Error, Result};
use crate::graph::EdgeId;

pub const HEADER: &str = "forest v1";

pub fn write_forest(edges: &[EdgeId]) -> String {
    let mut out = String::with_capacity(HEADER.len() + 8 * edges.len());
    out.push_str(HEADER);
    out.push('\n');
    for e in edges {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

pub fn read_forest(text: &str) -> Result<Vec<EdgeId>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::parse(1, 1, format!("expected header `{HEADER}`"))),
    }
    let mut edges = Vec::new();
    for (i, line) in lines {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let col = line.len() - line.trim_start().len() + 1;
        let e = tok
            .parse()
            .map_err(|_| Error::parse(i + 1, col, format!("expected an edge id, found `{tok}`")))?;
        edges.push(e);
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = write_forest(&[0, 3, 17]);
        assert_eq!(text, "forest v1\n0\n3\n17\n");
        assert_eq!(write_forest(&read_forest(&text).unwrap()), text);
        assert_eq!(read_forest("forest v1\n").unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn bad_lines_are_located() {
        match read_forest("forest v1\n1\n  x\n") {
            Err(Error::Parse {
                line: 3, column: 3, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
