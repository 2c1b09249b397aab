//! Plain-text graph files: a header line `n m` followed by `m` lines `u v`
//! with `u < v`, ASCII decimal, every line terminated by `\n`.

use std::io::Write;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let Some(body) = text.strip_suffix('\n') else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing final newline".into(),
        });
    };
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let (n, m) = parse_pair(header, 1)?;
    let mut edges = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let (u, v) = parse_pair(line, lineno)?;
        if u >= v {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected u < v, got `{line}`"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header declares {m} edges, file has {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let mut parts = line.split(' ');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err(format!("expected two space-separated integers, got `{line}`")));
    };
    Ok((parse_decimal(a).ok_or_else(|| err(format!("bad integer `{a}`")))?,
        parse_decimal(b).ok_or_else(|| err(format!("bad integer `{b}`")))?))
}

fn parse_decimal(s: &str) -> Option<usize> {
    let canonical = !s.is_empty()
        && s.bytes().all(|c| c.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'));
    if canonical {
        s.parse().ok()
    } else {
        None
    }
}

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    let mut result = Ok(());
    g.for_each_edge(|_, u, v| {
        if result.is_ok() {
            result = writeln!(out, "{u} {v}");
        }
    });
    result?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::hypercube;

    #[test]
    fn round_trip() {
        let g = hypercube(4).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("16 32\n0 1\n"));
        let h = parse_graph(&text).unwrap();
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn rejects_deviations() {
        for bad in [
            "2 1\n0 1",        // no final newline
            "2 1\n1 0\n",      // u > v
            "2 1\n0  1\n",     // double space
            "2 1\r\n0 1\r\n",  // CRLF
            "2 2\n0 1\n",      // wrong count
            "2 1\n0 1\n\n",    // trailing blank line
            "2 1\n+0 1\n",     // sign
            "02 1\n0 1\n",     // leading zero
            "3 2\n0 1\n0 1\n", // duplicate
            "2 1\n0 2\n",      // out of range
        ] {
            assert!(parse_graph(bad).is_err(), "accepted {bad:?}");
        }
        assert_eq!(parse_graph("3 0\n").unwrap().n(), 3);
    }
}
