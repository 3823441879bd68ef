//! METIS/Chaco graph file format.
//!
//! Header `n m [fmt [ncon]]`, then one line per vertex listing its 1-indexed
//! neighbors, each followed by the edge weight when the last `fmt` digit is
//! set, and preceded by a vertex weight when the second-to-last digit is set.
//! Lines starting with `%` are comments and may appear anywhere.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

#[derive(Clone, Copy, Debug)]
struct Format {
    edge_weights: bool,
    vertex_weights: bool,
}

fn parse_format(tok: &str, line: usize) -> Result<Format> {
    if tok.is_empty() || tok.len() > 3 || !tok.bytes().all(|b| b == b'0' || b == b'1') {
        return parse_err(line, format!("malformed fmt field `{tok}`"));
    }
    let bits: Vec<bool> = tok.bytes().rev().map(|b| b == b'1').collect();
    if bits.get(2).copied().unwrap_or(false) {
        return parse_err(line, "vertex sizes (fmt 100) are not supported");
    }
    Ok(Format {
        edge_weights: bits[0],
        vertex_weights: bits.get(1).copied().unwrap_or(false),
    })
}

fn parse_weight<W: Scalar>(tok: &str, line: usize, what: &str) -> Result<W> {
    let w: W = tok
        .parse()
        .or_else(|_| parse_err(line, format!("malformed {what} `{tok}`")))?;
    if !(w.is_finite() && w > W::zero()) {
        return parse_err(line, format!("{what} {tok} must be positive"));
    }
    Ok(w)
}

/// Parses a graph in METIS format.
pub fn parse_metis<W: Scalar>(text: &str) -> Result<Graph<W>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('%'));

    let (hline, header) = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some(h) => break h,
            None => return parse_err(1, "missing header line"),
        }
    };
    let htok: Vec<&str> = header.split_whitespace().collect();
    if htok.len() < 2 || htok.len() > 4 {
        return parse_err(hline, "header must be `n m [fmt [ncon]]`");
    }
    let n: usize = htok[0]
        .parse()
        .or_else(|_| parse_err(hline, format!("malformed vertex count `{}`", htok[0])))?;
    let m: usize = htok[1]
        .parse()
        .or_else(|_| parse_err(hline, format!("malformed edge count `{}`", htok[1])))?;
    let fmt = match htok.get(2) {
        Some(t) => parse_format(t, hline)?,
        None => Format { edge_weights: false, vertex_weights: false },
    };
    if let Some(t) = htok.get(3) {
        let ncon: usize = t
            .parse()
            .or_else(|_| parse_err(hline, format!("malformed ncon `{t}`")))?;
        if fmt.vertex_weights && ncon != 1 {
            return parse_err(hline, "only a single vertex weight per vertex is supported");
        }
    }

    let mut lists: Vec<Vec<(usize, W)>> = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    let mut vwgt = Vec::new();
    let mut entries = 0usize;
    let mut last_line = hline;
    for u in 0..n {
        // Trailing isolated vertices may be omitted entirely.
        let (ln, body) = lines.next().unwrap_or((last_line, ""));
        last_line = ln;
        line_of.push(ln);
        let mut toks = body.split_whitespace();
        if fmt.vertex_weights {
            match toks.next() {
                Some(t) => vwgt.push(parse_weight::<W>(t, ln, "vertex weight")?),
                None => return parse_err(ln, format!("vertex {} lacks its weight", u + 1)),
            }
        }
        let toks: Vec<&str> = toks.collect();
        let per = if fmt.edge_weights { 2 } else { 1 };
        if !toks.len().is_multiple_of(per) {
            return parse_err(ln, "neighbor without edge weight");
        }
        let deg = toks.len() / per;
        if deg > n.saturating_sub(1) {
            return parse_err(
                ln,
                format!("count mismatch: vertex {} lists {deg} neighbors but n = {n}", u + 1),
            );
        }
        entries += deg;
        if entries > 2 * m {
            return parse_err(
                ln,
                format!("count mismatch: more adjacency entries than header's {m} edges allow"),
            );
        }
        let mut row = Vec::with_capacity(deg);
        for chunk in toks.chunks(per) {
            let v: usize = chunk[0]
                .parse()
                .or_else(|_| parse_err(ln, format!("malformed neighbor `{}`", chunk[0])))?;
            if v == 0 || v > n {
                return parse_err(ln, format!("neighbor {v} outside 1..={n}"));
            }
            if v - 1 == u {
                return parse_err(ln, format!("self-loop at vertex {}", u + 1));
            }
            let w = if fmt.edge_weights {
                parse_weight::<W>(chunk[1], ln, "edge weight")?
            } else {
                W::one()
            };
            row.push((v - 1, w));
        }
        row.sort_by_key(|&(v, _)| v);
        if let Some(p) = row.windows(2).find(|p| p[0].0 == p[1].0) {
            return parse_err(ln, format!("duplicate edge to vertex {}", p[0].0 + 1));
        }
        lists.push(row);
    }
    for (ln, l) in lines {
        if !l.trim().is_empty() {
            return parse_err(ln, format!("unexpected data after {n} vertex lines"));
        }
    }
    if entries != 2 * m {
        return parse_err(
            last_line,
            format!("count mismatch: header declares {m} edges, adjacency lists hold {entries} entries"),
        );
    }
    for u in 0..n {
        for &(v, w) in &lists[u] {
            match lists[v].binary_search_by_key(&u, |&(x, _)| x) {
                Err(_) => {
                    return parse_err(
                        line_of[u],
                        format!("asymmetric adjacency: {} lists {} but not vice versa", u + 1, v + 1),
                    )
                }
                Ok(p) if lists[v][p].1 != w => {
                    return parse_err(
                        line_of[u],
                        format!("asymmetric weight on edge {{{}, {}}}", u + 1, v + 1),
                    )
                }
                Ok(_) => {}
            }
        }
    }
    let g = Graph::from_adjacency(lists)?;
    if fmt.vertex_weights {
        g.with_vertex_weights(vwgt)
    } else {
        Ok(g)
    }
}

pub fn read_metis<W: Scalar, R: Read>(mut reader: R) -> Result<Graph<W>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_metis(&text)
}

/// Serializes `g` in METIS format.
///
/// The fmt field is emitted only when needed: edge weights when some weight
/// differs from 1, vertex weights when the graph carries them. Weights print
/// via `Display`, which is integral for integral values and round-trips
/// exactly otherwise; [`parse_metis`] accepts both.
pub fn write_metis<W: Scalar>(g: &Graph<W>) -> String {
    let edge_w = g.edges().iter().any(|&(_, w)| w != W::one());
    let vertex_w = g.vertex_weights().is_some();
    let mut out = String::new();
    write!(out, "{} {}", g.n(), g.num_edges()).unwrap();
    match (vertex_w, edge_w) {
        (false, false) => {}
        (false, true) => out.push_str(" 1"),
        (true, false) => out.push_str(" 10"),
        (true, true) => out.push_str(" 11"),
    }
    out.push('\n');
    for u in 0..g.n() {
        let mut first = true;
        let mut sep = |out: &mut String| {
            if !first {
                out.push(' ');
            }
            first = false;
        };
        if vertex_w {
            sep(&mut out);
            write!(out, "{}", g.vertex_weight(u)).unwrap();
        }
        for (v, w) in g.neighbors(u) {
            sep(&mut out);
            write!(out, "{}", v + 1).unwrap();
            if edge_w {
                write!(out, " {w}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_metis_to<W: Scalar, O: Write>(g: &Graph<W>, mut out: O) -> Result<()> {
    out.write_all(write_metis(g).as_bytes())?;
    Ok(())
}

/// True when every edge and vertex weight is integral, i.e. the serialized
/// form is valid for strict integer-only METIS readers.
pub fn has_integral_weights<W: Scalar>(g: &Graph<W>) -> bool {
    g.edges().iter().all(|&(_, w)| w.is_integral())
        && g.vertex_weights().is_none_or(|vw| vw.iter().all(|w| w.is_integral()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            e => panic!("expected parse error, got {e}"),
        }
    }

    #[test]
    fn unweighted_path() {
        let g: Graph<f64> = parse_metis("3 2\n2\n1 3\n2\n").unwrap();
        let expect = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g, expect);
        assert_eq!(write_metis(&g), "3 2\n2\n1 3\n2\n");
    }

    #[test]
    fn weighted_path() {
        let text = "3 2 1\n2 5\n1 5 3 2\n2 2\n";
        let g: Graph<f64> = parse_metis(text).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(5.0));
        assert_eq!(g.edge_weight(1, 2), Some(2.0));
        assert_eq!(write_metis(&g), text);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::<f64>::empty(0);
        assert_eq!(write_metis(&g), "0 0\n");
        assert_eq!(parse_metis::<f64>("0 0\n").unwrap(), g);
    }

    #[test]
    fn count_mismatch_reports_line() {
        let err = parse_metis::<f64>("3 2\n2 3 1\n1 3\n2\n").unwrap_err();
        assert_eq!(line_of(err), 2);
        let err = parse_metis::<f64>("3 1\n2\n1 3\n2\n").unwrap_err();
        assert_eq!(line_of(err), 3);
        let err = parse_metis::<f64>("3 3\n2\n1 3\n2\n").unwrap_err();
        assert_eq!(line_of(err), 4);
    }

    #[test]
    fn comments_anywhere() {
        let g: Graph<f64> = parse_metis("% hello\n3 2\n% a\n2\n1 3\n% b\n2\n% end\n").unwrap();
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn error_cases() {
        // asymmetric: 1 lists 2, 2 does not list 1
        assert_eq!(line_of(parse_metis::<f64>("3 2\n2\n3\n1 2\n").unwrap_err()), 2);
        // self-loop
        assert_eq!(line_of(parse_metis::<f64>("2 1\n1\n\n").unwrap_err()), 2);
        // zero weight
        assert_eq!(line_of(parse_metis::<f64>("2 1 1\n2 0\n1 0\n").unwrap_err()), 2);
        // asymmetric weights
        assert_eq!(line_of(parse_metis::<f64>("2 1 1\n2 3\n1 4\n").unwrap_err()), 2);
        // malformed token
        assert_eq!(line_of(parse_metis::<f64>("2 1\nx\n1\n").unwrap_err()), 2);
        // duplicate edge
        assert_eq!(line_of(parse_metis::<f64>("3 2\n2 2\n1 1\n\n").unwrap_err()), 2);
        // neighbor out of range
        assert_eq!(line_of(parse_metis::<f64>("2 1\n3\n1\n").unwrap_err()), 2);
        assert!(parse_metis::<f64>("").is_err());
        assert!(parse_metis::<f64>("3 2 100\n").is_err());
    }

    #[test]
    fn vertex_weights_round_trip() {
        let text = "3 2 11\n4 2 5\n1 1 5 3 2\n7 2 2\n";
        let g: Graph<f64> = parse_metis(text).unwrap();
        assert_eq!(g.vertex_weights(), Some(&[4.0, 1.0, 7.0][..]));
        assert_eq!(write_metis(&g), text);
        let g: Graph<f64> = parse_metis("2 1 10 1\n3 2\n1 1\n").unwrap();
        assert_eq!(write_metis(&g), "2 1 10\n3 2\n1 1\n");
    }

    #[test]
    fn fractional_weights_round_trip() {
        let g = Graph::from_edges(3, [(0, 1, 0.1), (1, 2, 2.5)]).unwrap();
        assert!(!has_integral_weights(&g));
        let back: Graph<f64> = parse_metis(&write_metis(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn isolated_trailing_vertex() {
        let g: Graph<f64> = parse_metis("3 1\n2\n1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degree(2), 0);
        assert_eq!(write_metis(&g), "3 1\n2\n1\n\n");
    }
}
