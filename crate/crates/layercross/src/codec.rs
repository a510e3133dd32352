//! Text codecs for instances (`.lgr`), drawings (`.ord`), and planarity
//! constraint files.
//!
//! `.lgr` (ASCII, LF):
//! ```text
//! c <comment>              ignored
//! p lgr <h> <n> <m> <k>    exactly one, first non-comment line
//! n <id> <layer>           one per vertex, ids 1..n
//! e <u> <v> [<mult>]       m lines; mult defaults to 1
//! ```
//!
//! `.ord`:
//! ```text
//! p ord <h> <n>
//! o <layer> <id> <id> ...  one line per layer, left to right
//! ```
//!
//! Encoding is canonical: vertex lines ascending by id, edge lines sorted by
//! (min endpoint, max endpoint), multiplicity omitted when 1. Decoding then
//! re-encoding reproduces the canonical bytes exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Drawing, GraphError, Instance, LayeredGraph, VertexId};
use crate::planarity::OrderConstraints;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("line {0}: {1}")]
    Invariant(usize, GraphError),
    #[error("missing problem line")]
    MissingHeader,
}

fn parse_fields(line: &str) -> Vec<&str> {
    line.split_ascii_whitespace().collect()
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize, what: &str) -> Result<T, CodecError> {
    s.parse()
        .map_err(|_| CodecError::Parse(lineno, format!("invalid {what}: {s:?}")))
}

/// Parses a `.lgr` instance. Repeated `e` lines for the same endpoint pair
/// are merged by summing multiplicities.
pub fn decode_instance(text: &str) -> Result<Instance, CodecError> {
    let mut header: Option<(u8, usize, usize, u64)> = None;
    let mut header_line = 0usize;
    let mut layer_of: Vec<u8> = Vec::new();
    let mut vertex_seen: Vec<bool> = Vec::new();
    let mut edges: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let f = parse_fields(line);
        match f[0] {
            "p" => {
                if header.is_some() {
                    return Err(CodecError::Parse(lineno, "duplicate problem line".into()));
                }
                if f.len() != 6 || f[1] != "lgr" {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `p lgr <h> <n> <m> <k>`".into(),
                    ));
                }
                let h: u8 = num(f[2], lineno, "layer count")?;
                let n: usize = num(f[3], lineno, "vertex count")?;
                let m: usize = num(f[4], lineno, "edge count")?;
                let k: u64 = num(f[5], lineno, "budget")?;
                header = Some((h, n, m, k));
                header_line = lineno;
                layer_of = vec![0; n + 1];
                vertex_seen = vec![false; n + 1];
            }
            "n" => {
                let (_, n, _, _) = header.ok_or(CodecError::Parse(
                    lineno,
                    "vertex before problem line".into(),
                ))?;
                if f.len() != 3 {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `n <id> <layer>`".into(),
                    ));
                }
                let id: usize = num(f[1], lineno, "vertex id")?;
                let layer: u8 = num(f[2], lineno, "layer")?;
                if id == 0 || id > n {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("vertex id {id} out of 1..={n}"),
                    ));
                }
                if vertex_seen[id] {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("vertex {id} defined twice"),
                    ));
                }
                vertex_seen[id] = true;
                layer_of[id] = layer;
            }
            "e" => {
                if header.is_none() {
                    return Err(CodecError::Parse(lineno, "edge before problem line".into()));
                }
                if f.len() != 3 && f.len() != 4 {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `e <u> <v> [<mult>]`".into(),
                    ));
                }
                let u: u32 = num(f[1], lineno, "endpoint")?;
                let v: u32 = num(f[2], lineno, "endpoint")?;
                let mult: u64 = if f.len() == 4 {
                    num(f[3], lineno, "multiplicity")?
                } else {
                    1
                };
                *edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
            }
            other => {
                return Err(CodecError::Parse(
                    lineno,
                    format!("unknown line kind {other:?}"),
                ));
            }
        }
    }
    let (h, n, m, k) = header.ok_or(CodecError::MissingHeader)?;
    for id in 1..=n {
        if !vertex_seen[id] {
            return Err(CodecError::Parse(
                header_line,
                format!("vertex {id} never defined"),
            ));
        }
    }
    if edges.len() != m {
        return Err(CodecError::Parse(
            header_line,
            format!(
                "problem line declares m={m}, found {} distinct edges",
                edges.len()
            ),
        ));
    }
    let edge_list: Vec<(u32, u32, u64)> = edges
        .into_iter()
        .map(|((u, v), mult)| (u, v, mult))
        .collect();
    let graph = LayeredGraph::try_new(h, layer_of, edge_list)
        .map_err(|e| CodecError::Invariant(header_line, e))?;
    Ok(Instance::new(graph, k))
}

/// Canonical `.lgr` text for an instance.
pub fn encode_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    out.push_str(&format!("p lgr {} {} {} {}\n", g.h(), g.n(), g.m(), inst.k));
    for v in g.vertices() {
        out.push_str(&format!("n {} {}\n", v, g.layer_of(v)));
    }
    let mut lines: Vec<(u32, u32, u64)> = g
        .edges()
        .iter()
        .map(|e| (e.u.0.min(e.v.0), e.u.0.max(e.v.0), e.mult))
        .collect();
    lines.sort_unstable();
    for (u, v, mult) in lines {
        if mult == 1 {
            out.push_str(&format!("e {u} {v}\n"));
        } else {
            out.push_str(&format!("e {u} {v} {mult}\n"));
        }
    }
    out
}

/// Parses a `.ord` drawing. Layer orders default to empty; every layer line
/// may appear at most once.
pub fn decode_drawing(text: &str) -> Result<Drawing, CodecError> {
    let mut header: Option<(u8, usize)> = None;
    let mut orders: Vec<Option<Vec<VertexId>>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let f = parse_fields(line);
        match f[0] {
            "p" => {
                if header.is_some() {
                    return Err(CodecError::Parse(lineno, "duplicate problem line".into()));
                }
                if f.len() != 4 || f[1] != "ord" {
                    return Err(CodecError::Parse(lineno, "expected `p ord <h> <n>`".into()));
                }
                let h: u8 = num(f[2], lineno, "layer count")?;
                let _n: usize = num(f[3], lineno, "vertex count")?;
                header = Some((h, _n));
                orders = vec![None; h as usize];
            }
            "o" => {
                let (h, _) = header.ok_or(CodecError::Parse(
                    lineno,
                    "order before problem line".into(),
                ))?;
                if f.len() < 2 {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `o <layer> <id>...`".into(),
                    ));
                }
                let layer: u8 = num(f[1], lineno, "layer")?;
                if layer < 1 || layer > h {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("layer {layer} out of 1..={h}"),
                    ));
                }
                if orders[layer as usize - 1].is_some() {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("layer {layer} listed twice"),
                    ));
                }
                let mut ord = Vec::with_capacity(f.len() - 2);
                for s in &f[2..] {
                    ord.push(VertexId(num(s, lineno, "vertex id")?));
                }
                orders[layer as usize - 1] = Some(ord);
            }
            other => {
                return Err(CodecError::Parse(
                    lineno,
                    format!("unknown line kind {other:?}"),
                ));
            }
        }
    }
    if header.is_none() {
        return Err(CodecError::MissingHeader);
    }
    Ok(Drawing::new(
        orders.into_iter().map(|o| o.unwrap_or_default()).collect(),
    ))
}

pub fn encode_drawing(drawing: &Drawing) -> String {
    let n: usize = drawing.orders.iter().map(|o| o.len()).sum();
    let mut out = format!("p ord {} {}\n", drawing.orders.len(), n);
    for (i, ord) in drawing.orders.iter().enumerate() {
        out.push_str(&format!("o {}", i + 1));
        for v in ord {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

/// Parses a constraints file: `chain <layer> <id> <id> ...` and
/// `pair <layer> <s> <t>` lines.
pub fn decode_constraints(text: &str, h: u8) -> Result<OrderConstraints, CodecError> {
    let mut oc = OrderConstraints::empty(h);
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        // `chain` also starts with c, so comments need the full `c ` prefix.
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let f = parse_fields(line);
        match f[0] {
            "chain" => {
                if f.len() < 3 {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `chain <layer> <id>...`".into(),
                    ));
                }
                let layer: u8 = num(f[1], lineno, "layer")?;
                if layer < 1 || layer > h {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("layer {layer} out of 1..={h}"),
                    ));
                }
                let mut chain = Vec::new();
                for s in &f[2..] {
                    chain.push(VertexId(num(s, lineno, "vertex id")?));
                }
                oc.add_chain(layer, chain);
            }
            "pair" => {
                if f.len() != 4 {
                    return Err(CodecError::Parse(
                        lineno,
                        "expected `pair <layer> <s> <t>`".into(),
                    ));
                }
                let layer: u8 = num(f[1], lineno, "layer")?;
                if layer < 1 || layer > h {
                    return Err(CodecError::Parse(
                        lineno,
                        format!("layer {layer} out of 1..={h}"),
                    ));
                }
                let s = VertexId(num(f[2], lineno, "vertex id")?);
                let t = VertexId(num(f[3], lineno, "vertex id")?);
                oc.set_pair(layer, s, t);
            }
            other => {
                return Err(CodecError::Parse(
                    lineno,
                    format!("unknown line kind {other:?}"),
                ));
            }
        }
    }
    Ok(oc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance_roundtrips_byte_identically() {
        let text = "c tiny\np lgr 2 2 1 0\nn 2 2\nn 1 1\ne 2 1\n";
        let inst = decode_instance(text).unwrap();
        let canon = encode_instance(&inst);
        assert_eq!(canon, "p lgr 2 2 1 0\nn 1 1\nn 2 2\ne 1 2\n");
        let again = decode_instance(&canon).unwrap();
        assert_eq!(encode_instance(&again), canon);
    }

    #[test]
    fn layer_skipping_edge_fails_at_invariant_stage() {
        let text = "p lgr 3 3 1 0\nn 1 1\nn 2 2\nn 3 3\ne 1 3\n";
        match decode_instance(text) {
            Err(CodecError::Invariant(_, GraphError::NonConsecutiveLayers(..))) => {}
            other => panic!("expected invariant error, got {other:?}"),
        }
    }

    #[test]
    fn drawing_roundtrip() {
        let text = "p ord 2 4\no 1 2 1\no 2 3 4\n";
        let d = decode_drawing(text).unwrap();
        assert_eq!(encode_drawing(&d), text);
    }
}
