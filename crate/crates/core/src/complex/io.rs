//! Plain-text complex description.
//!
//! ```text
//! # comment
//! [vertices]
//! <id> [weight]
//! [edges]
//! <id> <tail-id> <head-id> [weight]
//! [faces]
//! <id> <edge-id> -<edge-id> ...
//! ```
//!
//! A leading `-` on a face entry walks that edge from head to tail. Weights
//! default to 1.

use std::fmt::Write as _;

use super::{ConfigComplex, DirEdge, Edge, Face, Vertex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Vertices,
    Edges,
    Faces,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<f64> {
    match tok {
        None => Ok(1.0),
        Some(t) => t.parse().map_err(|_| parse_err(line, format!("bad weight {t:?}"))),
    }
}

pub fn parse_complex(text: &str) -> Result<ConfigComplex> {
    let mut section = Section::None;
    let mut vertices = Vec::new();
    let mut vertex_ids = std::collections::HashMap::new();
    let mut edges = Vec::new();
    let mut edge_ids = std::collections::HashMap::new();
    let mut faces = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[vertices]" => {
                section = Section::Vertices;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            "[faces]" => {
                section = Section::Faces;
                continue;
            }
            _ if line.starts_with('[') => return Err(parse_err(line_no, format!("unknown section {line}"))),
            _ => {}
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(parse_err(line_no, "entry before any section header")),
            Section::Vertices => {
                if toks.len() > 2 {
                    return Err(parse_err(line_no, "vertex line takes an id and an optional weight"));
                }
                vertex_ids.insert(toks[0].to_string(), vertices.len());
                vertices.push(Vertex { id: toks[0].into(), weight: parse_weight(toks.get(1).copied(), line_no)? });
            }
            Section::Edges => {
                if !(3..=4).contains(&toks.len()) {
                    return Err(parse_err(line_no, "edge line is: id tail head [weight]"));
                }
                let lookup = |id: &str| {
                    vertex_ids.get(id).copied().ok_or_else(|| parse_err(line_no, format!("unknown vertex {id}")))
                };
                edge_ids.insert(toks[0].to_string(), edges.len());
                edges.push(Edge {
                    id: toks[0].into(),
                    tail: lookup(toks[1])?,
                    head: lookup(toks[2])?,
                    weight: parse_weight(toks.get(3).copied(), line_no)?,
                });
            }
            Section::Faces => {
                if toks.len() < 2 {
                    return Err(parse_err(line_no, "face line is: id edge..."));
                }
                let boundary = toks[1..]
                    .iter()
                    .map(|t| {
                        let (forward, id) = match t.strip_prefix('-') {
                            Some(id) => (false, id),
                            None => (true, t.strip_prefix('+').unwrap_or(t)),
                        };
                        edge_ids
                            .get(id)
                            .map(|&edge| DirEdge { edge, forward })
                            .ok_or_else(|| parse_err(line_no, format!("unknown edge {id}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                faces.push(Face { id: toks[0].into(), boundary });
            }
        }
    }
    ConfigComplex::new(vertices, edges, faces)
}

/// Canonical text form; `parse_complex(&to_text(c))` rebuilds `c`.
pub fn to_text(c: &ConfigComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} vertices, {} edges, {} faces",
        c.num_vertices(),
        c.num_edges(),
        c.num_faces()
    );
    out.push_str("[vertices]\n");
    for v in c.vertices() {
        let _ = writeln!(out, "{} {}", v.id, v.weight);
    }
    out.push_str("[edges]\n");
    for e in c.edges() {
        let _ = writeln!(out, "{} {} {} {}", e.id, c.vertices()[e.tail].id, c.vertices()[e.head].id, e.weight);
    }
    out.push_str("[faces]\n");
    for f in c.faces() {
        out.push_str(&f.id);
        for d in &f.boundary {
            let sign = if d.forward { "" } else { "-" };
            let _ = write!(out, " {sign}{}", c.edges()[d.edge].id);
        }
        out.push('\n');
    }
    out
}
