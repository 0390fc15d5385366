//! Finite combinatorial 2-complexes standing in for configuration spaces.
//!
//! A [`ConfigComplex`] carries weighted vertices, undirected edges that can
//! be walked in either direction, and faces given as closed walks that are
//! declared homotopically trivial. Every complex is validated on
//! construction and immutable afterwards.

mod builders;
pub mod io;
mod region;

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use builders::{
    build_cycle, build_cycle_quotient, build_grid_with_holes, build_presentation_complex,
    build_two_particle_space, CellRect,
};
pub use region::{star_region, Region};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

/// An edge traversed in a chosen direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirEdge {
    pub fn forward(edge: usize) -> Self {
        DirEdge { edge, forward: true }
    }

    pub fn backward(edge: usize) -> Self {
        DirEdge { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        DirEdge { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub id: String,
    pub boundary: Vec<DirEdge>,
}

#[derive(Debug, Clone)]
pub struct ConfigComplex {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// Directed edges leaving each vertex, sorted by (target, edge, direction).
    outgoing: Vec<Vec<DirEdge>>,
}

impl ConfigComplex {
    /// Validates and assembles a complex.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, faces: Vec<Face>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("complex needs at least one vertex"));
        }
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if !(v.weight > 0.0 && v.weight.is_finite()) {
                return Err(invalid(format!("vertex {} has non-positive weight {}", v.id, v.weight)));
            }
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(invalid(format!("edge {} references an unknown vertex", e.id)));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(invalid(format!("edge {} has non-positive weight {}", e.id, e.weight)));
            }
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate edge id {}", e.id)));
            }
        }
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.tail].push(DirEdge::forward(i));
            outgoing[e.head].push(DirEdge::backward(i));
        }
        let head_of = |d: &DirEdge| {
            let e = &edges[d.edge];
            if d.forward { e.head } else { e.tail }
        };
        for out in &mut outgoing {
            out.sort_by_key(|d| (head_of(d), d.edge, !d.forward));
        }
        let complex = ConfigComplex {
            vertices,
            edges,
            faces: Vec::new(),
            vertex_index,
            edge_index,
            outgoing,
        };
        let components = complex.component_count();
        if components != 1 {
            return Err(Error::NotConnected { components });
        }
        let mut face_ids = HashSet::new();
        for f in &faces {
            if !face_ids.insert(f.id.as_str()) {
                return Err(invalid(format!("duplicate face id {}", f.id)));
            }
            complex.check_closed_walk(&f.boundary).map_err(|m| invalid(format!("face {}: {m}", f.id)))?;
        }
        Ok(ConfigComplex { faces, ..complex })
    }

    fn check_closed_walk(&self, walk: &[DirEdge]) -> std::result::Result<(), String> {
        if walk.is_empty() {
            return Err("empty boundary".into());
        }
        for d in walk {
            if d.edge >= self.edges.len() {
                return Err(format!("unknown edge index {}", d.edge));
            }
        }
        for (i, d) in walk.iter().enumerate() {
            let next = walk[(i + 1) % walk.len()];
            if self.target(*d) != self.source(next) {
                return Err(format!("boundary is not a closed walk at position {i}"));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// First Betti number of the (connected) 1-skeleton.
    pub fn betti1(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn source(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.forward { e.tail } else { e.head }
    }

    pub fn target(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.forward { e.head } else { e.tail }
    }

    pub fn outgoing(&self, v: usize) -> &[DirEdge] {
        &self.outgoing[v]
    }

    /// Number of directed edges leaving `v` (loops count twice).
    pub fn degree(&self, v: usize) -> usize {
        self.outgoing[v].len()
    }

    fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for d in &self.outgoing[v] {
                    let w = self.target(*d);
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Graph distances from `source`; unreachable vertices get `usize::MAX`.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for d in &self.outgoing[v] {
                let w = self.target(*d);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The subcomplex spanned by `vertices`, with all induced edges and all
    /// faces whose boundary uses induced edges only. Returns the subcomplex
    /// and, for each of its vertices, the index in `self`.
    pub fn induced(&self, vertices: &[usize]) -> Result<(ConfigComplex, Vec<usize>)> {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut local = HashMap::new();
        for (i, &v) in keep.iter().enumerate() {
            local.insert(v, i);
        }
        let new_vertices = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let mut edge_map = HashMap::new();
        let mut new_edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if let (Some(&t), Some(&h)) = (local.get(&e.tail), local.get(&e.head)) {
                edge_map.insert(i, new_edges.len());
                new_edges.push(Edge { id: e.id.clone(), tail: t, head: h, weight: e.weight });
            }
        }
        let new_faces = self
            .faces
            .iter()
            .filter_map(|f| {
                let boundary: Option<Vec<DirEdge>> = f
                    .boundary
                    .iter()
                    .map(|d| edge_map.get(&d.edge).map(|&e| DirEdge { edge: e, forward: d.forward }))
                    .collect();
                boundary.map(|boundary| Face { id: f.id.clone(), boundary })
            })
            .collect();
        Ok((ConfigComplex::new(new_vertices, new_edges, new_faces)?, keep))
    }
}
