use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{ConfigComplex, DirEdge, Edge, Face, Vertex};
use crate::error::{invalid, Error, Result};
use crate::group::word::Word;

fn pad(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(2)
}

fn unit_vertex(id: String) -> Vertex {
    Vertex { id, weight: 1.0 }
}

fn unit_edge(id: String, tail: usize, head: usize) -> Edge {
    Edge { id, tail, head, weight: 1.0 }
}

/// Cycle graph `C_n` with edges `v_i → v_{i+1 mod n}` and no faces.
pub fn build_cycle(n: usize) -> Result<ConfigComplex> {
    if n < 3 {
        return Err(invalid(format!("cycle needs n >= 3, got {n}")));
    }
    let w = pad(n);
    let vertices = (0..n).map(|i| unit_vertex(format!("v{i:0w$}"))).collect();
    let edges = (0..n).map(|i| unit_edge(format!("e{i:0w$}"), i, (i + 1) % n)).collect();
    ConfigComplex::new(vertices, edges, Vec::new())
}

/// `C_n` with a single face wrapping the cycle `order` times, so that the
/// fundamental group becomes `Z_order`.
pub fn build_cycle_quotient(n: usize, order: usize) -> Result<ConfigComplex> {
    if order == 0 {
        return Err(invalid("quotient order must be positive"));
    }
    let base = build_cycle(n)?;
    let boundary: Vec<DirEdge> = (0..order).flat_map(|_| (0..n).map(DirEdge::forward)).collect();
    let face = Face { id: format!("wrap{order}"), boundary };
    ConfigComplex::new(base.vertices, base.edges, vec![face])
}

/// One vertex, one loop edge per generator and one face per relator.
///
/// Face boundaries are laid out so that the loop they trace, read in
/// composition order (last edge leftmost), spells the relator.
pub fn build_presentation_complex(generators: &[String], relators: &[Word]) -> Result<ConfigComplex> {
    if generators.is_empty() {
        return Err(invalid("presentation needs at least one generator"));
    }
    let mut faces = Vec::with_capacity(relators.len());
    let w = pad(relators.len());
    for (i, r) in relators.iter().enumerate() {
        if r.is_empty() {
            return Err(invalid(format!("relator {i} is empty")));
        }
        if let Some(l) = r.iter().find(|l| l.generator >= generators.len()) {
            return Err(invalid(format!("relator {i} references unknown generator #{}", l.generator)));
        }
        let boundary = r
            .iter()
            .rev()
            .map(|l| DirEdge { edge: l.generator, forward: !l.inverse })
            .collect();
        faces.push(Face { id: format!("r{i:0w$}"), boundary });
    }
    let edges = generators.iter().map(|g| unit_edge(g.clone(), 0, 0)).collect();
    ConfigComplex::new(vec![unit_vertex("x0".into())], edges, faces)
}

/// A rectangle of removed grid cells, in cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRect {
    pub col: usize,
    pub row: usize,
    pub width: usize,
    pub height: usize,
}

impl CellRect {
    pub fn cell(col: usize, row: usize) -> Self {
        CellRect { col, row, width: 1, height: 1 }
    }

    /// Closed vertex box `(col0, row0, col1, row1)`.
    fn vertex_box(&self) -> (usize, usize, usize, usize) {
        (self.col, self.row, self.col + self.width, self.row + self.height)
    }

    /// Vertex strictly inside the rectangle.
    fn contains_vertex(&self, col: usize, row: usize) -> bool {
        let (c0, r0, c1, r1) = self.vertex_box();
        c0 < col && col < c1 && r0 < row && row < r1
    }

    /// Edge whose midpoint lies strictly inside the rectangle.
    fn contains_edge(&self, (c, r): (usize, usize), horizontal: bool) -> bool {
        let (c0, r0, c1, r1) = self.vertex_box();
        if horizontal {
            r0 < r && r < r1 && c0 <= c && c < c1
        } else {
            c0 < c && c < c1 && r0 <= r && r < r1
        }
    }

    fn contains_cell(&self, col: usize, row: usize) -> bool {
        (self.col..self.col + self.width).contains(&col) && (self.row..self.row + self.height).contains(&row)
    }
}

/// `width × height` vertex grid with one square face per cell, minus the
/// cells, interior edges and interior vertices of each hole.
pub fn build_grid_with_holes(width: usize, height: usize, holes: &[CellRect]) -> Result<ConfigComplex> {
    if width < 2 || height < 2 {
        return Err(invalid(format!("grid must be at least 2x2, got {width}x{height}")));
    }
    for (i, h) in holes.iter().enumerate() {
        let (c0, r0, c1, r1) = h.vertex_box();
        if h.width == 0 || h.height == 0 || c0 < 1 || r0 < 1 || c1 + 1 >= width || r1 + 1 >= height {
            return Err(invalid(format!("hole {i} is empty or touches the grid boundary")));
        }
        for (j, g) in holes.iter().enumerate().skip(i + 1) {
            let (d0, s0, d1, s1) = g.vertex_box();
            if c0 <= d1 && d0 <= c1 && r0 <= s1 && s0 <= r1 {
                return Err(invalid(format!("holes {i} and {j} overlap or touch")));
            }
        }
    }
    let (wc, wr) = (pad(width), pad(height));
    let mut index = vec![None; width * height];
    let mut vertices = Vec::new();
    for r in 0..height {
        for c in 0..width {
            if !holes.iter().any(|h| h.contains_vertex(c, r)) {
                index[r * width + c] = Some(vertices.len());
                vertices.push(unit_vertex(format!("r{r:0wr$}c{c:0wc$}")));
            }
        }
    }
    let mut edges = Vec::new();
    let mut right = BTreeMap::new();
    let mut down = BTreeMap::new();
    for r in 0..height {
        for c in 0..width {
            let Some(v) = index[r * width + c] else { continue };
            if c + 1 < width && !holes.iter().any(|h| h.contains_edge((c, r), true)) {
                let u = index[r * width + c + 1].expect("endpoint of retained edge");
                right.insert((c, r), edges.len());
                edges.push(unit_edge(format!("h{r:0wr$}_{c:0wc$}"), v, u));
            }
            if r + 1 < height && !holes.iter().any(|h| h.contains_edge((c, r), false)) {
                let u = index[(r + 1) * width + c].expect("endpoint of retained edge");
                down.insert((c, r), edges.len());
                edges.push(unit_edge(format!("v{r:0wr$}_{c:0wc$}"), v, u));
            }
        }
    }
    let mut faces = Vec::new();
    for r in 0..height - 1 {
        for c in 0..width - 1 {
            if holes.iter().any(|h| h.contains_cell(c, r)) {
                continue;
            }
            let boundary = vec![
                DirEdge::forward(right[&(c, r)]),
                DirEdge::forward(down[&(c + 1, r)]),
                DirEdge::backward(right[&(c, r + 1)]),
                DirEdge::backward(down[&(c, r)]),
            ];
            faces.push(Face { id: format!("f{r:0wr$}_{c:0wc$}"), boundary });
        }
    }
    ConfigComplex::new(vertices, edges, faces)
}

/// Unordered configuration space of two hard-core particles on a graph.
///
/// Vertices are unordered pairs of distinct base vertices, edges move one
/// particle along a base edge while the other sits off that edge, and each
/// pair of vertex-disjoint base edges contributes a commuting square.
pub fn build_two_particle_space(base: &ConfigComplex) -> Result<ConfigComplex> {
    if base.num_faces() != 0 {
        return Err(invalid("two-particle builder expects a graph without faces"));
    }
    if base.edges().iter().any(|e| e.tail == e.head) {
        return Err(invalid("two-particle builder does not accept loop edges"));
    }
    let n = base.num_vertices();
    let mut pair_index = BTreeMap::new();
    let mut vertices = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pair_index.insert((a, b), vertices.len());
            let id = format!("{}|{}", base.vertices()[a].id, base.vertices()[b].id);
            let weight = base.vertices()[a].weight * base.vertices()[b].weight;
            vertices.push(Vertex { id, weight });
        }
    }
    let pair = |x: usize, y: usize| pair_index[&(x.min(y), x.max(y))];

    let mut edges = Vec::new();
    let mut move_index = BTreeMap::new();
    for (ei, e) in base.edges().iter().enumerate() {
        for c in 0..n {
            if c == e.tail || c == e.head {
                continue;
            }
            move_index.insert((ei, c), edges.len());
            edges.push(Edge {
                id: format!("{}@{}", e.id, base.vertices()[c].id),
                tail: pair(e.tail, c),
                head: pair(e.head, c),
                weight: e.weight,
            });
        }
    }
    if edges.is_empty() {
        return Err(Error::DisconnectedConfigurationSpace(format!(
            "{} configuration(s) and no admissible moves",
            vertices.len()
        )));
    }

    let mut faces = Vec::new();
    for (ei, e) in base.edges().iter().enumerate() {
        for (fi, f) in base.edges().iter().enumerate().skip(ei + 1) {
            if [f.tail, f.head].iter().any(|&x| x == e.tail || x == e.head) {
                continue;
            }
            let boundary = vec![
                DirEdge::forward(move_index[&(ei, f.tail)]),
                DirEdge::forward(move_index[&(fi, e.head)]),
                DirEdge::backward(move_index[&(ei, f.head)]),
                DirEdge::backward(move_index[&(fi, e.tail)]),
            ];
            faces.push(Face { id: format!("{}x{}", e.id, f.id), boundary });
        }
    }

    let components = count_components(vertices.len(), &edges);
    if components != 1 {
        return Err(Error::DisconnectedConfigurationSpace(format!("{components} components")));
    }
    ConfigComplex::new(vertices, edges, faces)
}

fn count_components(n: usize, edges: &[Edge]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.tail].push(e.head);
        adj[e.head].push(e.tail);
    }
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
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::parse_word;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn assert_closed_faces(c: &ConfigComplex) {
        for f in c.faces() {
            for (i, d) in f.boundary.iter().enumerate() {
                let next = f.boundary[(i + 1) % f.boundary.len()];
                assert_eq!(c.target(*d), c.source(next), "face {}", f.id);
            }
        }
    }

    #[test]
    fn cycle_counts() {
        let c3 = build_cycle(3).unwrap();
        assert_eq!((c3.num_vertices(), c3.num_edges(), c3.num_faces()), (3, 3, 0));
        assert_eq!(build_cycle(8).unwrap().betti1(), 1);
        assert!(matches!(build_cycle(2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cycle_quotient_face_wraps() {
        let c = build_cycle_quotient(8, 4).unwrap();
        assert_eq!(c.faces()[0].boundary.len(), 32);
        assert_closed_faces(&c);
    }

    #[test]
    fn presentation_complex_shapes() {
        let g = names(&["a"]);
        let c = build_presentation_complex(&g, &[parse_word("a3", &g).unwrap()]).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges(), c.num_faces()), (1, 1, 1));
        assert_eq!(c.faces()[0].boundary.len(), 3);

        let ab = names(&["a", "b"]);
        let wedge = build_presentation_complex(&ab, &[]).unwrap();
        assert_eq!((wedge.num_edges(), wedge.num_faces()), (2, 0));

        let bad = vec![crate::group::word::Letter::gen(5)];
        assert!(build_presentation_complex(&ab, &[bad]).is_err());
    }

    #[test]
    fn grid_betti_matches_holes() {
        let full = build_grid_with_holes(5, 5, &[]).unwrap();
        assert_eq!(full.num_faces(), 16);
        assert_eq!(full.betti1(), 16);
        assert_closed_faces(&full);

        let one = build_grid_with_holes(7, 7, &[CellRect::cell(2, 2)]).unwrap();
        assert_eq!(one.betti1() - one.num_faces(), 1);

        let big = build_grid_with_holes(9, 7, &[CellRect { col: 1, row: 1, width: 2, height: 3 }, CellRect::cell(5, 2)]).unwrap();
        assert_eq!(big.betti1() - big.num_faces(), 2);
        assert_closed_faces(&big);
    }

    #[test]
    fn grid_rejects_bad_holes() {
        assert!(build_grid_with_holes(5, 5, &[CellRect::cell(0, 1)]).is_err());
        assert!(build_grid_with_holes(5, 5, &[CellRect::cell(3, 1)]).is_err());
        assert!(build_grid_with_holes(9, 9, &[CellRect::cell(2, 2), CellRect::cell(3, 2)]).is_err());
        assert!(build_grid_with_holes(9, 9, &[CellRect::cell(2, 2), CellRect::cell(3, 3)]).is_err());
        assert!(build_grid_with_holes(9, 9, &[CellRect::cell(2, 2), CellRect::cell(4, 2)]).is_ok());
    }

    #[test]
    fn two_particles_on_hexagon() {
        let c6 = build_cycle(6).unwrap();
        let conf = build_two_particle_space(&c6).unwrap();
        assert_eq!(conf.num_vertices(), 15);
        assert_eq!(conf.num_edges(), 24);
        assert_eq!(conf.num_faces(), 9);
        assert_closed_faces(&conf);
    }

    #[test]
    fn two_particles_on_single_edge() {
        let base = ConfigComplex::new(
            vec![unit_vertex("a".into()), unit_vertex("b".into())],
            vec![unit_edge("e".into(), 0, 1)],
            vec![],
        )
        .unwrap();
        assert!(matches!(build_two_particle_space(&base), Err(Error::DisconnectedConfigurationSpace(_))));
    }
}
