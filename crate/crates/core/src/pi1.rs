//! Spanning-tree presentations of the fundamental group.
//!
//! A breadth-first tree from the base vertex fixes the family of tree paths
//! `δ(x)` from the base to every vertex. Every non-tree edge (chord) is a
//! generator, every face gives a relator, and a path maps to the group by
//! closing it through the tree and reading off its chords.
//!
//! Group words are kept in composition order: the letter of the last edge
//! walked is leftmost, so `beta(p.then(q)) = beta(q) · beta(p)`.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{ConfigComplex, DirEdge};
use crate::error::{invalid, Error, Result};
use crate::group::simplify::{classify, simplify, Simplified};
use crate::group::word::{free_reduce, Letter, Word};
use crate::group::{GroupBackend, GroupElement};

/// Default order bound used when trying a finite backend.
pub const DEFAULT_ORDER_BOUND: usize = 5000;

/// A walk along directed edges, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathWord {
    start: usize,
    end: usize,
    steps: Vec<DirEdge>,
}

impl PathWord {
    pub fn empty(start: usize) -> Self {
        PathWord { start, end: start, steps: Vec::new() }
    }

    pub fn new(complex: &ConfigComplex, start: usize, steps: Vec<DirEdge>) -> Result<Self> {
        if start >= complex.num_vertices() {
            return Err(invalid(format!("unknown start vertex {start}")));
        }
        let mut at = start;
        for (i, d) in steps.iter().enumerate() {
            if d.edge >= complex.num_edges() {
                return Err(invalid(format!("unknown edge index {}", d.edge)));
            }
            if complex.source(*d) != at {
                return Err(invalid(format!("step {i} does not continue the path")));
            }
            at = complex.target(*d);
        }
        Ok(PathWord { start, end: at, steps })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn steps(&self) -> &[DirEdge] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PathWord) -> Result<PathWord> {
        if self.end != next.start {
            return Err(invalid("paths are not composable"));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&next.steps);
        Ok(PathWord { start: self.start, end: next.end, steps })
    }

    pub fn reversed(&self) -> PathWord {
        PathWord {
            start: self.end,
            end: self.start,
            steps: self.steps.iter().rev().map(|d| d.reversed()).collect(),
        }
    }

    /// Removes immediate backtracks `e e⁻¹`.
    pub fn reduced(&self) -> PathWord {
        let mut steps: Vec<DirEdge> = Vec::with_capacity(self.steps.len());
        for &d in &self.steps {
            if steps.last() == Some(&d.reversed()) {
                steps.pop();
            } else {
                steps.push(d);
            }
        }
        PathWord { steps, ..*self }
    }
}

/// Uniform random walk of `len` steps from `start`.
pub fn random_walk<R: Rng + ?Sized>(complex: &ConfigComplex, start: usize, len: usize, rng: &mut R) -> PathWord {
    let mut steps = Vec::with_capacity(len);
    let mut at = start;
    for _ in 0..len {
        let out = complex.outgoing(at);
        let d = out[rng.gen_range(0..out.len())];
        steps.push(d);
        at = complex.target(d);
    }
    PathWord { start, end: at, steps }
}

/// Spanning-tree presentation of π₁ based at a vertex.
#[derive(Debug, Clone)]
pub struct Pi1Presentation {
    base: usize,
    /// Tree edge from the parent into each vertex (`None` at the base).
    parent: Vec<Option<DirEdge>>,
    depth: Vec<usize>,
    chords: Vec<usize>,
    chord_of_edge: Vec<Option<usize>>,
    chord_names: Vec<String>,
    relators: Vec<Word>,
    simplified: Simplified,
    backend: Option<GroupBackend>,
}

/// Breadth-first spanning tree with chords enumerated in edge order;
/// relators are not yet computed and no backend is attached.
pub fn spanning_tree(complex: &ConfigComplex, base: usize) -> Result<Pi1Presentation> {
    let n = complex.num_vertices();
    if base >= n {
        return Err(invalid(format!("unknown base vertex {base}")));
    }
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    depth[base] = 0;
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &d in complex.outgoing(v) {
            let w = complex.target(d);
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    let unreached = depth.iter().filter(|&&d| d == usize::MAX).count();
    if unreached > 0 {
        return Err(Error::NotConnected { components: 2 });
    }
    let mut is_tree = vec![false; complex.num_edges()];
    for d in parent.iter().flatten() {
        is_tree[d.edge] = true;
    }
    let chords: Vec<usize> = (0..complex.num_edges()).filter(|&e| !is_tree[e]).collect();
    let mut chord_of_edge = vec![None; complex.num_edges()];
    for (i, &e) in chords.iter().enumerate() {
        chord_of_edge[e] = Some(i);
    }
    let chord_names = chords.iter().map(|&e| complex.edges()[e].id.clone()).collect();
    let simplified = simplify(chords.len(), &[]);
    Ok(Pi1Presentation {
        base,
        parent,
        depth,
        chords,
        chord_of_edge,
        chord_names,
        relators: Vec::new(),
        simplified,
        backend: None,
    })
}

impl Pi1Presentation {
    /// Tree, face relators, relator elimination and backend choice.
    pub fn compute(complex: &ConfigComplex, base: usize) -> Result<Self> {
        Self::compute_with_bound(complex, base, DEFAULT_ORDER_BOUND)
    }

    pub fn compute_with_bound(complex: &ConfigComplex, base: usize, order_bound: usize) -> Result<Self> {
        let mut pres = spanning_tree(complex, base)?;
        pres.relators = complex.faces().iter().map(|f| pres.chord_word(&f.boundary)).collect();
        pres.simplified = simplify(pres.chords.len(), &pres.relators);
        pres.backend = classify(&pres.simplified, order_bound)?;
        Ok(pres)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn tree_parent(&self, v: usize) -> Option<DirEdge> {
        self.parent[v]
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.chord_of_edge[e].is_none()
    }

    /// Edge indices of the chords, one per raw generator.
    pub fn chords(&self) -> &[usize] {
        &self.chords
    }

    pub fn chord_names(&self) -> &[String] {
        &self.chord_names
    }

    /// Face relators as chord words.
    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn simplified(&self) -> &Simplified {
        &self.simplified
    }

    /// Names of the generators that survive relator elimination (a subset
    /// of the chord names).
    pub fn generator_names(&self) -> Vec<String> {
        self.simplified.kept.iter().map(|&c| self.chord_names[c].clone()).collect()
    }

    pub fn num_generators(&self) -> usize {
        self.simplified.num_generators()
    }

    pub fn backend(&self) -> Result<&GroupBackend> {
        self.backend
            .as_ref()
            .ok_or_else(|| Error::BackendUnavailable("no decidable backend for this presentation".into()))
    }

    pub fn backend_guess(&self) -> String {
        self.backend.as_ref().map_or_else(|| "unavailable".to_string(), |b| b.to_string())
    }

    /// Tree path from the base vertex to `x`.
    pub fn delta(&self, complex: &ConfigComplex, x: usize) -> Result<PathWord> {
        if x >= self.parent.len() {
            return Err(invalid(format!("unknown vertex {x}")));
        }
        let mut steps = Vec::with_capacity(self.depth[x]);
        let mut v = x;
        while let Some(d) = self.parent[v] {
            steps.push(d);
            v = complex.source(d);
        }
        steps.reverse();
        Ok(PathWord { start: self.base, end: x, steps })
    }

    /// Chord word of a walk in composition order (tree edges drop out).
    pub fn chord_word(&self, steps: &[DirEdge]) -> Word {
        let w: Word = steps
            .iter()
            .rev()
            .filter_map(|d| {
                self.chord_of_edge[d.edge].map(|c| Letter { generator: c, inverse: !d.forward })
            })
            .collect();
        free_reduce(&w)
    }

    /// `β(γ)` as a word over the surviving generators.
    pub fn beta_word(&self, path: &PathWord) -> Word {
        let chord = self.chord_word(&path.steps);
        let mut out = Vec::new();
        for l in chord {
            let img = &self.simplified.images[l.generator];
            if l.inverse {
                out.extend(img.iter().rev().map(|x| x.inverted()));
            } else {
                out.extend_from_slice(img);
            }
        }
        free_reduce(&out)
    }

    /// `β(γ) = δ(y)⁻¹ ∘ γ ∘ δ(x)` reduced in the backend.
    pub fn beta(&self, path: &PathWord) -> Result<GroupElement> {
        Ok(self.backend()?.reduce(&self.beta_word(path)))
    }

    /// Group element carried by a single directed edge (identity on tree
    /// edges).
    pub fn edge_element(&self, d: DirEdge) -> Result<GroupElement> {
        let backend = self.backend()?;
        Ok(backend.reduce(&self.beta_word(&PathWord { start: 0, end: 0, steps: vec![d] })))
    }

    /// Based loop `δ(u) · c · δ(v)⁻¹` realising surviving generator `g`.
    pub fn generator_loop(&self, complex: &ConfigComplex, g: usize) -> Result<PathWord> {
        let chord = *self
            .simplified
            .kept
            .get(g)
            .ok_or_else(|| invalid(format!("unknown generator {g}")))?;
        let e = self.chords[chord];
        let d = DirEdge::forward(e);
        let to = self.delta(complex, complex.source(d))?;
        let back = self.delta(complex, complex.target(d))?.reversed();
        let edge = PathWord::new(complex, complex.source(d), vec![d])?;
        to.then(&edge)?.then(&back)
    }

    /// A based loop whose `β` is the given word over surviving generators.
    pub fn loop_for_word(&self, complex: &ConfigComplex, word: &[Letter]) -> Result<PathWord> {
        let mut path = PathWord::empty(self.base);
        // composition order: rightmost letter is walked first
        for l in word.iter().rev() {
            let gl = self.generator_loop(complex, l.generator)?;
            let piece = if l.inverse { gl.reversed() } else { gl };
            path = path.then(&piece)?;
        }
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex, CellRect};
    use crate::group::word::parse_word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_has_one_chord() {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        assert_eq!(p.chords().len(), 1);
        assert_eq!(p.num_generators(), 1);
        assert!(p.relators().is_empty());
        assert_eq!(p.backend().unwrap(), &GroupBackend::Free { rank: 1 });
    }

    #[test]
    fn full_loop_on_cycle_is_generator() {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        let around = PathWord::new(&c8, 0, (0..8).map(DirEdge::forward).collect()).unwrap();
        let b = p.beta(&around).unwrap();
        assert_eq!(b, GroupElement::Free(vec![Letter::gen(0)]));
        assert_eq!(p.beta(&around.reversed()).unwrap(), GroupElement::Free(vec![Letter::inv(0)]));
    }

    #[test]
    fn grid_chords_are_all_killed() {
        let g = build_grid_with_holes(7, 7, &[]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        assert_eq!(p.chords().len(), 36);
        assert_eq!(p.num_generators(), 0);
        assert!(p.backend().unwrap().is_trivial());
    }

    #[test]
    fn holes_give_free_groups() {
        let one = build_grid_with_holes(7, 7, &[CellRect::cell(3, 3)]).unwrap();
        let p = Pi1Presentation::compute(&one, 0).unwrap();
        assert_eq!(p.backend().unwrap(), &GroupBackend::Free { rank: 1 });

        let two = build_grid_with_holes(9, 7, &[CellRect::cell(2, 2), CellRect::cell(5, 3)]).unwrap();
        let p = Pi1Presentation::compute(&two, 0).unwrap();
        assert_eq!(p.backend().unwrap(), &GroupBackend::Free { rank: 2 });
    }

    #[test]
    fn wedge_of_two_circles() {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let c = build_presentation_complex(&ab, &[]).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        assert_eq!(p.chords().len(), 2);
        assert!(p.relators().is_empty());
        assert_eq!(p.generator_names(), ab);
    }

    #[test]
    fn presentation_complex_relators_spell_relators() {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<Word> = ["a2", "b2", "(ab)3"]
            .iter()
            .map(|r| parse_word(r, &ab).unwrap())
            .collect();
        let c = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        assert_eq!(p.relators(), rels.as_slice());
        assert_eq!(p.backend().unwrap().order(), Some(6));
    }

    #[test]
    fn delta_paths() {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        assert!(p.delta(&c8, 0).unwrap().is_empty());
        assert_eq!(p.delta(&c8, 1).unwrap().len(), 1);
        for x in 0..8 {
            let d = p.delta(&c8, x).unwrap();
            assert_eq!(d.end(), x);
            assert!(d.reversed().then(&d).unwrap().reduced().is_empty());
            assert_eq!(p.beta(&d).unwrap(), p.backend().unwrap().identity());
        }
        assert!(p.delta(&c8, 9).is_err());
    }

    #[test]
    fn beta_is_multiplicative() {
        let g = build_grid_with_holes(9, 7, &[CellRect::cell(2, 2), CellRect::cell(5, 3)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let backend = p.backend().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = rng.gen_range(0..g.num_vertices());
            let a = random_walk(&g, s, rng.gen_range(0..30), &mut rng);
            let b = random_walk(&g, a.end(), rng.gen_range(0..30), &mut rng);
            let ab = a.then(&b).unwrap();
            assert_eq!(p.beta(&ab).unwrap(), backend.multiply(&p.beta(&b).unwrap(), &p.beta(&a).unwrap()));
        }
    }

    #[test]
    fn face_relators_hold() {
        for c in [
            build_grid_with_holes(9, 7, &[CellRect::cell(2, 2), CellRect::cell(5, 3)]).unwrap(),
            crate::complex::build_cycle_quotient(8, 4).unwrap(),
        ] {
            let p = Pi1Presentation::compute(&c, 0).unwrap();
            let backend = p.backend().unwrap();
            for f in c.faces() {
                let s = c.source(f.boundary[0]);
                let walk = PathWord::new(&c, s, f.boundary.clone()).unwrap();
                let based = p.delta(&c, s).unwrap().then(&walk).unwrap().then(&p.delta(&c, s).unwrap().reversed()).unwrap();
                assert_eq!(p.beta(&based).unwrap(), backend.identity());
            }
        }
    }

    #[test]
    fn generator_loops_realise_words() {
        let g = build_grid_with_holes(9, 7, &[CellRect::cell(2, 2), CellRect::cell(5, 3)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let w = vec![Letter::gen(0), Letter::inv(1), Letter::gen(0)];
        let l = p.loop_for_word(&g, &w).unwrap();
        assert!(l.is_closed() && l.start() == 0);
        assert_eq!(p.beta_word(&l), w);
    }

    #[test]
    fn disconnected_tree_is_rejected() {
        // a valid complex is always connected; exercise the base check instead
        let c8 = build_cycle(8).unwrap();
        assert!(spanning_tree(&c8, 42).is_err());
    }

    /// Every closed walk up to length 12 on simply connected complexes maps
    /// to the identity.
    #[test]
    fn simply_connected_walks_are_trivial() {
        let grid = build_grid_with_holes(3, 3, &[]).unwrap();
        let a: Vec<String> = vec!["a".into()];
        let disk = build_presentation_complex(&a, &[vec![Letter::gen(0)]]).unwrap();
        for c in [grid, disk] {
            let p = Pi1Presentation::compute(&c, 0).unwrap();
            let id = p.backend().unwrap().identity();
            let mut count = 0usize;
            let mut stack = vec![PathWord::empty(0)];
            while let Some(path) = stack.pop() {
                if path.is_closed() {
                    assert_eq!(p.beta(&path).unwrap(), id);
                    count += 1;
                }
                if path.len() < 12 {
                    for &d in c.outgoing(path.end()) {
                        let mut steps = path.steps().to_vec();
                        steps.push(d);
                        stack.push(PathWord { start: 0, end: c.target(d), steps });
                    }
                }
            }
            assert!(count > 100);
        }
    }
}
