//! Cocycle, homotopy, local-triviality and classification checks on
//! connections.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FlatConnection, GaugeField};
use crate::complex::{ConfigComplex, DirEdge, Region};
use crate::error::{invalid, Error, Result};
use crate::group::{Letter, Word};
use crate::linalg::{distance, identity, CMatrix, C64};
use crate::pi1::{random_walk, PathWord, Pi1Presentation};

const MAX_TRIAL_LEN: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct CocycleFailure {
    pub start: usize,
    pub first_len: usize,
    pub second_len: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub trials: usize,
    pub tolerance: f64,
    /// Largest `‖T(g) T(h) − T(h then g)‖` over the sampled pairs.
    pub max_deviation: f64,
    /// Largest face holonomy distance from the identity.
    pub max_face_defect: f64,
    pub worst_face: Option<usize>,
    pub failures: Vec<CocycleFailure>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance && self.max_face_defect <= self.tolerance
    }
}

/// Samples composable random walks `h: x → y`, `g: y → z` and compares the
/// product of their transports with the transport of the concatenation.
pub fn verify_cocycle(
    complex: &ConfigComplex,
    conn: &FlatConnection,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<CocycleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..trials {
        let x = rng.gen_range(0..complex.num_vertices());
        let h = random_walk(complex, x, rng.gen_range(0..=MAX_TRIAL_LEN), &mut rng);
        let g = random_walk(complex, h.end(), rng.gen_range(0..=MAX_TRIAL_LEN), &mut rng);
        let joint = conn.transport(&h.then(&g)?)?;
        let deviation = distance(&(conn.transport(&g)? * conn.transport(&h)?), &joint);
        max_deviation = max_deviation.max(deviation);
        if deviation > tol {
            failures.push(CocycleFailure { start: x, first_len: h.len(), second_len: g.len(), deviation });
        }
    }
    let (worst_face, max_face_defect) = conn.flatness_defect(complex)?;
    Ok(CocycleReport { trials, tolerance: tol, max_deviation, max_face_defect, worst_face, failures })
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyReport {
    pub pairs: usize,
    pub tolerance: f64,
    /// Pairs whose group elements disagreed (should be zero).
    pub backend_mismatches: usize,
    pub max_deviation: f64,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.backend_mismatches == 0 && self.max_deviation <= self.tolerance
    }
}

fn face_lasso(complex: &ConfigComplex, pres: &Pi1Presentation, face: usize) -> Result<PathWord> {
    let boundary = complex.faces()[face].boundary.clone();
    let s = complex.source(boundary[0]);
    let to = pres.delta(complex, s)?;
    to.then(&PathWord::new(complex, s, boundary)?)?.then(&to.reversed())
}

/// Builds pairs of based loops that are equal in π₁ but differ as walks: a
/// random loop, and the loop spelled by the normal form of its class with a
/// face boundary lasso and a backtrack spliced in. Compares their
/// holonomies.
pub fn homotopy_check(
    complex: &ConfigComplex,
    pres: &Pi1Presentation,
    conn: &FlatConnection,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<HomotopyReport> {
    let backend = pres.backend()?;
    let base = pres.base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut max_deviation = 0.0f64;
    for _ in 0..pairs {
        let walk = random_walk(complex, base, rng.gen_range(1..=3 * MAX_TRIAL_LEN), &mut rng);
        let first = walk.then(&pres.delta(complex, walk.end())?.reversed())?;
        let class = backend.reduce(&pres.beta_word(&first));
        let mut second = pres.loop_for_word(complex, &backend.to_word(&class))?;
        if complex.num_faces() > 0 {
            let lasso = face_lasso(complex, pres, rng.gen_range(0..complex.num_faces()))?;
            second = if rng.gen_bool(0.5) { lasso.then(&second)? } else { second.then(&lasso.reversed())? };
        }
        let d = complex.outgoing(base)[rng.gen_range(0..complex.outgoing(base).len())];
        let spur = PathWord::new(complex, base, vec![d, d.reversed()])?;
        second = spur.then(&second)?;
        if backend.reduce(&pres.beta_word(&second)) != class {
            mismatches += 1;
        }
        max_deviation = max_deviation.max(distance(&conn.transport(&first)?, &conn.transport(&second)?));
    }
    Ok(HomotopyReport { pairs, tolerance: tol, backend_mismatches: mismatches, max_deviation })
}

/// Breadth-first tree of a region from `root`, as tree paths `root → z`.
fn region_tree(complex: &ConfigComplex, region: &Region, root: usize) -> Result<HashMap<usize, PathWord>> {
    let in_region = |e: usize| region.edges.binary_search(&e).is_ok();
    let mut paths = HashMap::from([(root, PathWord::empty(root))]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &d in complex.outgoing(v) {
            let w = complex.target(d);
            if in_region(d.edge) && !paths.contains_key(&w) {
                let p = paths[&v].then(&PathWord::new(complex, v, vec![d])?)?;
                paths.insert(w, p);
                queue.push_back(w);
            }
        }
    }
    if paths.len() != region.vertices.len() {
        return Err(Error::InvalidRegion("region is not connected through its own edges".into()));
    }
    Ok(paths)
}

#[derive(Debug, Clone)]
pub struct LsReport {
    /// Every region edge is trivialised by the gauge.
    pub trivial: bool,
    pub max_defect: f64,
    /// `S(x) = T(center → x)⁻¹` inside the region, identity outside.
    pub gauge: GaugeField,
    /// A region loop at the center with non-trivial holonomy, if any.
    pub offending: Option<PathWord>,
}

/// Local triviality on a small region: gauges the connection to the
/// identity along a region tree and checks every remaining region edge.
pub fn ls_check(complex: &ConfigComplex, conn: &FlatConnection, region: &Region, tol: f64) -> Result<LsReport> {
    if !region.small {
        return Err(Error::InvalidRegion("region has non-trivial fundamental group".into()));
    }
    let tree = region_tree(complex, region, region.center)?;
    let mut gauge = GaugeField::identity(complex.num_vertices(), conn.dim());
    for (&z, path) in &tree {
        gauge.set(z, conn.transport(path)?.adjoint());
    }
    let mut max_defect = 0.0f64;
    let mut offending = None;
    for &e in &region.edges {
        let edge = &complex.edges()[e];
        let gauged = gauge.matrix(edge.head) * conn.forward(e) * gauge.matrix(edge.tail).adjoint();
        let defect = distance(&gauged, &identity(conn.dim()));
        max_defect = max_defect.max(defect);
        if defect > tol && offending.is_none() {
            let step = PathWord::new(complex, edge.tail, vec![DirEdge::forward(e)])?;
            offending = Some(tree[&edge.tail].then(&step)?.then(&tree[&edge.head].reversed())?);
        }
    }
    Ok(LsReport { trivial: offending.is_none(), max_defect, gauge, offending })
}

/// A loop holonomy next to its factorisation through local edge moves.
#[derive(Debug, Clone)]
pub struct TopologicalOperator {
    pub base: usize,
    pub region: Vec<usize>,
    /// Direct holonomy of the loop at its base.
    pub holonomy: CMatrix,
    /// Per region vertex `z`: holonomy of the loop carried to `z` along the
    /// region tree.
    pub direct: Vec<CMatrix>,
    /// The same blocks read off `C⁻¹ M(e_n) ⋯ M(e_1)`, where `M(e)` is the
    /// local move along `e` and `C` its underlying vertex permutation.
    pub factorized: Vec<CMatrix>,
    pub moves: usize,
    pub defect: f64,
}

impl TopologicalOperator {
    /// Block-diagonal operator on the region (vertex-major, `d` components
    /// per vertex).
    pub fn matrix(&self) -> CMatrix {
        let d = self.holonomy.nrows();
        let n = self.region.len() * d;
        let mut m = CMatrix::zeros(n, n);
        for (k, b) in self.factorized.iter().enumerate() {
            m.view_mut((k * d, k * d), (d, d)).copy_from(b);
        }
        m
    }
}

/// Applies the local moves of a walk as operators and returns the block of
/// `C⁻¹ M(e_n) ⋯ M(e_1)` at the walk's start.
///
/// `M(e)` for `e: x → y` sends the value at `x` to `y` through `U(e)` and
/// the value at `y` back to `x` through `U(e)⁻¹`; a loop edge multiplies
/// the value at `x` by `U(e)`. Only the moved vertices are stored.
fn factorized_block(complex: &ConfigComplex, conn: &FlatConnection, walk: &PathWord) -> CMatrix {
    let dim = conn.dim();
    // position -> (origin, accumulated block)
    let mut content: HashMap<usize, (usize, CMatrix)> = HashMap::new();
    for &d in walk.steps() {
        let (x, y) = (complex.source(d), complex.target(d));
        let u = conn.edge_matrix(d);
        let at_x = content.remove(&x).unwrap_or_else(|| (x, identity(dim)));
        if x == y {
            content.insert(x, (at_x.0, u * at_x.1));
            continue;
        }
        let at_y = content.remove(&y).unwrap_or_else(|| (y, identity(dim)));
        content.insert(y, (at_x.0, &u * at_x.1));
        content.insert(x, (at_y.0, u.adjoint() * at_y.1));
    }
    let z = walk.start();
    // C⁻¹ returns every block to its origin
    content
        .into_values()
        .find(|(origin, _)| *origin == z)
        .map_or_else(|| identity(dim), |(_, block)| block)
}

/// Holonomy of a closed loop and its factorisation into local moves, at
/// every vertex of a small region containing the loop's base.
pub fn topological_operator(
    complex: &ConfigComplex,
    conn: &FlatConnection,
    walk: &PathWord,
    region: &Region,
) -> Result<TopologicalOperator> {
    if !walk.is_closed() {
        return Err(invalid("topological operators need a closed loop"));
    }
    if !region.contains(walk.start()) {
        return Err(invalid("loop is not based in the region"));
    }
    let tree = region_tree(complex, region, walk.start())?;
    let mut direct = Vec::with_capacity(region.vertices.len());
    let mut factorized = Vec::with_capacity(region.vertices.len());
    let mut defect = 0.0f64;
    for &z in &region.vertices {
        let t = &tree[&z];
        let carried = t.reversed().then(walk)?.then(t)?;
        let a = conn.transport(&carried)?;
        let b = factorized_block(complex, conn, &carried);
        defect = defect.max(distance(&a, &b));
        direct.push(a);
        factorized.push(b);
    }
    Ok(TopologicalOperator {
        base: walk.start(),
        region: region.vertices.clone(),
        holonomy: conn.transport(walk)?,
        direct,
        factorized,
        moves: walk.len(),
        defect,
    })
}

/// Freely reduced words over `n` generators up to length `max_len`, in
/// shortlex order (`x_0 < x_0⁻¹ < x_1 < …`), starting with the empty word.
pub fn shortlex_words(n: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (0..n).flat_map(|g| [Letter::gen(g), Letter::inv(g)]).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&l.inverted()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Traces of the holonomies of all reduced words in the surviving
/// generators up to `max_len`, in shortlex order. Conjugation invariant, so
/// gauge-equivalent connections share fingerprints; different fingerprints
/// prove inequivalence, equal ones are evidence only.
pub fn equivalence_fingerprint(
    complex: &ConfigComplex,
    pres: &Pi1Presentation,
    conn: &FlatConnection,
    max_len: usize,
) -> Result<Vec<C64>> {
    let gens = (0..pres.num_generators())
        .map(|g| conn.transport(&pres.generator_loop(complex, g)?))
        .collect::<Result<Vec<_>>>()?;
    let words = shortlex_words(gens.len(), max_len);
    Ok(words
        .iter()
        .map(|w| {
            // loop_for_word walks the rightmost letter first
            w.iter()
                .fold(identity(conn.dim()), |acc, l| {
                    let m = &gens[l.generator];
                    acc * if l.inverse { m.adjoint() } else { m.clone() }
                })
                .trace()
        })
        .collect())
}

/// Largest entrywise gap between two fingerprints, `None` if their lengths
/// differ.
pub fn fingerprint_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex, star_region, CellRect};
    use crate::group::word::parse_word;
    use crate::holonomy::{cocycle_from_rep, UnitaryRep};
    use crate::linalg::{c64, phase, random_unitary};

    fn c8_character(theta: f64) -> (ConfigComplex, Pi1Presentation, FlatConnection) {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        let rep = UnitaryRep::character(p.generator_names(), &[theta]).unwrap();
        let conn = cocycle_from_rep(&c8, &p, &rep).unwrap();
        (c8, p, conn)
    }

    #[test]
    fn cocycle_law_holds() {
        let g = build_grid_with_holes(9, 7, &[CellRect::cell(2, 2), CellRect::cell(5, 3)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::random(p.generator_names(), 3, &mut rng)).unwrap();
        let r = verify_cocycle(&g, &conn, 500, 7, 1e-12).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn homotopic_loops_share_holonomy() {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab).unwrap()).collect();
        let s3 = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&s3, 0).unwrap();
        let conn = cocycle_from_rep(&s3, &p, &UnitaryRep::s3_standard()).unwrap();
        let r = homotopy_check(&s3, &p, &conn, 60, 3, 1e-10).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn ls_on_grid_star() {
        let g = build_grid_with_holes(5, 5, &[]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::trivial(vec![], 2))
            .unwrap()
            .gauge_transform(&g, &GaugeField::random(25, 2, &mut rng))
            .unwrap();
        let region = star_region(&g, 12, 1).unwrap();
        let r = ls_check(&g, &conn, &region, 1e-10).unwrap();
        assert!(r.trivial && r.offending.is_none());

        // break flatness on one face of a radius-2 star
        let mut mats: Vec<CMatrix> = (0..g.num_edges()).map(|e| conn.forward(e).clone()).collect();
        let face_edge = g.faces()[5].boundary[0].edge;
        mats[face_edge] = random_unitary(2, &mut rng) * &mats[face_edge];
        let bad = FlatConnection::new(&g, mats).unwrap();
        let region = star_region(&g, 12, 2).unwrap();
        assert!(region.edges.contains(&face_edge));
        let r = ls_check(&g, &bad, &region, 1e-10).unwrap();
        assert!(!r.trivial);
        let lp = r.offending.unwrap();
        assert!(lp.is_closed() && lp.start() == 12);
        assert!(distance(&bad.transport(&lp).unwrap(), &identity(2)) > 1e-6);
    }

    #[test]
    fn ls_on_cycle_arc() {
        let (c8, _, conn) = c8_character(0.3);
        let arc = Region::from_vertices(&c8, 2, &[1, 2, 3, 4]).unwrap();
        assert!(arc.small);
        assert!(ls_check(&c8, &conn, &arc, 1e-12).unwrap().trivial);
        let whole = star_region(&c8, 0, 5).unwrap();
        assert!(matches!(ls_check(&c8, &conn, &whole, 1e-12), Err(Error::InvalidRegion(_))));
    }

    #[test]
    fn topological_operator_on_cycle() {
        let (c8, _, conn) = c8_character(0.3);
        let around = PathWord::new(&c8, 0, (0..8).map(DirEdge::forward).collect()).unwrap();
        let region = star_region(&c8, 0, 1).unwrap();
        let op = topological_operator(&c8, &conn, &around, &region).unwrap();
        assert!(op.defect < 1e-12);
        for b in &op.factorized {
            assert!((b[(0, 0)] - phase(0.3)).norm() < 1e-12);
        }
        let m = op.matrix();
        assert!(distance(&m, &(identity(3) * phase(0.3))) < 1e-12);
    }

    #[test]
    fn topological_operator_on_s3() {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab).unwrap()).collect();
        let s3 = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&s3, 0).unwrap();
        let rep = UnitaryRep::s3_standard();
        let conn = cocycle_from_rep(&s3, &p, &rep).unwrap();
        // the single vertex with no edges is a small region
        let region = Region { center: 0, radius: 0, vertices: vec![0], edges: vec![], faces: vec![], small: true };
        let a = PathWord::new(&s3, 0, vec![DirEdge::forward(0)]).unwrap();
        let op = topological_operator(&s3, &conn, &a, &region).unwrap();
        assert!(distance(&op.holonomy, &rep.matrices()[0]) < 1e-14);
        assert!(op.defect < 1e-12);
    }

    #[test]
    fn fingerprints_separate_characters() {
        let (c8, p, q) = c8_character(0.25);
        let (_, _, r) = c8_character(0.75);
        let fq = equivalence_fingerprint(&c8, &p, &q, 1).unwrap();
        let fr = equivalence_fingerprint(&c8, &p, &r, 1).unwrap();
        assert_eq!(fq.len(), 3);
        assert!((fq[1] - c64(0.0, 1.0)).norm() < 1e-12);
        assert!(fingerprint_distance(&fq, &fr).unwrap() > 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let moved = q.gauge_transform(&c8, &GaugeField::random(8, 1, &mut rng)).unwrap();
        let fm = equivalence_fingerprint(&c8, &p, &moved, 6).unwrap();
        assert!(fingerprint_distance(&fm, &equivalence_fingerprint(&c8, &p, &q, 6).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn shortlex_counts() {
        // 1 + 4 + 12 + 36 reduced words in F_2
        assert_eq!(shortlex_words(2, 3).len(), 53);
        assert_eq!(shortlex_words(0, 4).len(), 1);
    }
}
