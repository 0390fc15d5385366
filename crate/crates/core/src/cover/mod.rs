//! The universal cover `M̃ = M × π₁(M)` and the regular representations of
//! π₁ acting on it.
//!
//! A cover vertex is a pair `(x, β)` of a base vertex and a group element.
//! Walking base edge `d` from `x` lifts to `(x, β) → (y, θ(d)·β)` with
//! `θ(d)` the element the edge carries in the spanning-tree presentation.
//! Finite groups are covered in full; infinite ones are truncated to a
//! word-metric ball, and vertices whose star leaves the ball are flagged as
//! boundary. Operators on a truncated cover are Dirichlet restrictions.

mod decompose;
mod kesten;
mod nonl2;

pub use decompose::{
    central_projectors, conjugacy_check, decompose_cover_spectrum, decomposition_report, projector_defects,
    ConjugacyBlock, ConjugacyReport, Decomposition, ProjectorReport, SectorBlock,
};
pub use kesten::{
    amenability_report, default_radii, kesten_estimate, reference_spectral_radius, AmenabilityReport,
    KestenEstimate,
};
pub use nonl2::{non_l2_representation, GramForm, NonL2Report};

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{ConfigComplex, DirEdge};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, Letter};
use crate::linalg::{c64, C64};
use crate::pi1::Pi1Presentation;
use crate::sectors::HermitianOperator;

/// Element set of the cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverExtent {
    /// The whole group; finite groups only.
    Full,
    /// Word-metric ball of the given radius.
    Ball(usize),
}

/// Breadth-first enumeration of the word-metric ball, by right
/// multiplication with generators and their inverses. Returns the elements
/// in discovery order with their word lengths.
pub fn ball_elements(backend: &GroupBackend, radius: Option<usize>) -> (Vec<GroupElement>, Vec<usize>) {
    let letters: Vec<GroupElement> = (0..backend.num_generators())
        .flat_map(|g| [backend.letter(Letter::gen(g)), backend.letter(Letter::inv(g))])
        .collect();
    let mut elements = vec![backend.identity()];
    let mut lengths = vec![0];
    let mut seen: HashMap<GroupElement, ()> = HashMap::from([(backend.identity(), ())]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if radius.is_some_and(|r| lengths[i] >= r) {
            continue;
        }
        for s in &letters {
            let next = backend.multiply(&elements[i], s);
            if seen.insert(next.clone(), ()).is_none() {
                elements.push(next);
                lengths.push(lengths[i] + 1);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    (elements, lengths)
}

/// An edge of the cover, lifted from base edge `base_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftedEdge {
    pub base_edge: usize,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone)]
pub struct CoverModel {
    base: ConfigComplex,
    backend: GroupBackend,
    extent: CoverExtent,
    elements: Vec<GroupElement>,
    lengths: Vec<usize>,
    index: HashMap<GroupElement, usize>,
    /// `θ(e)` for the forward direction of each base edge.
    theta: Vec<GroupElement>,
    /// Per base edge, element index `β` to the index of `θ(e)β` (slot 0)
    /// and `θ(e)⁻¹β` (slot 1), when inside the element set.
    lifts: Vec<[Vec<Option<usize>>; 2]>,
    boundary: Vec<bool>,
}

/// Cover of `complex` over the group of `pres`.
pub fn build_cover(complex: &ConfigComplex, pres: &Pi1Presentation, extent: CoverExtent) -> Result<CoverModel> {
    let backend = pres.backend()?.clone();
    let radius = match extent {
        CoverExtent::Full => {
            if backend.order().is_none() {
                return Err(Error::UnsupportedGroup(format!(
                    "the full cover of an infinite group ({backend}) needs a ball radius"
                )));
            }
            None
        }
        CoverExtent::Ball(r) => Some(r),
    };
    let (elements, lengths) = ball_elements(&backend, radius);
    let index: HashMap<GroupElement, usize> = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let theta = (0..complex.num_edges())
        .map(|e| pres.edge_element(DirEdge::forward(e)))
        .collect::<Result<Vec<_>>>()?;
    let lifts = theta
        .iter()
        .map(|t| {
            let ti = backend.inverse(t);
            let map = |m: &GroupElement| -> Vec<Option<usize>> {
                elements.iter().map(|b| index.get(&backend.multiply(m, b)).copied()).collect()
            };
            [map(t), map(&ti)]
        })
        .collect::<Vec<_>>();
    let nv = complex.num_vertices();
    let mut boundary = vec![false; nv * elements.len()];
    for (b, _) in elements.iter().enumerate() {
        for x in 0..nv {
            boundary[b * nv + x] =
                complex.outgoing(x).iter().any(|d| lifts[d.edge][usize::from(!d.forward)][b].is_none());
        }
    }
    if boundary.iter().all(|&f| f) {
        return Err(Error::TruncationTooSmall(format!(
            "every cover vertex touches the frontier of the radius-{} ball",
            radius.unwrap_or(0)
        )));
    }
    Ok(CoverModel { base: complex.clone(), backend, extent, elements, lengths, index, theta, lifts, boundary })
}

impl CoverModel {
    pub fn base(&self) -> &ConfigComplex {
        &self.base
    }

    pub fn backend(&self) -> &GroupBackend {
        &self.backend
    }

    pub fn extent(&self) -> CoverExtent {
        self.extent
    }

    pub fn is_full(&self) -> bool {
        self.extent == CoverExtent::Full
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Word length of each element, in enumeration order.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn element_index(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.base.num_vertices() * self.elements.len()
    }

    /// Cover vertex `(x, β)` with `β` given by its element index.
    pub fn vertex(&self, x: usize, element: usize) -> usize {
        element * self.base.num_vertices() + x
    }

    /// `(base vertex, element index)` of a cover vertex.
    pub fn split(&self, v: usize) -> (usize, usize) {
        let nv = self.base.num_vertices();
        (v % nv, v / nv)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn interior_count(&self) -> usize {
        self.boundary.iter().filter(|&&b| !b).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.num_vertices() - self.interior_count()
    }

    /// `θ(d)`: the element a directed base edge multiplies by.
    pub fn theta(&self, d: DirEdge) -> GroupElement {
        let t = &self.theta[d.edge];
        if d.forward {
            t.clone()
        } else {
            self.backend.inverse(t)
        }
    }

    /// Lift of the base step `d` starting at cover vertex `v`, when it stays
    /// inside the cover. `d` must leave the base vertex of `v`.
    pub fn step(&self, v: usize, d: DirEdge) -> Option<usize> {
        let (x, b) = self.split(v);
        debug_assert_eq!(self.base.source(d), x);
        let target = self.lifts[d.edge][usize::from(!d.forward)][b]?;
        Some(self.vertex(self.base.target(d), target))
    }

    /// Every lifted edge whose endpoints both lie in the cover.
    pub fn lifted_edges(&self) -> Vec<LiftedEdge> {
        let mut out = Vec::new();
        for (e, edge) in self.base.edges().iter().enumerate() {
            for b in 0..self.elements.len() {
                if let Some(t) = self.lifts[e][0][b] {
                    out.push(LiftedEdge { base_edge: e, tail: self.vertex(edge.tail, b), head: self.vertex(edge.head, t) });
                }
            }
        }
        out
    }

    /// Interior cover vertices whose degree in the lifted graph differs
    /// from the degree of their base vertex. Zero for a covering map.
    pub fn covering_defects(&self) -> usize {
        let mut degree = vec![0usize; self.num_vertices()];
        for e in self.lifted_edges() {
            degree[e.tail] += 1;
            degree[e.head] += 1;
        }
        (0..self.num_vertices())
            .filter(|&v| !self.boundary[v] && degree[v] != self.base.degree(self.split(v).0))
            .count()
    }

    /// Laplacian of the untwisted connection lifted to the cover, with
    /// Dirichlet truncation at the ball frontier: edges leaving the element
    /// set keep their diagonal contribution.
    pub fn laplacian(&self) -> Result<HermitianOperator> {
        let mut triplets = Vec::new();
        for v in 0..self.num_vertices() {
            let x = self.split(v).0;
            let mu_x = self.base.vertices()[x].weight;
            for &d in self.base.outgoing(x) {
                let w = self.base.edges()[d.edge].weight;
                triplets.push((v, v, c64(w / mu_x, 0.0)));
                if let Some(t) = self.step(v, d) {
                    let mu_y = self.base.vertices()[self.base.target(d)].weight;
                    triplets.push((v, t, c64(-w / (mu_x * mu_y).sqrt(), 0.0)));
                }
            }
        }
        HermitianOperator::from_triplets(self.num_vertices(), &triplets)
    }

    /// Regular action of `eta` on the fibre.
    pub fn action(&self, side: Side, eta: &GroupElement) -> RegularAction {
        let m = match side {
            Side::Left => eta.clone(),
            Side::Right => self.backend.inverse(eta),
        };
        let map = self
            .elements
            .iter()
            .map(|b| {
                let image = match side {
                    Side::Left => self.backend.multiply(&m, b),
                    Side::Right => self.backend.multiply(b, &m),
                };
                self.index.get(&image).copied()
            })
            .collect();
        RegularAction { side, element: eta.clone(), map }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `l(η): (x, β) ↦ (x, η·β)`, the observable side.
    Left,
    /// `r(η): (x, β) ↦ (x, β·η⁻¹)`, the gauge side.
    Right,
}

/// A group element acting on the fibre as a partial permutation of the
/// element set (total on full covers).
#[derive(Debug, Clone)]
pub struct RegularAction {
    pub side: Side,
    pub element: GroupElement,
    pub map: Vec<Option<usize>>,
}

impl RegularAction {
    pub fn is_bijection(&self) -> bool {
        let mut hit = vec![false; self.map.len()];
        for t in &self.map {
            match t {
                Some(t) if !hit[*t] => hit[*t] = true,
                _ => return false,
            }
        }
        true
    }

    /// Image of a cover vertex.
    pub fn apply_vertex(&self, cover: &CoverModel, v: usize) -> Option<usize> {
        let (x, b) = cover.split(v);
        self.map[b].map(|t| cover.vertex(x, t))
    }
}

/// A base observable to be lifted.
#[derive(Debug, Clone, Copy)]
pub enum BaseObservable<'a> {
    /// Multiplication by a function of the base vertex.
    Function(&'a [f64]),
    /// The unitary move of an edge: states at the tail move along `d`,
    /// states at the head move back, all others stay.
    EdgeMove(DirEdge),
}

/// A lifted observable: basis vector `e_v` goes to `weights[v]·e_{map[v]}`;
/// `None` means the image left the truncated cover.
#[derive(Debug, Clone)]
pub struct LiftedOperator {
    pub map: Vec<Option<usize>>,
    pub weights: Vec<f64>,
}

impl LiftedOperator {
    pub fn is_permutation(&self) -> bool {
        let mut hit = vec![false; self.map.len()];
        for t in &self.map {
            match t {
                Some(t) if !hit[*t] => hit[*t] = true,
                _ => return false,
            }
        }
        true
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![c64(0.0, 0.0); psi.len()];
        for (v, t) in self.map.iter().enumerate() {
            if let Some(t) = t {
                out[*t] += psi[v] * self.weights[v];
            }
        }
        out
    }
}

/// Lift of a base observable to the cover. Edge moves carry the factor
/// `√(μ(x)/μ(y))` that makes them unitary in the weighted inner product.
pub fn lift_operator(cover: &CoverModel, observable: BaseObservable<'_>) -> Result<LiftedOperator> {
    let n = cover.num_vertices();
    let base = cover.base();
    match observable {
        BaseObservable::Function(f) => {
            if f.len() != base.num_vertices() {
                return Err(Error::InvalidParameter(format!(
                    "function has {} values for {} vertices",
                    f.len(),
                    base.num_vertices()
                )));
            }
            Ok(LiftedOperator { map: (0..n).map(Some).collect(), weights: (0..n).map(|v| f[cover.split(v).0]).collect() })
        }
        BaseObservable::EdgeMove(d) => {
            if d.edge >= base.num_edges() {
                return Err(Error::InvalidParameter(format!("unknown edge {}", d.edge)));
            }
            let (x, y) = (base.source(d), base.target(d));
            let (mu_x, mu_y) = (base.vertices()[x].weight, base.vertices()[y].weight);
            let mut map: Vec<Option<usize>> = (0..n).map(Some).collect();
            let mut weights = vec![1.0; n];
            for v in 0..n {
                let (z, _) = cover.split(v);
                if z == x {
                    map[v] = cover.step(v, d);
                    weights[v] = (mu_x / mu_y).sqrt();
                } else if z == y {
                    map[v] = cover.step(v, d.reversed());
                    weights[v] = (mu_y / mu_x).sqrt();
                }
            }
            Ok(LiftedOperator { map, weights })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeCommutationReport {
    /// Every element, edge and vertex was checked (full covers).
    pub exhaustive: bool,
    /// Edge-move versus right-action comparisons made.
    pub checks: usize,
    pub violations: usize,
    /// Left-action versus right-action comparisons made.
    pub left_right_checks: usize,
    pub left_right_violations: usize,
}

impl GaugeCommutationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.left_right_violations == 0 && self.checks > 0
    }
}

/// Permutation-level check that lifted edge moves commute with the right
/// action, and that left and right actions commute. Full covers are
/// checked exhaustively (up to a work bound, past which `trials` random
/// samples are drawn); truncated covers are sampled at interior vertices,
/// skipping comparisons where either side leaves the ball.
pub fn verify_gauge_commutes(cover: &CoverModel, trials: usize, seed: u64) -> Result<GaugeCommutationReport> {
    const EXHAUSTIVE_WORK: usize = 4_000_000;
    let n_el = cover.elements().len();
    let base = cover.base();
    let moves: Vec<LiftedOperator> = (0..base.num_edges())
        .map(|e| lift_operator(cover, BaseObservable::EdgeMove(DirEdge::forward(e))))
        .collect::<Result<_>>()?;
    let mut rights: HashMap<usize, RegularAction> = HashMap::new();
    let mut right = |i: usize| -> RegularAction {
        rights.entry(i).or_insert_with(|| cover.action(Side::Right, &cover.elements()[i])).clone()
    };
    let compare = |op: &LiftedOperator, r: &RegularAction, v: usize| -> Option<bool> {
        let a = r.apply_vertex(cover, op.map[v]?)?;
        let rv = r.apply_vertex(cover, v)?;
        let b = op.map[rv]?;
        Some(a == b && op.weights[v] == op.weights[rv])
    };
    let mut report =
        GaugeCommutationReport { exhaustive: false, checks: 0, violations: 0, left_right_checks: 0, left_right_violations: 0 };
    let n = cover.num_vertices();
    let exhaustive = cover.is_full() && n_el * n_el * n <= EXHAUSTIVE_WORK && n_el * moves.len() * n <= EXHAUSTIVE_WORK;
    if exhaustive {
        report.exhaustive = true;
        for i in 0..n_el {
            let r = right(i);
            if !r.is_bijection() {
                report.violations += 1;
            }
            for op in &moves {
                for v in 0..n {
                    match compare(op, &r, v) {
                        Some(true) => report.checks += 1,
                        _ => {
                            report.checks += 1;
                            report.violations += 1;
                        }
                    }
                }
            }
            for j in 0..n_el {
                let l = cover.action(Side::Left, &cover.elements()[j]);
                for b in 0..n_el {
                    report.left_right_checks += 1;
                    let lr = r.map[b].and_then(|t| l.map[t]);
                    let rl = l.map[b].and_then(|t| r.map[t]);
                    if lr.is_none() || lr != rl {
                        report.left_right_violations += 1;
                    }
                }
            }
        }
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior: Vec<usize> = (0..n).filter(|&v| !cover.is_boundary(v)).collect();
    if interior.is_empty() || moves.is_empty() {
        return Ok(report);
    }
    for _ in 0..trials {
        let v = interior[rng.gen_range(0..interior.len())];
        let i = rng.gen_range(0..n_el);
        let r = right(i);
        let op = &moves[rng.gen_range(0..moves.len())];
        if let Some(ok) = compare(op, &r, v) {
            report.checks += 1;
            if !ok {
                report.violations += 1;
            }
        }
        let j = rng.gen_range(0..n_el);
        let l = cover.action(Side::Left, &cover.elements()[j]);
        let b = cover.split(v).1;
        let lr = r.map[b].and_then(|t| l.map[t]);
        let rl = l.map[b].and_then(|t| r.map[t]);
        if let (Some(p), Some(q)) = (lr, rl) {
            report.left_right_checks += 1;
            if p != q {
                report.left_right_violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex};
    use crate::group::word::parse_word;

    pub(super) fn s3() -> (ConfigComplex, Pi1Presentation) {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab).unwrap()).collect();
        let c = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        (c, p)
    }

    fn c8() -> (ConfigComplex, Pi1Presentation) {
        let c = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        (c, p)
    }

    #[test]
    fn cycle_ball_is_a_strip() {
        let (c, p) = c8();
        let cover = build_cover(&c, &p, CoverExtent::Ball(3)).unwrap();
        assert_eq!(cover.num_vertices(), 8 * 7);
        let mut exps: Vec<i64> = cover
            .elements()
            .iter()
            .map(|g| match g {
                GroupElement::Free(w) => w.iter().map(|l| l.sign()).sum(),
                GroupElement::Abelian(v) => v[0],
                other => panic!("unexpected element {other:?}"),
            })
            .collect();
        exps.sort();
        assert_eq!(exps, (-3..=3).collect::<Vec<_>>());
        // the strip has 8·7 − 1 internal edges and one cut at each end
        assert_eq!(cover.lifted_edges().len(), 8 * 7 - 1);
        assert_eq!(cover.covering_defects(), 0);
        assert_eq!(cover.boundary_count(), 2);
    }

    #[test]
    fn s3_full_cover_has_six_vertices() {
        let (c, p) = s3();
        let cover = build_cover(&c, &p, CoverExtent::Full).unwrap();
        assert_eq!(cover.num_vertices(), 6);
        assert_eq!(cover.interior_count(), 6);
        assert_eq!(cover.covering_defects(), 0);
        assert!(build_cover(&c8().0, &c8().1, CoverExtent::Full).is_err());
    }

    #[test]
    fn simply_connected_cover_is_the_base() {
        let g = build_grid_with_holes(5, 5, &[]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let cover = build_cover(&g, &p, CoverExtent::Full).unwrap();
        assert_eq!(cover.num_vertices(), 25);
        let lifted = cover.lifted_edges();
        assert_eq!(lifted.len(), g.num_edges());
        for (e, l) in lifted.iter().enumerate() {
            assert_eq!((l.tail, l.head), (g.edges()[e].tail, g.edges()[e].head));
        }
    }

    #[test]
    fn radius_zero_bouquet_is_too_small() {
        let (c, p) = s3();
        let free = build_presentation_complex(&["a".into(), "b".into()], &[]).unwrap();
        let pf = Pi1Presentation::compute(&free, 0).unwrap();
        assert!(matches!(build_cover(&free, &pf, CoverExtent::Ball(0)), Err(Error::TruncationTooSmall(_))));
        assert!(build_cover(&free, &pf, CoverExtent::Ball(1)).is_ok());
        assert!(build_cover(&c, &p, CoverExtent::Ball(0)).is_err());
    }

    #[test]
    fn lifted_moves_on_the_cycle() {
        let (c, p) = c8();
        let cover = build_cover(&c, &p, CoverExtent::Ball(3)).unwrap();
        let chord = p.chords()[0];
        for e in 0..c.num_edges() {
            let op = lift_operator(&cover, BaseObservable::EdgeMove(DirEdge::forward(e))).unwrap();
            let tail = c.edges()[e].tail;
            for b in 0..cover.elements().len() {
                let v = cover.vertex(tail, b);
                let Some(t) = op.map[v] else { continue };
                let (_, tb) = cover.split(t);
                let shift = cover.lengths()[tb] as i64 - cover.lengths()[b] as i64;
                if e == chord {
                    assert_eq!(shift.abs(), 1, "chord keeps the sheet");
                } else {
                    assert_eq!(tb, b, "tree edge changes the sheet");
                }
            }
        }
        let ones = vec![1.0; 8];
        let id = lift_operator(&cover, BaseObservable::Function(&ones)).unwrap();
        assert!(id.is_permutation());
        assert!(id.map.iter().enumerate().all(|(v, t)| *t == Some(v)) && id.weights.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn full_cover_moves_are_permutations() {
        let (c, p) = s3();
        let cover = build_cover(&c, &p, CoverExtent::Full).unwrap();
        for e in 0..c.num_edges() {
            let op = lift_operator(&cover, BaseObservable::EdgeMove(DirEdge::forward(e))).unwrap();
            assert!(op.is_permutation());
        }
    }

    #[test]
    fn gauge_commutes_on_s3_and_truncated_cycle() {
        let (c, p) = s3();
        let cover = build_cover(&c, &p, CoverExtent::Full).unwrap();
        let r = verify_gauge_commutes(&cover, 0, 1).unwrap();
        assert!(r.exhaustive && r.passed(), "{r:?}");
        assert_eq!(r.left_right_checks, 6 * 6 * 6);
        for i in 0..6 {
            assert!(cover.action(Side::Right, &cover.elements()[i]).is_bijection());
            assert!(cover.action(Side::Left, &cover.elements()[i]).is_bijection());
        }

        let (c, p) = c8();
        let cover = build_cover(&c, &p, CoverExtent::Ball(5)).unwrap();
        let r = verify_gauge_commutes(&cover, 2000, 7).unwrap();
        assert!(!r.exhaustive && r.passed(), "{r:?}");
        assert!(r.checks > 100 && r.left_right_checks > 100);
    }

    #[test]
    fn left_action_does_not_commute_with_chord_moves_on_s3() {
        // the left action is the observable side; it fails to commute with
        // lifted moves whenever the group is non-abelian
        let (c, p) = s3();
        let cover = build_cover(&c, &p, CoverExtent::Full).unwrap();
        let e = p.chords()[0];
        let op = lift_operator(&cover, BaseObservable::EdgeMove(DirEdge::forward(e))).unwrap();
        let mut mismatches = 0;
        for i in 0..6 {
            let l = cover.action(Side::Left, &cover.elements()[i]);
            for v in 0..6 {
                let a = l.apply_vertex(&cover, op.map[v].unwrap()).unwrap();
                let b = op.map[l.apply_vertex(&cover, v).unwrap()].unwrap();
                mismatches += usize::from(a != b);
            }
        }
        assert!(mismatches > 0);
    }
}
