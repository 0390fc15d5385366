//! Flat unitary connections on a complex.
//!
//! A [`FlatConnection`] stores one unitary per edge for its forward
//! direction; walking the edge backwards uses the adjoint. Transport along a
//! path is the ordered product `U(e_n) ⋯ U(e_1)`, so it composes the same
//! way as group words from [`crate::pi1`]. Connections built from a
//! representation of π₁ by [`cocycle_from_rep`] carry the identity on tree
//! edges and `R(β(e))` on chords.

mod checks;

pub use checks::{
    equivalence_fingerprint, fingerprint_distance, homotopy_check, ls_check, shortlex_words, topological_operator,
    verify_cocycle, CocycleFailure, CocycleReport, HomotopyReport, LsReport, TopologicalOperator,
};

use rand::Rng;

use crate::complex::{ConfigComplex, DirEdge};
use crate::error::{invalid, Error, Result};
use crate::group::characters::{irreducible_representations, CharacterTable};
use crate::group::Letter;
use crate::linalg::{c64, identity, phase, random_unitary, unitarity_defect, CMatrix, C64};
use crate::pi1::{PathWord, Pi1Presentation};

/// Default tolerance for unitarity, relator and flatness checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A finite-dimensional unitary representation given on named generators.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    dim: usize,
    names: Vec<String>,
    matrices: Vec<CMatrix>,
    tol: f64,
}

impl UnitaryRep {
    pub fn new(names: Vec<String>, matrices: Vec<CMatrix>, dim: usize) -> Result<Self> {
        Self::with_tolerance(names, matrices, dim, DEFAULT_TOL)
    }

    pub fn with_tolerance(names: Vec<String>, matrices: Vec<CMatrix>, dim: usize, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidRepresentation("dimension must be positive".into()));
        }
        if names.len() != matrices.len() {
            return Err(Error::InvalidRepresentation("one matrix per generator required".into()));
        }
        for (name, m) in names.iter().zip(&matrices) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidRepresentation(format!("generator {name} is not {dim}x{dim}")));
            }
            let defect = unitarity_defect(m);
            if defect > tol {
                return Err(Error::InvalidRepresentation(format!(
                    "generator {name} is not unitary (defect {defect:.3e})"
                )));
            }
        }
        Ok(UnitaryRep { dim, names, matrices, tol })
    }

    /// `d`-dimensional identity representation.
    pub fn trivial(names: Vec<String>, dim: usize) -> Self {
        let matrices = vec![identity(dim); names.len()];
        UnitaryRep { dim, names, matrices, tol: DEFAULT_TOL }
    }

    /// One-dimensional representation sending generator `k` to
    /// `e^{2πiθ_k}`.
    pub fn character(names: Vec<String>, thetas: &[f64]) -> Result<Self> {
        if names.len() != thetas.len() {
            return Err(Error::InvalidRepresentation("one phase per generator required".into()));
        }
        let matrices = thetas.iter().map(|&t| CMatrix::from_element(1, 1, phase(t))).collect();
        Self::new(names, matrices, 1)
    }

    /// Sign representation of `S_3 = ⟨a, b | a², b², (ab)³⟩`.
    pub fn s3_sign() -> Self {
        let m = CMatrix::from_element(1, 1, c64(-1.0, 0.0));
        UnitaryRep { dim: 1, names: vec!["a".into(), "b".into()], matrices: vec![m.clone(), m], tol: DEFAULT_TOL }
    }

    /// Standard two-dimensional representation of
    /// `S_3 = ⟨a, b | a², b², (ab)³⟩` by two reflections at 60°.
    pub fn s3_standard() -> Self {
        let h = 3f64.sqrt() / 2.0;
        let a = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c64(-0.5, 0.0), c64(h, 0.0), c64(h, 0.0), c64(0.5, 0.0)]);
        UnitaryRep { dim: 2, names: vec!["a".into(), "b".into()], matrices: vec![a, b], tol: DEFAULT_TOL }
    }

    /// Every irreducible representation of a finite fundamental group, on
    /// the presentation's surviving generators, in character-table order.
    pub fn irreducibles(pres: &Pi1Presentation) -> Result<(CharacterTable, Vec<UnitaryRep>)> {
        let group = pres
            .backend()?
            .to_finite()
            .ok_or_else(|| Error::UnsupportedGroup("irreducibles need a finite group".into()))?;
        let table = CharacterTable::for_group(&group)?;
        let names = pres.generator_names();
        let reps = irreducible_representations(&group, &table)?
            .into_iter()
            .zip(&table.dims)
            .map(|(matrices, &dim)| UnitaryRep { dim, names: names.clone(), matrices, tol: DEFAULT_TOL })
            .collect();
        Ok((table, reps))
    }

    /// Random representation of a free group (no relators to satisfy).
    pub fn random<R: Rng + ?Sized>(names: Vec<String>, dim: usize, rng: &mut R) -> Self {
        let matrices = names.iter().map(|_| random_unitary(dim, rng)).collect();
        UnitaryRep { dim, names, matrices, tol: DEFAULT_TOL }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn set_tol(&mut self, tol: f64) {
        self.tol = tol;
    }

    fn letter(&self, l: Letter) -> CMatrix {
        let m = &self.matrices[l.generator];
        if l.inverse {
            m.adjoint()
        } else {
            m.clone()
        }
    }

    /// `R(l_1) ⋯ R(l_n)`.
    pub fn evaluate(&self, word: &[Letter]) -> CMatrix {
        word.iter().fold(identity(self.dim), |acc, &l| acc * self.letter(l))
    }

    pub fn trace(&self, word: &[Letter]) -> C64 {
        self.evaluate(word).trace()
    }

    /// Complex-conjugate representation.
    pub fn conjugate(&self) -> Self {
        UnitaryRep { matrices: self.matrices.iter().map(|m| m.map(|z| z.conj())).collect(), ..self.clone() }
    }

    /// Largest `‖R(r) − I‖` over the given relators.
    pub fn relator_defect(&self, relators: &[Vec<Letter>]) -> f64 {
        relators
            .iter()
            .map(|r| (self.evaluate(r) - identity(self.dim)).norm())
            .fold(0.0, f64::max)
    }

    /// Reorders the generators to match `pres` and checks its relators.
    pub fn aligned_to(&self, pres: &Pi1Presentation) -> Result<UnitaryRep> {
        let wanted = pres.generator_names();
        if wanted.len() != self.names.len() {
            return Err(Error::InvalidRepresentation(format!(
                "representation has {} generators, the fundamental group has {} ({})",
                self.names.len(),
                wanted.len(),
                wanted.join(", ")
            )));
        }
        let matrices = wanted
            .iter()
            .map(|w| {
                self.names
                    .iter()
                    .position(|n| n == w)
                    .map(|k| self.matrices[k].clone())
                    .ok_or_else(|| Error::InvalidRepresentation(format!("no matrix for generator {w}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = UnitaryRep { names: wanted, matrices, ..self.clone() };
        let defect = rep.relator_defect(&pres.simplified().relators);
        if defect > self.tol {
            return Err(Error::InvalidRepresentation(format!("relator violated (defect {defect:.3e})")));
        }
        Ok(rep)
    }
}

/// A unitary on every edge; the reverse direction carries the inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatConnection {
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl FlatConnection {
    /// Connection from forward-edge unitaries. Flatness is not required
    /// here; see [`FlatConnection::flatness_defect`].
    pub fn new(complex: &ConfigComplex, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != complex.num_edges() {
            return Err(invalid(format!("expected {} edge matrices, got {}", complex.num_edges(), matrices.len())));
        }
        let dim = matrices.first().map_or(1, |m| m.nrows());
        for (e, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(invalid(format!("edge {e} matrix is not {dim}x{dim}")));
            }
            let defect = unitarity_defect(m);
            if defect > DEFAULT_TOL {
                return Err(invalid(format!("edge {e} matrix is not unitary (defect {defect:.3e})")));
            }
        }
        Ok(FlatConnection { dim, matrices })
    }

    pub fn trivial(complex: &ConfigComplex, dim: usize) -> Self {
        FlatConnection { dim, matrices: vec![identity(dim); complex.num_edges()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unitary of the forward direction of edge `e`.
    pub fn forward(&self, e: usize) -> &CMatrix {
        &self.matrices[e]
    }

    pub fn edge_matrix(&self, d: DirEdge) -> CMatrix {
        if d.forward {
            self.matrices[d.edge].clone()
        } else {
            self.matrices[d.edge].adjoint()
        }
    }

    /// `U(e_n) ⋯ U(e_1)` over the given steps.
    pub fn transport_steps(&self, steps: &[DirEdge]) -> Result<CMatrix> {
        let mut m = identity(self.dim);
        for d in steps {
            if d.edge >= self.matrices.len() {
                return Err(invalid(format!("edge {} is not part of this connection", d.edge)));
            }
            m = self.edge_matrix(*d) * m;
        }
        Ok(m)
    }

    pub fn transport(&self, path: &PathWord) -> Result<CMatrix> {
        self.transport_steps(path.steps())
    }

    pub fn face_holonomy(&self, complex: &ConfigComplex, face: usize) -> Result<CMatrix> {
        self.transport_steps(&complex.faces()[face].boundary)
    }

    /// Worst face holonomy distance from the identity, with its face.
    pub fn flatness_defect(&self, complex: &ConfigComplex) -> Result<(Option<usize>, f64)> {
        let mut worst = (None, 0.0);
        for f in 0..complex.num_faces() {
            let d = (self.face_holonomy(complex, f)? - identity(self.dim)).norm();
            if d > worst.1 || worst.0.is_none() {
                worst = (Some(f), d);
            }
        }
        Ok(worst)
    }

    /// Fails with [`Error::NonFlatConnection`] when a face holonomy exceeds
    /// `tol`.
    pub fn ensure_flat(&self, complex: &ConfigComplex, tol: f64) -> Result<()> {
        match self.flatness_defect(complex)? {
            (Some(face), defect) if defect > tol => Err(Error::NonFlatConnection { face, defect }),
            _ => Ok(()),
        }
    }

    /// Edge `x → y` becomes `S(y) U(e) S(x)⁻¹`.
    pub fn gauge_transform(&self, complex: &ConfigComplex, gauge: &GaugeField) -> Result<FlatConnection> {
        if gauge.dim() != self.dim || gauge.len() != complex.num_vertices() {
            return Err(invalid("gauge field does not match the connection"));
        }
        let matrices = complex
            .edges()
            .iter()
            .zip(&self.matrices)
            .map(|(e, u)| gauge.matrix(e.head) * u * gauge.matrix(e.tail).adjoint())
            .collect();
        Ok(FlatConnection { dim: self.dim, matrices })
    }

    /// Gauge-fixed form with the identity on every tree edge of `pres`,
    /// together with the gauge `S(x) = T(δ(x))⁻¹` that produces it.
    pub fn tree_gauge(&self, complex: &ConfigComplex, pres: &Pi1Presentation) -> Result<(FlatConnection, GaugeField)> {
        let matrices = (0..complex.num_vertices())
            .map(|x| Ok(self.transport(&pres.delta(complex, x)?)?.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        let gauge = GaugeField { dim: self.dim, matrices };
        Ok((self.gauge_transform(complex, &gauge)?, gauge))
    }
}

/// A unitary per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl GaugeField {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let dim = matrices.first().map_or(1, |m| m.nrows());
        for (x, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim || unitarity_defect(m) > DEFAULT_TOL {
                return Err(invalid(format!("gauge at vertex {x} is not a {dim}x{dim} unitary")));
            }
        }
        Ok(GaugeField { dim, matrices })
    }

    pub fn identity(num_vertices: usize, dim: usize) -> Self {
        GaugeField { dim, matrices: vec![identity(dim); num_vertices] }
    }

    pub fn random<R: Rng + ?Sized>(num_vertices: usize, dim: usize, rng: &mut R) -> Self {
        GaugeField { dim, matrices: (0..num_vertices).map(|_| random_unitary(dim, rng)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrix(&self, x: usize) -> &CMatrix {
        &self.matrices[x]
    }

    pub(crate) fn set(&mut self, x: usize, m: CMatrix) {
        self.matrices[x] = m;
    }
}

/// Connection of a representation of π₁: identity on tree edges, `R(β(e))`
/// on each chord `e`.
pub fn cocycle_from_rep(complex: &ConfigComplex, pres: &Pi1Presentation, rep: &UnitaryRep) -> Result<FlatConnection> {
    let rep = rep.aligned_to(pres)?;
    let images = &pres.simplified().images;
    let mut matrices = vec![identity(rep.dim()); complex.num_edges()];
    for (c, &e) in pres.chords().iter().enumerate() {
        matrices[e] = rep.evaluate(&images[c]);
    }
    Ok(FlatConnection { dim: rep.dim(), matrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex};
    use crate::group::word::parse_word;
    use crate::linalg::{distance, hermitian_eigenvalues};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s3_complex() -> (ConfigComplex, Pi1Presentation) {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab).unwrap()).collect();
        let c = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        (c, p)
    }

    #[test]
    fn trivial_rep_gives_identity_edges() {
        let g = build_grid_with_holes(5, 5, &[]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::trivial(vec![], 2)).unwrap();
        assert_eq!(conn, FlatConnection::trivial(&g, 2));
    }

    #[test]
    fn character_on_cycle_sits_on_the_chord() {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        let rep = UnitaryRep::character(p.generator_names(), &[0.25]).unwrap();
        let conn = cocycle_from_rep(&c8, &p, &rep).unwrap();
        for e in 0..8 {
            let expect = if p.is_tree_edge(e) { c64(1.0, 0.0) } else { phase(0.25) };
            assert!((conn.forward(e)[(0, 0)] - expect).norm() < 1e-15);
        }
        let around = PathWord::new(&c8, 0, (0..8).map(DirEdge::forward).collect()).unwrap();
        assert!((conn.transport(&around).unwrap()[(0, 0)] - phase(0.25)).norm() < 1e-12);
    }

    #[test]
    fn s3_standard_rep_on_presentation_complex() {
        let (c, p) = s3_complex();
        let rep = UnitaryRep::s3_standard();
        assert!(rep.relator_defect(&p.simplified().relators) < 1e-14);
        let conn = cocycle_from_rep(&c, &p, &rep).unwrap();
        assert!(distance(conn.forward(0), &rep.matrices()[0]) < 1e-15);
        assert!(distance(conn.forward(1), &rep.matrices()[1]) < 1e-15);
        assert!(conn.flatness_defect(&c).unwrap().1 < 1e-12);
    }

    #[test]
    fn bad_relators_are_rejected() {
        let (_, p) = s3_complex();
        let rep = UnitaryRep::character(vec!["a".into(), "b".into()], &[0.25, 0.0]).unwrap();
        assert!(matches!(rep.aligned_to(&p), Err(Error::InvalidRepresentation(_))));
        let not_unitary = CMatrix::from_element(1, 1, c64(2.0, 0.0));
        assert!(UnitaryRep::new(vec!["a".into()], vec![not_unitary], 1).is_err());
    }

    #[test]
    fn irreducibles_of_s3() {
        let (c, p) = s3_complex();
        let (table, reps) = UnitaryRep::irreducibles(&p).unwrap();
        assert_eq!(table.dims, vec![1, 1, 2]);
        for r in &reps {
            assert!(r.relator_defect(&p.simplified().relators) < 1e-10);
            let conn = cocycle_from_rep(&c, &p, r).unwrap();
            assert!(conn.flatness_defect(&c).unwrap().1 < 1e-10);
        }
    }

    #[test]
    fn gauge_preserves_loop_spectrum() {
        let c8 = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c8, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let conn = cocycle_from_rep(&c8, &p, &UnitaryRep::random(p.generator_names(), 3, &mut rng)).unwrap();
        let gauge = GaugeField::random(8, 3, &mut rng);
        let moved = conn.gauge_transform(&c8, &gauge).unwrap();
        let around = PathWord::new(&c8, 3, (3..11).map(|e| DirEdge::forward(e % 8)).collect()).unwrap();
        // unitary holonomies: compare the Hermitian parts' spectra
        let h1 = conn.transport(&around).unwrap();
        let h2 = moved.transport(&around).unwrap();
        let a = hermitian_eigenvalues(&(&h1 + h1.adjoint()));
        let b = hermitian_eigenvalues(&(&h2 + h2.adjoint()));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
        assert!(distance(&h2, &(gauge.matrix(3) * &h1 * gauge.matrix(3).adjoint())) < 1e-10);
    }

    #[test]
    fn tree_gauge_trivialises_tree_edges() {
        let g = build_grid_with_holes(7, 7, &[crate::complex::CellRect::cell(3, 3)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::random(p.generator_names(), 2, &mut rng)).unwrap();
        let scrambled = conn.gauge_transform(&g, &GaugeField::random(g.num_vertices(), 2, &mut rng)).unwrap();
        let (fixed, _) = scrambled.tree_gauge(&g, &p).unwrap();
        for e in 0..g.num_edges() {
            if p.is_tree_edge(e) {
                assert!(distance(fixed.forward(e), &identity(2)) < 1e-10);
            }
        }
        assert!(fixed.flatness_defect(&g).unwrap().1 < 1e-10);
    }

    #[test]
    fn base_point_conjugacy() {
        let g = build_grid_with_holes(9, 7, &[crate::complex::CellRect::cell(2, 2), crate::complex::CellRect::cell(5, 3)])
            .unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::random(p.generator_names(), 2, &mut rng)).unwrap();
        let gamma = p.loop_for_word(&g, &parse_word("a b A", &["a".to_string(), "b".to_string()]).unwrap()).unwrap();
        let y = 40;
        let delta = crate::pi1::random_walk(&g, 0, 17, &mut rng);
        let to_y = delta.then(&p.delta(&g, delta.end()).unwrap().reversed()).unwrap().then(&p.delta(&g, y).unwrap()).unwrap();
        let at_y = to_y.reversed().then(&gamma).unwrap().then(&to_y).unwrap();
        let w = conn.transport(&to_y).unwrap();
        let lhs = conn.transport(&at_y).unwrap();
        let rhs = &w * conn.transport(&gamma).unwrap() * w.adjoint();
        assert!(distance(&lhs, &rhs) < 1e-10);
    }
}
