//! Representations of π₁ realised on spaces of finitely supported functions
//! on the fibre, with a Gram form built from a unitary representation
//! instead of the `l²` inner product.
//!
//! For a support set `S` the form is `(e_g, e_h) = ⟨R(g)v, R(h)v⟩` (vector
//! form) or `tr(R(g)⁻¹R(h))` (trace form). Quotienting by its null space
//! leaves a space isometric to the span of the images `R(g)v` (resp.
//! `R(g)`), on which left translation acts as `R` and, for the trace form,
//! right translation acts as `d` copies of the conjugate of `R`.

use nalgebra::DVector;
use serde::Serialize;

use crate::complex::{ConfigComplex, DirEdge};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement};
use crate::holonomy::UnitaryRep;
use crate::linalg::{c64, hermitian_eigen, identity, unitarity_defect, CMatrix, C64};
use crate::pi1::Pi1Presentation;

/// Gram matrices below `−NEGATIVE_TOL · scale` are rejected as indefinite.
const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum GramForm {
    /// `⟨R(g)v, R(h)v⟩` for a cyclic vector `v`.
    Vector(DVector<C64>),
    /// `tr(R(g)⁻¹ R(h))`.
    Trace,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonL2Report {
    pub form: String,
    pub support_size: usize,
    pub rep_dim: usize,
    /// Rank of the Gram matrix: the dimension of the quotient space.
    pub quotient_dim: usize,
    pub min_gram_eigenvalue: f64,
    /// `max |G_{gh} − 1|`; zero exactly when the Gram matrix is all ones.
    pub all_ones_defect: f64,
    /// Base edges whose lifted move was checked on the quotient.
    pub edge_moves: usize,
    /// Largest unitarity defect of the left action over edge moves and
    /// support elements.
    pub left_unitarity_defect: f64,
    pub left_homomorphism_defect: f64,
    /// `|⟨[e₁], Q_l(g)[e₁]⟩ − F(1, g)|` over the test elements.
    pub expectation_defect: f64,
    /// `|tr Q_l(g) − m χ(g)|` with `m = 1` (vector form) or `m = d`
    /// (trace form), when the quotient is the whole target space.
    pub left_trace_defect: Option<f64>,
    pub right_unitarity_defect: Option<f64>,
    /// `|tr Q_r(g) − d·conj χ(g)|`.
    pub right_trace_defect: Option<f64>,
    /// `|⟨[e₁], Q_r(g)[e₁]⟩ − conj F(1, g)|`.
    pub right_expectation_defect: Option<f64>,
    /// `max ‖Q_l(g)Q_r(h) − Q_r(h)Q_l(g)‖`.
    pub commutation_defect: Option<f64>,
    pub tolerance: f64,
}

impl NonL2Report {
    pub fn passed(&self) -> bool {
        let ok = |x: Option<f64>| x.is_none_or(|v| v <= self.tolerance);
        self.left_unitarity_defect <= self.tolerance
            && self.left_homomorphism_defect <= self.tolerance
            && self.expectation_defect <= self.tolerance
            && ok(self.left_trace_defect)
            && ok(self.right_unitarity_defect)
            && ok(self.right_trace_defect)
            && ok(self.right_expectation_defect)
            && ok(self.commutation_defect)
    }
}

/// Images of the quotient basis in the target space: vectors stored as
/// `d×1` matrices, or `d×d` matrices for the trace form.
struct Quotient {
    basis: Vec<CMatrix>,
    /// Coordinates of the class of `e_1`.
    e1: DVector<C64>,
}

fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

impl Quotient {
    fn left(&self, r: &CMatrix) -> CMatrix {
        let moved: Vec<CMatrix> = self.basis.iter().map(|u| r * u).collect();
        let k = self.basis.len();
        CMatrix::from_fn(k, k, |a, b| inner(&self.basis[a], &moved[b]))
    }

    fn right(&self, r: &CMatrix) -> CMatrix {
        let rinv = r.adjoint();
        let moved: Vec<CMatrix> = self.basis.iter().map(|u| u * &rinv).collect();
        let k = self.basis.len();
        CMatrix::from_fn(k, k, |a, b| inner(&self.basis[a], &moved[b]))
    }
}

/// Gram matrix on `support`, its positive quotient, and the left (and for
/// the trace form, right) translation actions on it.
///
/// The left action is tested on the element `θ(e)` of every base edge,
/// which is how a lifted edge move acts on the fibre, and on the support
/// elements themselves.
pub fn non_l2_representation(
    rep: &UnitaryRep,
    form: &GramForm,
    support: &[GroupElement],
    complex: &ConfigComplex,
    pres: &Pi1Presentation,
    tol: f64,
) -> Result<NonL2Report> {
    let backend: &GroupBackend = pres.backend()?;
    let rep = rep.aligned_to(pres)?;
    let d = rep.dim();
    if support.is_empty() {
        return Err(Error::InvalidParameter("empty support".into()));
    }
    let matrix = |g: &GroupElement| rep.evaluate(&backend.to_word(g));
    let phi = |m: &CMatrix| -> Result<CMatrix> {
        match form {
            GramForm::Vector(v) => {
                if v.len() != d {
                    return Err(Error::InvalidParameter(format!("cyclic vector has length {}, expected {d}", v.len())));
                }
                Ok(m * CMatrix::from_column_slice(d, 1, v.as_slice()))
            }
            GramForm::Trace => Ok(m.clone()),
        }
    };
    let images = support.iter().map(|g| phi(&matrix(g))).collect::<Result<Vec<_>>>()?;
    let n = support.len();
    let gram = CMatrix::from_fn(n, n, |a, b| inner(&images[a], &images[b]));
    let all_ones_defect = gram.iter().map(|z| (z - c64(1.0, 0.0)).norm()).fold(0.0, f64::max);

    let (values, vectors) = hermitian_eigen(&gram);
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let min_gram_eigenvalue = values[0];
    if min_gram_eigenvalue < -NEGATIVE_TOL * scale {
        return Err(Error::NumericalFailure(format!("Gram matrix is indefinite (eigenvalue {min_gram_eigenvalue:.3e})")));
    }
    let kept: Vec<usize> = (0..n).filter(|&i| values[i] > 1e-9 * scale).collect();
    // basis vector a is Σ_g C_{ga} e_g with C = V Λ^{-1/2}; its image is
    // orthonormal in the target space
    let basis: Vec<CMatrix> = kept
        .iter()
        .map(|&i| {
            let s = 1.0 / values[i].sqrt();
            let mut u = CMatrix::zeros(images[0].nrows(), images[0].ncols());
            for (g, img) in images.iter().enumerate() {
                u += img * (vectors[(g, i)] * s);
            }
            u
        })
        .collect();
    let one = phi(&identity(d))?;
    let e1 = DVector::from_iterator(basis.len(), basis.iter().map(|u| inner(u, &one)));
    let q = Quotient { basis, e1 };
    let k = q.basis.len();

    let mut tests: Vec<GroupElement> = support.to_vec();
    let mut edge_moves = 0;
    for e in 0..complex.num_edges() {
        tests.push(pres.edge_element(DirEdge::forward(e))?);
        edge_moves += 1;
    }
    tests.sort();
    tests.dedup();

    let full_left = match form {
        GramForm::Vector(_) => k == d,
        GramForm::Trace => k == d * d,
    };
    let trace_form = matches!(form, GramForm::Trace);
    let mult = if trace_form { d as f64 } else { 1.0 };
    let mut left_unitarity_defect = 0.0f64;
    let mut left_homomorphism_defect = 0.0f64;
    let mut expectation_defect = 0.0f64;
    let mut left_trace = 0.0f64;
    let mut right_unitarity = 0.0f64;
    let mut right_trace = 0.0f64;
    let mut right_expectation = 0.0f64;
    let mut commutation = 0.0f64;
    let mats: Vec<CMatrix> = tests.iter().map(&matrix).collect();
    let lefts: Vec<CMatrix> = mats.iter().map(|m| q.left(m)).collect();
    let rights: Vec<CMatrix> = if trace_form { mats.iter().map(|m| q.right(m)).collect() } else { Vec::new() };
    for (i, m) in mats.iter().enumerate() {
        let ql = &lefts[i];
        left_unitarity_defect = left_unitarity_defect.max(unitarity_defect(ql));
        let expected = inner(&one, &(m * &one));
        expectation_defect = expectation_defect.max((q.e1.dotc(&(ql * &q.e1)) - expected).norm());
        left_trace = left_trace.max((ql.trace() - m.trace() * mult).norm());
        if trace_form {
            let qr = &rights[i];
            right_unitarity = right_unitarity.max(unitarity_defect(qr));
            right_trace = right_trace.max((qr.trace() - m.trace().conj() * mult).norm());
            right_expectation = right_expectation.max((q.e1.dotc(&(qr * &q.e1)) - expected.conj()).norm());
        }
    }
    for i in 0..tests.len().min(24) {
        for j in 0..tests.len().min(24) {
            let prod = backend.multiply(&tests[i], &tests[j]);
            let qp = q.left(&matrix(&prod));
            left_homomorphism_defect = left_homomorphism_defect.max((&lefts[i] * &lefts[j] - qp).norm());
            if trace_form {
                let c = &lefts[i] * &rights[j] - &rights[j] * &lefts[i];
                commutation = commutation.max(c.norm());
            }
        }
    }
    Ok(NonL2Report {
        form: if trace_form { "trace".into() } else { "vector".into() },
        support_size: n,
        rep_dim: d,
        quotient_dim: k,
        min_gram_eigenvalue,
        all_ones_defect,
        edge_moves,
        left_unitarity_defect,
        left_homomorphism_defect,
        expectation_defect,
        left_trace_defect: full_left.then_some(left_trace),
        right_unitarity_defect: trace_form.then_some(right_unitarity),
        right_trace_defect: (trace_form && full_left).then_some(right_trace),
        right_expectation_defect: trace_form.then_some(right_expectation),
        commutation_defect: trace_form.then_some(commutation),
        tolerance: tol,
    })
}
