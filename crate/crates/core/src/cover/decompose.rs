//! Central decomposition of the regular representation of a finite group
//! and of the cover Laplacian.

use serde::Serialize;

use super::{build_cover, CoverExtent, CoverModel};
use crate::complex::ConfigComplex;
use crate::error::{Error, Result};
use crate::group::characters::{left_regular, right_regular, CharacterTable};
use crate::group::FiniteGroup;
use crate::holonomy::{cocycle_from_rep, UnitaryRep};
use crate::linalg::{c64, hermitian_eigen, hermitian_eigenvalues, hermiticity_defect, identity, max_sorted_gap, CMatrix};
use crate::pi1::Pi1Presentation;
use crate::sectors::twisted_laplacian;

/// Largest cover handled by the dense decomposition.
const MAX_COVER_DIM: usize = 3000;

/// Central idempotents `e_i = (d_i/|G|) Σ_g conj(χ_i(g)) R_r(g)` on `l²(G)`,
/// in the group's element order.
pub fn central_projectors(g: &FiniteGroup, table: &CharacterTable) -> Vec<CMatrix> {
    let n = g.order();
    (0..table.num_irreps())
        .map(|i| {
            let scale = table.dims[i] as f64 / n as f64;
            // R_r(c) has a one at (a, b) exactly when a = b c⁻¹, i.e. c = a⁻¹ b
            CMatrix::from_fn(n, n, |a, b| table.value(i, g.mul(g.inverse(a), b)).conj() * scale)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorReport {
    /// `max ‖e_i² − e_i‖`.
    pub idempotency: f64,
    /// `max ‖e_i − e_i*‖`.
    pub hermiticity: f64,
    /// `max_{i≠j} ‖e_i e_j‖`.
    pub orthogonality: f64,
    /// `‖Σ e_i − I‖`.
    pub completeness: f64,
    /// Rank of each projector, read off its trace.
    pub ranks: Vec<usize>,
}

impl ProjectorReport {
    pub fn max_defect(&self) -> f64 {
        self.idempotency.max(self.hermiticity).max(self.orthogonality).max(self.completeness)
    }
}

pub fn projector_defects(projectors: &[CMatrix]) -> ProjectorReport {
    let n = projectors.first().map_or(0, |p| p.nrows());
    let mut report =
        ProjectorReport { idempotency: 0.0, hermiticity: 0.0, orthogonality: 0.0, completeness: 0.0, ranks: Vec::new() };
    let mut sum = CMatrix::zeros(n, n);
    for (i, p) in projectors.iter().enumerate() {
        report.idempotency = report.idempotency.max((p * p - p).norm());
        report.hermiticity = report.hermiticity.max(hermiticity_defect(p));
        for q in &projectors[i + 1..] {
            report.orthogonality = report.orthogonality.max((p * q).norm());
        }
        report.ranks.push(p.trace().re.round() as usize);
        sum += p;
    }
    report.completeness = (sum - identity(n)).norm();
    report
}

/// Group index of each cover element.
fn table_indices(cover: &CoverModel, g: &FiniteGroup) -> Vec<usize> {
    cover.elements().iter().map(|e| g.evaluate(&cover.backend().to_word(e))).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorBlock {
    pub irrep: usize,
    pub dim: usize,
    /// Spectrum of the cover Laplacian restricted to the range of `e_i`.
    pub block_spectrum: Vec<f64>,
    /// Spectrum of the base Laplacian twisted by the irreducible.
    pub sector_spectrum: Vec<f64>,
    /// `‖L W − W B‖` for an orthonormal basis `W` of the block: zero when
    /// the block is invariant.
    pub invariance_defect: f64,
    /// Gap between the block spectrum and `dim` copies of the sector
    /// spectrum.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub group_order: usize,
    pub dims: Vec<usize>,
    pub cover_spectrum: Vec<f64>,
    /// `⊎_i d_i · spec(L_{R_i})`, sorted.
    pub predicted: Vec<f64>,
    pub multiset_gap: f64,
    pub blocks: Vec<SectorBlock>,
    pub projectors: ProjectorReport,
    pub tolerance: f64,
}

impl Decomposition {
    pub fn passed(&self) -> bool {
        self.multiset_gap <= self.tolerance
            && self.blocks.iter().all(|b| b.gap <= self.tolerance && b.invariance_defect <= self.tolerance)
            && self.projectors.max_defect() <= 1e-10
    }
}

/// Full-cover spectrum against the sector spectra of every irreducible,
/// both as multisets and block by block. The report is returned whether or
/// not the identity holds.
pub fn decomposition_report(complex: &ConfigComplex, pres: &Pi1Presentation, tol: f64) -> Result<Decomposition> {
    let g = pres
        .backend()?
        .to_finite()
        .ok_or_else(|| Error::UnsupportedGroup(format!("{} is infinite", pres.backend_guess())))?;
    let cover = build_cover(complex, pres, CoverExtent::Full)?;
    let dim = cover.num_vertices();
    if dim > MAX_COVER_DIM {
        return Err(Error::UnsupportedGroup(format!(
            "cover of dimension {dim} exceeds the dense limit {MAX_COVER_DIM}"
        )));
    }
    let (table, reps) = UnitaryRep::irreducibles(pres)?;
    let lap = cover.laplacian()?.to_dense();
    let cover_spectrum = hermitian_eigenvalues(&lap);

    let projectors = central_projectors(&g, &table);
    let report = projector_defects(&projectors);
    let idx = table_indices(&cover, &g);
    let nv = complex.num_vertices();
    let n = g.order();

    let mut predicted = Vec::with_capacity(dim);
    let mut blocks = Vec::with_capacity(reps.len());
    for (i, rep) in reps.iter().enumerate() {
        let d = table.dims[i];
        let conn = cocycle_from_rep(complex, pres, rep)?;
        let sector = hermitian_eigenvalues(&twisted_laplacian(complex, &conn)?.to_dense());
        let copies: Vec<f64> = sector.iter().flat_map(|&v| std::iter::repeat_n(v, d)).collect();
        predicted.extend_from_slice(&copies);

        // the projector in cover element order, and a basis of its range
        let p = &projectors[i];
        let pc = CMatrix::from_fn(n, n, |a, b| p[(idx[a], idx[b])]);
        let (vals, vecs) = hermitian_eigen(&pc);
        let rank = vals.iter().filter(|&&v| v > 0.5).count();
        let q = vecs.columns(n - rank, rank);
        let mut w = CMatrix::zeros(dim, nv * rank);
        for a in 0..n {
            for x in 0..nv {
                for c in 0..rank {
                    w[(cover.vertex(x, a), x * rank + c)] = q[(a, c)];
                }
            }
        }
        let lw = &lap * &w;
        let b = w.adjoint() * &lw;
        let b = (&b + b.adjoint()).scale(0.5);
        let invariance_defect = (lw - &w * &b).norm();
        let block_spectrum = hermitian_eigenvalues(&b);
        let gap = max_sorted_gap(&block_spectrum, &copies).unwrap_or(f64::INFINITY);
        blocks.push(SectorBlock { irrep: i, dim: d, block_spectrum, sector_spectrum: sector, invariance_defect, gap });
    }
    predicted.sort_by(f64::total_cmp);
    let multiset_gap = max_sorted_gap(&cover_spectrum, &predicted).unwrap_or(f64::INFINITY);
    Ok(Decomposition {
        group_order: n,
        dims: table.dims.clone(),
        cover_spectrum,
        predicted,
        multiset_gap,
        blocks,
        projectors: report,
        tolerance: tol,
    })
}

/// [`decomposition_report`], failing with a decomposition error when the
/// identity does not hold within `tol`.
pub fn decompose_cover_spectrum(complex: &ConfigComplex, pres: &Pi1Presentation, tol: f64) -> Result<Decomposition> {
    let d = decomposition_report(complex, pres, tol)?;
    if !d.passed() {
        let worst = d.blocks.iter().map(|b| b.gap.max(b.invariance_defect)).fold(d.multiset_gap, f64::max);
        return Err(Error::DecompositionFailure(format!("cover spectrum deviates by {worst:.3e} (tolerance {tol:.1e})")));
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyBlock {
    pub irrep: usize,
    pub dim: usize,
    /// `⟨P e₁, R_l(g) P e₁⟩` per element, as `[re, im]`.
    pub left: Vec<[f64; 2]>,
    /// `⟨P e₁, R_r(g) P e₁⟩` per element.
    pub right: Vec<[f64; 2]>,
    pub max_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub blocks: Vec<ConjugacyBlock>,
    pub max_defect: f64,
    pub tolerance: f64,
}

impl ConjugacyReport {
    pub fn passed(&self) -> bool {
        self.max_defect <= self.tolerance
    }
}

/// Left and right matrix elements on the central cyclic vectors `P e₁`
/// compared for complex conjugacy, over every group element.
pub fn conjugacy_check(g: &FiniteGroup, table: &CharacterTable, tol: f64) -> ConjugacyReport {
    let n = g.order();
    let mut e1 = nalgebra::DVector::zeros(n);
    e1[g.identity()] = c64(1.0, 0.0);
    let left: Vec<CMatrix> = (0..n).map(|a| left_regular(g, a)).collect();
    let right: Vec<CMatrix> = (0..n).map(|a| right_regular(g, a)).collect();
    let mut blocks = Vec::new();
    let mut max_defect = 0.0f64;
    for (i, p) in central_projectors(g, table).iter().enumerate() {
        let f = p * &e1;
        let mut block = ConjugacyBlock { irrep: i, dim: table.dims[i], left: Vec::new(), right: Vec::new(), max_defect: 0.0 };
        for a in 0..n {
            let l = f.dotc(&(&left[a] * &f));
            let r = f.dotc(&(&right[a] * &f));
            block.max_defect = block.max_defect.max((l - r.conj()).norm());
            block.left.push([l.re, l.im]);
            block.right.push([r.re, r.im]);
        }
        max_defect = max_defect.max(block.max_defect);
        blocks.push(block);
    }
    ConjugacyReport { blocks, max_defect, tolerance: tol }
}
