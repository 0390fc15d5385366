//! Sector Hilbert spaces `L²(V, μ) ⊗ C^d`, twisted Laplacians and their
//! spectra.
//!
//! The twisted Laplacian of a flat connection acts as
//!
//! ```text
//! (Hψ)(x) = Σ_{e: x→y} w_e/μ(x) · ψ(x) − w_e/√(μ(x)μ(y)) · U(e)⁻¹ ψ(y)
//! ```
//!
//! which is the weighted graph Laplacian of `L²(V, μ)` written in an
//! orthonormal basis, so it is Hermitian and positive semidefinite. Loop
//! edges contribute in both directions.

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::Serialize;

use crate::complex::ConfigComplex;
use crate::error::{Error, Result};
use crate::holonomy::{cocycle_from_rep, equivalence_fingerprint, fingerprint_distance, FlatConnection, UnitaryRep};
use crate::linalg::{c64, cluster, hermitian_eigenvalues, max_sorted_gap, CMatrix, C64};
use crate::eigen::block_lowest;
use crate::pi1::Pi1Presentation;

/// Operators up to this size are diagonalised densely.
pub const DENSE_CUTOFF: usize = 2000;
/// Gap below which eigenvalues count as one multiplet.
pub const CLUSTER_GAP: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Storage {
    Dense(CMatrix),
    Sparse(CsrMatrix<C64>),
}

/// A Hermitian operator stored densely or as CSR.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    n: usize,
    storage: Storage,
}

impl HermitianOperator {
    pub fn from_dense(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter("operator must be square".into()));
        }
        let defect = crate::linalg::hermiticity_defect(&m);
        if defect > 1e-12 * m.norm().max(1.0) {
            return Err(Error::InvalidParameter(format!("operator is not Hermitian (defect {defect:.3e})")));
        }
        Ok(HermitianOperator { n: m.nrows(), storage: Storage::Dense(m) })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates add up.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        let mut coo = CooMatrix::new(n, n);
        for &(r, c, v) in triplets {
            coo.push(r, c, v);
        }
        let csr = CsrMatrix::from(&coo);
        let op = HermitianOperator { n, storage: Storage::Sparse(csr) };
        let defect = op.sparse_hermiticity_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidParameter(format!("operator is not Hermitian (defect {defect:.3e})")));
        }
        Ok(op)
    }

    fn sparse_hermiticity_defect(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => crate::linalg::hermiticity_defect(m),
            Storage::Sparse(csr) => {
                let t = csr.transpose();
                let mut worst = 0.0f64;
                for (r, c, v) in csr.triplet_iter() {
                    let other = t.get_entry(r, c).map_or(c64(0.0, 0.0), |e| e.into_value());
                    worst = worst.max((v - other.conj()).norm());
                }
                worst
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.iter().filter(|z| z.norm() > 0.0).count(),
            Storage::Sparse(csr) => csr.nnz(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(csr) => {
                let mut m = CMatrix::zeros(self.n, self.n);
                for (r, c, v) in csr.triplet_iter() {
                    m[(r, c)] += *v;
                }
                m
            }
        }
    }

    /// `H X` for a block of column vectors.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(csr) => csr * x,
        }
    }

    /// Upper bound on the spectrum: the largest absolute row sum.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut rows = vec![0.0f64; self.n];
        match &self.storage {
            Storage::Dense(m) => {
                for (r, row) in m.row_iter().enumerate() {
                    rows[r] = row.iter().map(|z| z.norm()).sum();
                }
            }
            Storage::Sparse(csr) => {
                for (r, _, v) in csr.triplet_iter() {
                    rows[r] += v.norm();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.sparse_hermiticity_defect()
    }
}

/// Twisted Laplacian of a flat connection; refuses non-flat input.
pub fn twisted_laplacian(complex: &ConfigComplex, conn: &FlatConnection) -> Result<HermitianOperator> {
    twisted_laplacian_with_tol(complex, conn, crate::holonomy::DEFAULT_TOL)
}

pub fn twisted_laplacian_with_tol(complex: &ConfigComplex, conn: &FlatConnection, tol: f64) -> Result<HermitianOperator> {
    conn.ensure_flat(complex, tol)?;
    let d = conn.dim();
    let n = complex.num_vertices() * d;
    let mut triplets = Vec::new();
    for x in 0..complex.num_vertices() {
        let mu_x = complex.vertices()[x].weight;
        for &e in complex.outgoing(x) {
            let y = complex.target(e);
            let w = complex.edges()[e.edge].weight;
            let mu_y = complex.vertices()[y].weight;
            for a in 0..d {
                triplets.push((x * d + a, x * d + a, c64(w / mu_x, 0.0)));
            }
            let hop = conn.edge_matrix(e).adjoint() * c64(-w / (mu_x * mu_y).sqrt(), 0.0);
            for a in 0..d {
                for b in 0..d {
                    if hop[(a, b)] != c64(0.0, 0.0) {
                        triplets.push((x * d + a, y * d + b, hop[(a, b)]));
                    }
                }
            }
        }
    }
    HermitianOperator::from_triplets(n, &triplets)
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Ascending eigenvalues (all of them, or the lowest `k`).
    pub values: Vec<f64>,
    /// `(value, multiplicity)` clusters at [`CLUSTER_GAP`].
    pub multiplets: Vec<(f64, usize)>,
    /// Largest `‖Hv − λv‖` of the iterative solver; `None` for the dense
    /// direct solver.
    pub max_residual: Option<f64>,
    pub method: String,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub dense_cutoff: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { dense_cutoff: DENSE_CUTOFF, tol: 1e-8, seed: 0x5ec7, max_sweeps: 2000 }
    }
}

/// Ascending eigenvalues of `h`; the lowest `k` when given.
pub fn spectrum(h: &HermitianOperator, k: Option<usize>) -> Result<Spectrum> {
    spectrum_with(h, k, &SpectrumOptions::default())
}

pub fn spectrum_with(h: &HermitianOperator, k: Option<usize>, opts: &SpectrumOptions) -> Result<Spectrum> {
    let n = h.dim();
    let k = k.unwrap_or(n).min(n);
    if n <= opts.dense_cutoff || k == n {
        let values = hermitian_eigenvalues(&h.to_dense())[..k].to_vec();
        return Ok(Spectrum { multiplets: cluster(&values, CLUSTER_GAP), values, max_residual: None, method: "dense".into() });
    }
    let pairs = block_lowest(n, k, |x| h.apply(x), h.gershgorin_bound(), opts.tol, opts.max_sweeps, opts.seed)?;
    let max_residual = pairs.residuals.iter().copied().fold(0.0, f64::max);
    let values = pairs.values;
    Ok(Spectrum {
        multiplets: cluster(&values, CLUSTER_GAP),
        values,
        max_residual: Some(max_residual),
        method: "chebyshev-subspace".into(),
    })
}

/// One sector in a [`SectorComparison`].
#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub label: String,
    pub dim: usize,
    pub spectrum: Vec<f64>,
    pub min_eigenvalue: f64,
    #[serde(skip)]
    pub fingerprint: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorPair {
    pub first: usize,
    pub second: usize,
    /// Fingerprints differ beyond tolerance (proves inequivalence).
    pub fingerprints_differ: bool,
    /// Largest eigenvalue gap, `None` when the spectra have different sizes.
    pub spectral_gap: Option<f64>,
}

impl SectorPair {
    pub fn spectra_differ(&self, tol: f64) -> bool {
        self.spectral_gap.is_none_or(|g| g > tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorComparison {
    pub sectors: Vec<SectorReport>,
    pub pairs: Vec<SectorPair>,
    pub simply_connected: bool,
    /// For simply connected complexes: largest gap between any sector
    /// spectrum and `d` copies of the untwisted spectrum.
    pub max_gap_to_untwisted: Option<f64>,
    pub tolerance: f64,
}

impl SectorComparison {
    /// On simply connected complexes every sector must reproduce the
    /// untwisted spectrum.
    pub fn passed(&self) -> bool {
        self.max_gap_to_untwisted.is_none_or(|g| g <= self.tolerance)
    }
}

/// Spectrum and fingerprint of each representation's sector, pairwise
/// comparisons, and the uniqueness check on simply connected complexes.
pub fn sector_compare(
    complex: &ConfigComplex,
    pres: &Pi1Presentation,
    reps: &[(String, UnitaryRep)],
    fingerprint_len: usize,
    tol: f64,
) -> Result<SectorComparison> {
    let mut sectors = Vec::with_capacity(reps.len());
    for (label, rep) in reps {
        let conn = cocycle_from_rep(complex, pres, rep)?;
        let spec = spectrum(&twisted_laplacian(complex, &conn)?, None)?;
        sectors.push(SectorReport {
            label: label.clone(),
            dim: rep.dim(),
            min_eigenvalue: spec.values.first().copied().unwrap_or(0.0),
            spectrum: spec.values,
            fingerprint: equivalence_fingerprint(complex, pres, &conn, fingerprint_len)?,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..sectors.len() {
        for j in i + 1..sectors.len() {
            let fp = fingerprint_distance(&sectors[i].fingerprint, &sectors[j].fingerprint);
            pairs.push(SectorPair {
                first: i,
                second: j,
                fingerprints_differ: fp.is_none_or(|g| g > tol),
                spectral_gap: max_sorted_gap(&sectors[i].spectrum, &sectors[j].spectrum),
            });
        }
    }
    let simply_connected = pres.backend()?.is_trivial();
    let max_gap_to_untwisted = if simply_connected {
        let base = spectrum(&twisted_laplacian(complex, &FlatConnection::trivial(complex, 1))?, None)?.values;
        let mut worst = 0.0f64;
        for s in &sectors {
            let copies: Vec<f64> = base.iter().flat_map(|&v| std::iter::repeat_n(v, s.dim)).collect();
            worst = worst.max(max_sorted_gap(&copies, &s.spectrum).unwrap_or(f64::INFINITY));
        }
        Some(worst)
    } else {
        None
    };
    Ok(SectorComparison { sectors, pairs, simply_connected, max_gap_to_untwisted, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex};
    use crate::group::word::parse_word;
    use crate::holonomy::GaugeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn ab_spectrum(n: usize, theta: f64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|k| 2.0 - 2.0 * (TAU * (k as f64 + theta) / n as f64).cos()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn cycle_sector(n: usize, theta: f64) -> Vec<f64> {
        let c = build_cycle(n).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        let rep = UnitaryRep::character(p.generator_names(), &[theta]).unwrap();
        let conn = cocycle_from_rep(&c, &p, &rep).unwrap();
        spectrum(&twisted_laplacian(&c, &conn).unwrap(), None).unwrap().values
    }

    #[test]
    fn aharonov_bohm_closed_form() {
        for theta in [0.0, 0.1, 0.25, 0.5, 0.9] {
            let got = cycle_sector(8, theta);
            assert!(max_sorted_gap(&got, &ab_spectrum(8, theta)).unwrap() < 1e-10, "θ={theta}");
        }
        let half = cycle_sector(8, 0.5);
        assert!((half[0] - (2.0 - 2.0 * (std::f64::consts::PI / 8.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn periodic_and_symmetric_in_theta() {
        for theta in [0.13, 0.37] {
            let a = cycle_sector(9, theta);
            assert!(max_sorted_gap(&a, &cycle_sector(9, theta + 1.0)).unwrap() < 1e-10);
            assert!(max_sorted_gap(&a, &cycle_sector(9, -theta)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn trivial_sector_has_kernel() {
        let s = cycle_sector(8, 0.0);
        assert!(s[0].abs() < 1e-10);
        assert!(cycle_sector(8, 0.3)[0] > 1e-3);
        let one = HermitianOperator::from_dense(CMatrix::zeros(1, 1)).unwrap();
        assert_eq!(spectrum(&one, None).unwrap().values, vec![0.0]);
    }

    #[test]
    fn s3_sector_operator() {
        let ab: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &ab).unwrap()).collect();
        let c = build_presentation_complex(&ab, &rels).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        let rep = UnitaryRep::s3_standard();
        let h = twisted_laplacian(&c, &cocycle_from_rep(&c, &p, &rep).unwrap()).unwrap().to_dense();
        // one vertex with two loops: 4I − Σ (R(g) + R(g)⁻¹)
        let mut expect = CMatrix::identity(2, 2) * c64(4.0, 0.0);
        for m in rep.matrices() {
            expect -= m + m.adjoint();
        }
        assert!((h - expect).norm() < 1e-14);
    }

    #[test]
    fn non_flat_is_refused() {
        let g = build_grid_with_holes(3, 3, &[]).unwrap();
        let mut mats = vec![CMatrix::identity(1, 1); g.num_edges()];
        mats[0] = CMatrix::from_element(1, 1, crate::linalg::phase(0.1));
        let conn = FlatConnection::new(&g, mats).unwrap();
        assert!(matches!(twisted_laplacian(&g, &conn), Err(Error::NonFlatConnection { .. })));
    }

    #[test]
    fn gauge_covariance() {
        let g = build_grid_with_holes(7, 7, &[crate::complex::CellRect::cell(3, 3)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let conn = cocycle_from_rep(&g, &p, &UnitaryRep::random(p.generator_names(), 2, &mut rng)).unwrap();
        let moved = conn.gauge_transform(&g, &GaugeField::random(g.num_vertices(), 2, &mut rng)).unwrap();
        let a = spectrum(&twisted_laplacian(&g, &conn).unwrap(), None).unwrap().values;
        let b = spectrum(&twisted_laplacian(&g, &moved).unwrap(), None).unwrap().values;
        assert!(max_sorted_gap(&a, &b).unwrap() < 1e-10);
        assert!(a[0] > -1e-10);
    }

    #[test]
    fn weighted_laplacian_is_hermitian_and_psd() {
        let mut c = build_cycle(6).unwrap();
        let text = crate::complex::io::to_text(&c).replace("v02 1", "v02 3.5").replace("e04 v04 v05 1", "e04 v04 v05 0.25");
        c = crate::complex::io::parse_complex(&text).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        let conn = cocycle_from_rep(&c, &p, &UnitaryRep::character(p.generator_names(), &[0.2]).unwrap()).unwrap();
        let h = twisted_laplacian(&c, &conn).unwrap();
        assert!(h.hermiticity_defect() < 1e-14);
        assert!(spectrum(&h, None).unwrap().values[0] > 0.0);
    }

    #[test]
    fn iterative_matches_dense() {
        let g = build_grid_with_holes(30, 30, &[crate::complex::CellRect::cell(10, 12)]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let rep = UnitaryRep::character(p.generator_names(), &[0.3]).unwrap();
        let h = twisted_laplacian(&g, &cocycle_from_rep(&g, &p, &rep).unwrap()).unwrap();
        let opts = SpectrumOptions { dense_cutoff: 100, ..Default::default() };
        let it = spectrum_with(&h, Some(6), &opts).unwrap();
        assert_eq!(it.method, "chebyshev-subspace");
        let dense = spectrum(&h, None).unwrap();
        assert!(max_sorted_gap(&it.values, &dense.values[..6]).unwrap() < 1e-8);
    }

    #[test]
    fn uniqueness_on_simply_connected_grid() {
        let g = build_grid_with_holes(5, 5, &[]).unwrap();
        let p = Pi1Presentation::compute(&g, 0).unwrap();
        let reps = vec![("d1".to_string(), UnitaryRep::trivial(vec![], 1)), ("d3".to_string(), UnitaryRep::trivial(vec![], 3))];
        let r = sector_compare(&g, &p, &reps, 4, 1e-10).unwrap();
        assert!(r.simply_connected && r.passed());
    }

    #[test]
    fn cycle_sectors_are_distinct() {
        let c = build_cycle(8).unwrap();
        let p = Pi1Presentation::compute(&c, 0).unwrap();
        let reps: Vec<(String, UnitaryRep)> = [0.0, 0.25, 0.5]
            .iter()
            .map(|&t| (format!("θ={t}"), UnitaryRep::character(p.generator_names(), &[t]).unwrap()))
            .collect();
        let r = sector_compare(&c, &p, &reps, 2, 1e-10).unwrap();
        assert!(r.pairs.iter().all(|q| q.fingerprints_differ && q.spectra_differ(1e-10)));
    }
}
