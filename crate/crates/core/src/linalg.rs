//! Small dense complex linear-algebra helpers shared by the holonomy,
//! sector and cover modules.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `e^{2πiθ}`.
pub fn phase(theta: f64) -> C64 {
    let a = std::f64::consts::TAU * theta;
    Complex::new(a.cos(), a.sin())
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Frobenius distance between two matrices of equal shape.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// `‖U*U − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    distance(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    distance(h, &h.adjoint())
}

/// Ascending eigenvalues of a Hermitian matrix. Real matrices take the
/// cheaper real symmetric route.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = if h.iter().all(|z| z.im == 0.0) {
        h.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// Ascending eigenpairs of a Hermitian matrix; eigenvectors are the columns
/// of the returned matrix in the same order.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Groups an ascending list into `(value, multiplicity)` clusters; a new
/// cluster starts whenever the gap to the previous value exceeds `gap`.
pub fn cluster(sorted: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &v in sorted {
        match out.last_mut() {
            Some((_, count, sum)) if v - prev <= gap => {
                *count += 1;
                *sum += v;
            }
            _ => out.push((v, 1, v)),
        }
        prev = v;
    }
    out.into_iter()
        .map(|(_, count, sum)| (sum / count as f64, count))
        .collect()
}

/// Largest elementwise gap between two ascending lists, or `None` when the
/// lengths differ.
pub fn max_sorted_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    })
}

/// Haar-distributed random unitary via QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let ph = if n > 0.0 { rjj / n } else { c64(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&z + z.adjoint()).scale(0.5)
}

/// Numerical rank of a Hermitian positive semidefinite matrix, together
/// with its most negative eigenvalue.
pub fn psd_rank(h: &CMatrix, tol: f64) -> (usize, f64) {
    let values = hermitian_eigenvalues(h);
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let rank = values.iter().filter(|&&v| v > tol * scale).count();
    let min = values.first().copied().unwrap_or(0.0);
    (rank, min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            let u = random_unitary(d, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn clustering_counts_multiplicity() {
        let c = cluster(&[0.0, 1.0, 1.0 + 1e-10, 2.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].1, 2);
    }

    #[test]
    fn eigenvalues_of_pauli_x() {
        let h = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let v = hermitian_eigenvalues(&h);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }
}
