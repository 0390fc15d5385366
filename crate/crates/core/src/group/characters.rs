//! Character tables of finite groups.
//!
//! Generic groups get their table numerically: a random Hermitian
//! combination of class-sum operators in the right regular representation
//! has one eigenspace per irreducible, equal to the range of the central
//! idempotent; characters are read off the idempotent's matrix. Cyclic
//! groups, `S_3` and `S_4` are also recognised and get exact tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::finite::FiniteGroup;
use crate::error::{Error, Result};
use crate::linalg::{c64, cluster, hermitian_eigen, phase, CMatrix, C64};

#[derive(Debug, Clone)]
pub struct CharacterTable {
    /// Conjugacy classes in the group's canonical order.
    pub classes: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
    /// `characters[i][j]` is the value of irreducible `i` on class `j`.
    pub characters: Vec<Vec<C64>>,
    class_of: Vec<usize>,
}

/// Right regular representation `R_r(g) e_h = e_{h g⁻¹}` as a permutation
/// matrix.
pub fn right_regular(g: &FiniteGroup, a: usize) -> CMatrix {
    let n = g.order();
    let ainv = g.inverse(a);
    let mut m = CMatrix::zeros(n, n);
    for h in 0..n {
        m[(g.mul(h, ainv), h)] = c64(1.0, 0.0);
    }
    m
}

/// Left regular representation `R_l(g) e_h = e_{g h}`.
pub fn left_regular(g: &FiniteGroup, a: usize) -> CMatrix {
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for h in 0..n {
        m[(g.mul(a, h), h)] = c64(1.0, 0.0);
    }
    m
}

fn class_index(n: usize, classes: &[Vec<usize>]) -> Vec<usize> {
    let mut class_of = vec![0; n];
    for (j, c) in classes.iter().enumerate() {
        for &g in c {
            class_of[g] = j;
        }
    }
    class_of
}

fn cmp_key(v: &[C64]) -> Vec<(i64, i64)> {
    v.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

impl CharacterTable {
    fn assemble(g: &FiniteGroup, classes: Vec<Vec<usize>>, mut rows: Vec<(usize, Vec<C64>)>) -> Self {
        rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| cmp_key(&b.1).cmp(&cmp_key(&a.1))));
        let class_of = class_index(g.order(), &classes);
        CharacterTable {
            classes,
            dims: rows.iter().map(|r| r.0).collect(),
            characters: rows.into_iter().map(|r| r.1).collect(),
            class_of,
        }
    }

    pub fn num_irreps(&self) -> usize {
        self.dims.len()
    }

    pub fn value(&self, irrep: usize, element: usize) -> C64 {
        self.characters[irrep][self.class_of[element]]
    }

    /// Exact table when the group is recognised, numeric otherwise.
    pub fn for_group(g: &FiniteGroup) -> Result<Self> {
        match Self::builtin(g) {
            Some(t) => Ok(t),
            None => Self::compute(g),
        }
    }

    /// Exact tables for cyclic groups, `S_3` and `S_4`.
    pub fn builtin(g: &FiniteGroup) -> Option<Self> {
        let n = g.order();
        let classes = g.conjugacy_classes();
        let orders: Vec<usize> = classes.iter().map(|c| g.element_order(c[0])).collect();
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        let int = |v: &[i32]| v.iter().map(|&x| c64(x as f64, 0.0)).collect::<Vec<_>>();

        if g.is_abelian() {
            let t = (0..n).find(|&a| g.element_order(a) == n)?;
            let mut power = vec![0usize; n];
            let mut x = 0;
            for m in 0..n {
                power[x] = m;
                x = g.mul(x, t);
            }
            let rows = (0..n)
                .map(|k| {
                    let row = classes.iter().map(|c| phase((k * power[c[0]]) as f64 / n as f64)).collect();
                    (1, row)
                })
                .collect();
            return Some(Self::assemble(g, classes, rows));
        }
        let by_type = |order: usize, size: usize| -> Option<usize> {
            (0..classes.len()).find(|&j| orders[j] == order && sizes[j] == size)
        };
        let layout = |spec: &[(usize, usize)], table: &[(usize, &[i32])]| -> Option<Self> {
            let idx: Option<Vec<usize>> = spec.iter().map(|&(o, s)| by_type(o, s)).collect();
            let idx = idx?;
            let rows = table
                .iter()
                .map(|(d, vals)| {
                    let mut row = vec![c64(0.0, 0.0); classes.len()];
                    for (k, &j) in idx.iter().enumerate() {
                        row[j] = int(vals)[k];
                    }
                    (*d, row)
                })
                .collect();
            Some(Self::assemble(g, classes.clone(), rows))
        };
        if n == 6 && classes.len() == 3 {
            // e, transpositions, 3-cycles
            return layout(
                &[(1, 1), (2, 3), (3, 2)],
                &[(1, &[1, 1, 1]), (1, &[1, -1, 1]), (2, &[2, 0, -1])],
            );
        }
        if n == 24 && classes.len() == 5 {
            // e, (12), (12)(34), (123), (1234)
            return layout(
                &[(1, 1), (2, 6), (2, 3), (3, 8), (4, 6)],
                &[
                    (1, &[1, 1, 1, 1, 1]),
                    (1, &[1, -1, 1, 1, -1]),
                    (2, &[2, 0, 2, -1, 0]),
                    (3, &[3, 1, -1, 0, -1]),
                    (3, &[3, -1, -1, 0, 1]),
                ],
            );
        }
        None
    }

    /// Numeric table from the eigenspaces of a random central Hermitian
    /// element of the regular representation.
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        let n = g.order();
        let classes = g.conjugacy_classes();
        let regular: Vec<CMatrix> = (0..n).map(|a| right_regular(g, a)).collect();
        for attempt in 0..8u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + attempt);
            let mut h = CMatrix::zeros(n, n);
            for class in &classes {
                let mut z = CMatrix::zeros(n, n);
                for &a in class {
                    z += &regular[a];
                }
                let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let herm = &z + z.adjoint();
                let anti = (&z - z.adjoint()) * c64(0.0, 1.0);
                h += herm * c64(a, 0.0) + anti * c64(b, 0.0);
            }
            let (values, vectors) = hermitian_eigen(&h);
            let blocks = cluster(&values, 1e-8 * (1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
            let mut rows = Vec::new();
            let mut start = 0;
            let mut ok = true;
            for &(_, mult) in &blocks {
                let d = (mult as f64).sqrt().round() as usize;
                if d * d != mult {
                    ok = false;
                    break;
                }
                let v = vectors.columns(start, mult);
                let p = v * v.adjoint();
                start += mult;
                let row = classes
                    .iter()
                    .map(|c| {
                        let a = c[0];
                        (p[(g.inverse(a), 0)] * (n as f64 / d as f64)).conj()
                    })
                    .collect();
                rows.push((d, row));
            }
            if !ok {
                continue;
            }
            let table = Self::assemble(g, classes.clone(), rows);
            if table.num_irreps() == classes.len() && table.orthogonality_defect() < 1e-8 {
                return Ok(table);
            }
        }
        Err(Error::UnsupportedGroup(format!("character table of group of order {n} did not separate")))
    }

    /// Largest deviation of the row orthogonality relations
    /// `Σ_j |C_j| χ_a(C_j) conj χ_b(C_j) = |G| δ_ab`, scaled by `1/|G|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n: usize = self.classes.iter().map(Vec::len).sum();
        let mut worst = 0.0f64;
        for a in 0..self.num_irreps() {
            for b in 0..self.num_irreps() {
                let s: C64 = self
                    .classes
                    .iter()
                    .enumerate()
                    .map(|(j, c)| self.characters[a][j] * self.characters[b][j].conj() * c.len() as f64)
                    .sum();
                let target = if a == b { n as f64 } else { 0.0 };
                worst = worst.max((s - c64(target, 0.0)).norm() / n as f64);
            }
        }
        worst
    }

    /// Largest entrywise gap to another table over the same classes, or
    /// `None` if the shapes differ.
    pub fn distance(&self, other: &CharacterTable) -> Option<f64> {
        if self.dims != other.dims || self.classes != other.classes {
            return None;
        }
        Some(
            self.characters
                .iter()
                .zip(&other.characters)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
                .fold(0.0, f64::max),
        )
    }
}

/// Largest group for which irreducible matrices are extracted from the
/// dense regular representation.
pub const MAX_REGULAR_ORDER: usize = 512;

/// Matrices of every irreducible representation on the group's generators,
/// rows in the order of `table`.
///
/// A `d`-dimensional irreducible is cut out of its isotypic block of the
/// left regular representation by diagonalising a random Hermitian element
/// of the right regular algebra, which commutes with the left action and
/// splits the block into `d` invariant copies.
pub fn irreducible_representations(g: &FiniteGroup, table: &CharacterTable) -> Result<Vec<Vec<CMatrix>>> {
    let n = g.order();
    if n > MAX_REGULAR_ORDER {
        return Err(Error::UnsupportedGroup(format!(
            "irreducible matrices need |G| <= {MAX_REGULAR_ORDER}, got {n}"
        )));
    }
    let left: Vec<CMatrix> = (0..n).map(|a| left_regular(g, a)).collect();
    let right: Vec<CMatrix> = (0..n).map(|a| right_regular(g, a)).collect();
    let mut out = Vec::with_capacity(table.num_irreps());
    for i in 0..table.num_irreps() {
        let d = table.dims[i];
        if d == 1 {
            out.push(
                (0..g.num_generators())
                    .map(|k| CMatrix::from_element(1, 1, table.value(i, g.generator(k))))
                    .collect(),
            );
            continue;
        }
        let mut p = CMatrix::zeros(n, n);
        for a in 0..n {
            p += &left[a] * (table.value(i, a).conj() * (d as f64 / n as f64));
        }
        let (pvals, pvecs) = hermitian_eigen(&p);
        let block = d * d;
        if (pvals[n - block] - 1.0).abs() > 1e-8 || (n > block && pvals[n - block - 1].abs() > 1e-8) {
            return Err(Error::UnsupportedGroup(format!("isotypic block {i} has the wrong rank")));
        }
        let basis = pvecs.columns(n - block, block).into_owned();
        let mut found = None;
        for attempt in 0..8u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x1e1e + attempt);
            let mut x = CMatrix::zeros(n, n);
            for r in &right {
                x += r * c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let a = &x + x.adjoint();
            let m = basis.adjoint() * a * &basis;
            let (vals, vecs) = hermitian_eigen(&m);
            let spread = vals[d - 1] - vals[0];
            let gap = vals[d] - vals[d - 1];
            if spread > 1e-8 || gap < 1e-6 {
                continue;
            }
            let q = &basis * vecs.columns(0, d);
            let rho: Vec<CMatrix> = (0..n).map(|a| q.adjoint() * &left[a] * &q).collect();
            let ok = (0..n).all(|a| {
                (rho[a].trace() - table.value(i, a)).norm() < 1e-8
                    && crate::linalg::unitarity_defect(&rho[a]) < 1e-8
            });
            if ok {
                found = Some((0..g.num_generators()).map(|k| rho[g.generator(k)].clone()).collect());
                break;
            }
        }
        out.push(found.ok_or_else(|| Error::DecompositionFailure(format!("could not isolate irreducible {i}")))?);
    }
    Ok(out)
}
