//! Amenability verdicts with Kesten evidence: the spectral radius of the
//! simple random walk on the Cayley graph, estimated on word-metric balls
//! with Dirichlet truncation.
//!
//! Restricting the walk operator to a ball can only lower its top
//! eigenvalue, and growing the ball can only raise it, so the estimates
//! increase with the radius towards the spectral radius of the whole
//! group. That radius is 1 exactly for amenable groups.

use std::collections::HashMap;

use serde::Serialize;

use super::ball_elements;
use crate::eigen::lanczos_largest;
use crate::error::Result;
use crate::group::{GroupBackend, Letter};

const LANCZOS_TOL: f64 = 1e-10;
const LANCZOS_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KestenEstimate {
    pub radius: usize,
    pub ball_size: usize,
    /// Top eigenvalue of the truncated walk operator.
    pub estimate: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmenabilityReport {
    pub backend: String,
    pub amenable: bool,
    pub reason: String,
    /// Set for finite groups, whose walk operator fixes the constant vector.
    pub exact: Option<f64>,
    pub estimates: Vec<KestenEstimate>,
    /// Estimates never decrease with the radius (up to the solver
    /// tolerance).
    pub monotone: bool,
    /// Limit of the last two estimates under a `1/(r+1)²` correction.
    pub extrapolated: Option<f64>,
    /// Known spectral radius of the full group, where available.
    pub reference: Option<f64>,
}

/// Spectral radius of the simple random walk for the group classes with a
/// closed form: `√(2k−1)/k` for the free group of rank `k ≥ 1`, and 1 for
/// amenable groups.
pub fn reference_spectral_radius(backend: &GroupBackend) -> Option<f64> {
    match backend {
        GroupBackend::Free { rank } if *rank >= 1 => {
            let k = *rank as f64;
            Some((2.0 * k - 1.0).sqrt() / k)
        }
        b if b.is_amenable() => Some(1.0),
        _ => None,
    }
}

/// Radii used when none are given.
pub fn default_radii(backend: &GroupBackend) -> Vec<usize> {
    match backend {
        GroupBackend::Free { rank } if *rank >= 2 => vec![4, 6, 8, 10, 12],
        _ => vec![5, 10, 15, 20],
    }
}

/// Free group of rank `k` restricted to the ball of radius `r`: the ball is
/// a tree, stored as a parent array in breadth-first order.
fn free_ball_parents(rank: usize, radius: usize) -> Vec<u32> {
    let letters = 2 * rank;
    let mut parent = vec![u32::MAX];
    let mut last: Vec<u8> = vec![u8::MAX];
    let mut level = 0..1usize;
    for _ in 0..radius {
        let start = parent.len();
        for v in level.clone() {
            for l in 0..letters as u8 {
                // letter l and l ^ 1 are inverse to each other
                if last[v] == u8::MAX || l != last[v] ^ 1 {
                    parent.push(v as u32);
                    last.push(l);
                }
            }
        }
        level = start..parent.len();
    }
    parent
}

/// Neighbour lists of the Cayley ball for backends without a tree shortcut.
fn generic_ball(backend: &GroupBackend, radius: Option<usize>) -> Vec<Vec<u32>> {
    let (elements, _) = ball_elements(backend, radius);
    let index: HashMap<_, u32> = elements.iter().cloned().enumerate().map(|(i, g)| (g, i as u32)).collect();
    let letters: Vec<_> = (0..backend.num_generators())
        .flat_map(|g| [backend.letter(Letter::gen(g)), backend.letter(Letter::inv(g))])
        .collect();
    elements
        .iter()
        .map(|g| letters.iter().filter_map(|s| index.get(&backend.multiply(g, s)).copied()).collect())
        .collect()
}

/// Top eigenvalue of the walk operator `P = (1/2k) Σ_s R(s)` restricted to
/// the ball of the given radius.
pub fn kesten_estimate(backend: &GroupBackend, radius: usize) -> Result<KestenEstimate> {
    let k = backend.num_generators();
    if k == 0 {
        return Ok(KestenEstimate { radius, ball_size: 1, estimate: 1.0, iterations: 0, residual: 0.0 });
    }
    let scale = 1.0 / (2 * k) as f64;
    let (ball_size, result) = match backend {
        GroupBackend::Free { rank } => {
            let parent = free_ball_parents(*rank, radius);
            let n = parent.len();
            let apply = |x: &[f64], y: &mut [f64]| {
                y.fill(0.0);
                for v in 1..n {
                    let p = parent[v] as usize;
                    y[v] += x[p];
                    y[p] += x[v];
                }
                y.iter_mut().for_each(|z| *z *= scale);
            };
            (n, lanczos_largest(n, apply, LANCZOS_TOL, LANCZOS_MAX_ITER, radius as u64)?)
        }
        _ => {
            let adj = generic_ball(backend, Some(radius));
            let n = adj.len();
            let apply = |x: &[f64], y: &mut [f64]| {
                for (v, nb) in adj.iter().enumerate() {
                    y[v] = scale * nb.iter().map(|&u| x[u as usize]).sum::<f64>();
                }
            };
            (n, lanczos_largest(n, apply, LANCZOS_TOL, LANCZOS_MAX_ITER, radius as u64)?)
        }
    };
    Ok(KestenEstimate {
        radius,
        ball_size,
        estimate: result.value,
        iterations: result.iterations,
        residual: result.residual,
    })
}

/// Verdict by group class, with Kesten estimates as evidence. Finite
/// groups get the exact value 1, certified by every vertex of the Cayley
/// graph keeping all `2k` neighbours (so the constant vector is fixed by
/// the walk, whose norm is at most 1).
pub fn amenability_report(backend: &GroupBackend, radii: Option<&[usize]>) -> Result<AmenabilityReport> {
    let amenable = backend.is_amenable();
    let reason = match backend {
        GroupBackend::Finite(_) | GroupBackend::Cyclic { .. } => "finite groups are amenable".to_string(),
        GroupBackend::FreeAbelian { rank } => format!("free abelian group of rank {rank} is amenable"),
        GroupBackend::Free { rank } if *rank >= 2 => {
            format!("free group of rank {rank} contains F2 and is not amenable")
        }
        GroupBackend::Free { rank } => format!("free group of rank {rank} is abelian, hence amenable"),
    };
    let reference = reference_spectral_radius(backend);
    if backend.order().is_some() {
        let adj = generic_ball(backend, None);
        let full = 2 * backend.num_generators();
        let fixed = adj.iter().all(|nb| nb.len() == full);
        return Ok(AmenabilityReport {
            backend: backend.to_string(),
            amenable,
            reason,
            exact: fixed.then_some(1.0),
            estimates: Vec::new(),
            monotone: true,
            extrapolated: None,
            reference,
        });
    }
    let radii = radii.map_or_else(|| default_radii(backend), <[usize]>::to_vec);
    let estimates = radii.iter().map(|&r| kesten_estimate(backend, r)).collect::<Result<Vec<_>>>()?;
    let mut sorted = estimates.clone();
    sorted.sort_by_key(|e| e.radius);
    let monotone = sorted.windows(2).all(|w| w[1].estimate >= w[0].estimate - LANCZOS_TOL);
    let extrapolated = match sorted.as_slice() {
        [.., a, b] if a.radius < b.radius => {
            let (ra, rb) = ((a.radius + 1) as f64, (b.radius + 1) as f64);
            Some((rb * rb * b.estimate - ra * ra * a.estimate) / (rb * rb - ra * ra))
        }
        _ => None,
    };
    Ok(AmenabilityReport {
        backend: backend.to_string(),
        amenable,
        reason,
        exact: None,
        estimates,
        monotone,
        extrapolated,
        reference,
    })
}
