use serde::Serialize;

use super::ConfigComplex;
use crate::error::{invalid, Result};
use crate::pi1::Pi1Presentation;

/// A connected vertex subset with its induced edges and faces. `small`
/// regions have trivial induced fundamental group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub center: usize,
    pub radius: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
    pub small: bool,
}

impl Region {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Builds the region spanned by an arbitrary connected vertex set.
    pub fn from_vertices(complex: &ConfigComplex, center: usize, vertices: &[usize]) -> Result<Region> {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        if vs.binary_search(&center).is_err() {
            return Err(invalid("region center is not among its vertices"));
        }
        let (sub, _) = complex.induced(&vs)?;
        let inside = |v: usize| vs.binary_search(&v).is_ok();
        let edges: Vec<usize> = (0..complex.num_edges())
            .filter(|&e| inside(complex.edges()[e].tail) && inside(complex.edges()[e].head))
            .collect();
        let faces: Vec<usize> = (0..complex.num_faces())
            .filter(|&f| complex.faces()[f].boundary.iter().all(|d| edges.binary_search(&d.edge).is_ok()))
            .collect();
        let small = Pi1Presentation::compute(&sub, 0)?.backend().is_ok_and(|b| b.is_trivial());
        let dist = complex.distances_from(center);
        let radius = vs.iter().map(|&v| dist[v]).max().unwrap_or(0);
        Ok(Region { center, radius, vertices: vs, edges, faces, small })
    }
}

/// Graph-metric ball of the given radius around `center`.
pub fn star_region(complex: &ConfigComplex, center: usize, radius: usize) -> Result<Region> {
    if radius == 0 {
        return Err(invalid("star radius must be at least 1"));
    }
    if center >= complex.num_vertices() {
        return Err(invalid(format!("unknown center vertex {center}")));
    }
    let dist = complex.distances_from(center);
    let vertices: Vec<usize> = (0..complex.num_vertices()).filter(|&v| dist[v] <= radius).collect();
    let mut region = Region::from_vertices(complex, center, &vertices)?;
    region.radius = radius;
    Ok(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cycle, build_grid_with_holes, build_presentation_complex};
    use crate::group::word::Letter;

    #[test]
    fn grid_star_is_small() {
        let g = build_grid_with_holes(5, 5, &[]).unwrap();
        let r = star_region(&g, 12, 1).unwrap();
        assert_eq!(r.vertices.len(), 5);
        assert!(r.small);
        let r2 = star_region(&g, 12, 2).unwrap();
        assert!(r2.small);
        assert_eq!(r2.faces.len(), 4);
    }

    #[test]
    fn whole_cycle_is_not_small() {
        let c8 = build_cycle(8).unwrap();
        let r = star_region(&c8, 0, 5).unwrap();
        assert_eq!(r.vertices.len(), 8);
        assert!(!r.small);
        assert!(star_region(&c8, 0, 3).unwrap().small);
    }

    #[test]
    fn z3_complex_is_not_small() {
        let a = vec!["a".to_string()];
        let c = build_presentation_complex(&a, &[vec![Letter::gen(0); 3]]).unwrap();
        let r = star_region(&c, 0, 1).unwrap();
        assert_eq!(r.faces.len(), 1);
        assert!(!r.small);
    }

    #[test]
    fn radius_zero_rejected() {
        let c8 = build_cycle(8).unwrap();
        assert!(star_region(&c8, 0, 0).is_err());
    }
}
