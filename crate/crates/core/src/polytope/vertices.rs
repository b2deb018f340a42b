//! Exact vertex enumeration and the Delzant vertex test.

use std::collections::BTreeSet;

use super::exact::{bareiss_det, combinations, solve_rational};
use super::DelzantPolytope;
use crate::error::{Error, Result};

/// A vertex with rational coordinates `num / den`, `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalVertex {
    pub num: Vec<i128>,
    pub den: i128,
}

impl RationalVertex {
    pub fn to_f64(&self) -> Vec<f64> {
        self.num
            .iter()
            .map(|&n| n as f64 / self.den as f64)
            .collect()
    }

    fn facet_value_scaled(&self, p: &DelzantPolytope, j: usize) -> i128 {
        let f = &p.facets[j];
        f.normal
            .iter()
            .zip(&self.num)
            .map(|(&r, &x)| r as i128 * x)
            .sum::<i128>()
            + f.offset as i128 * self.den
    }

    /// Indices of the facets through this vertex.
    pub fn tight_facets(&self, p: &DelzantPolytope) -> Vec<usize> {
        (0..p.facets.len())
            .filter(|&j| self.facet_value_scaled(p, j) == 0)
            .collect()
    }
}

pub fn vertices(p: &DelzantPolytope) -> Vec<RationalVertex> {
    let d = p.dim;
    let mut found = BTreeSet::new();
    for subset in combinations(p.facets.len(), d) {
        let a: Vec<Vec<i128>> = subset
            .iter()
            .map(|&j| p.facets[j].normal.iter().map(|&r| r as i128).collect())
            .collect();
        let rhs: Vec<i128> = subset
            .iter()
            .map(|&j| -(p.facets[j].offset as i128))
            .collect();
        let Some((num, den)) = solve_rational(&a, &rhs) else {
            continue;
        };
        let v = RationalVertex { num, den };
        if (0..p.facets.len()).all(|j| v.facet_value_scaled(p, j) >= 0) {
            found.insert(v);
        }
    }
    found.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct DelzantReport {
    pub vertices: usize,
}

/// Checks that every vertex is simple and that its edge normals form a lattice basis.
pub fn check_delzant(p: &DelzantPolytope) -> Result<DelzantReport> {
    let verts = vertices(p);
    if verts.is_empty() {
        return Err(crate::error::invalid("polytope has no vertices"));
    }
    for v in &verts {
        let tight = v.tight_facets(p);
        if tight.len() != p.dim {
            return Err(Error::NotDelzant {
                vertex: v.to_f64(),
                reason: format!("{} facets meet, expected {}", tight.len(), p.dim),
            });
        }
        let m: Vec<Vec<i128>> = tight
            .iter()
            .map(|&j| p.facets[j].normal.iter().map(|&r| r as i128).collect())
            .collect();
        let det = bareiss_det(m);
        if det.abs() != 1 {
            return Err(Error::NotDelzant {
                vertex: v.to_f64(),
                reason: format!("normals span a sublattice of index {}", det.abs()),
            });
        }
    }
    Ok(DelzantReport {
        vertices: verts.len(),
    })
}
