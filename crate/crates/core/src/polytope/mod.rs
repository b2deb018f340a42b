//! Integral convex polytopes in facet presentation.
//!
//! A polytope is `{p : <p, r_j> + lambda_j >= 0}` with primitive integral normals `r_j`.
//! Lattice enumeration and vertex computations are exact; evaluation at real points uses
//! `f64`.

mod elimination;
mod exact;
mod gc;
pub mod io;
mod vertices;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use elimination::NestedBounds;
pub use gc::{gc_polytope, gc_variable_index, weyl_dim, GcPattern};
pub use vertices::{check_delzant, vertices, DelzantReport, RationalVertex};

/// Zero-based `k`-subsets of `0..n` in lexicographic order.
pub fn combinations_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    exact::combinations(n, k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelzantPolytope {
    pub dim: usize,
    pub facets: Vec<Facet>,
    pub labels: Vec<String>,
    /// Preferred variable order for bound propagation (for GC polytopes: top row first).
    #[serde(skip)]
    order: Option<Vec<usize>>,
}

impl DelzantPolytope {
    /// Builds a polytope after checking dimensions and primitivity of the normals.
    /// Boundedness and the Delzant condition are checked separately.
    pub fn new(facets: Vec<Facet>, labels: Vec<String>) -> Result<Self> {
        let dim = facets
            .first()
            .map(|f| f.normal.len())
            .ok_or_else(|| invalid("a polytope needs at least one facet"))?;
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        for f in &facets {
            if f.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.normal.len(),
                });
            }
            let g = f
                .normal
                .iter()
                .fold(0i128, |g, &x| exact::gcd(g, x as i128));
            if g != 1 {
                return Err(invalid(format!(
                    "facet normal {:?} is not primitive",
                    f.normal
                )));
            }
        }
        let labels = if labels.is_empty() {
            (1..=dim).map(|i| format!("x{i}")).collect()
        } else if labels.len() == dim {
            labels
        } else {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: labels.len(),
            });
        };
        Ok(Self {
            dim,
            facets,
            labels,
            order: None,
        })
    }

    /// Re-validates a deserialized polytope.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.facets, self.labels)
    }

    pub(crate) fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn enumeration_order(&self) -> Vec<usize> {
        self.order
            .clone()
            .unwrap_or_else(|| (0..self.dim).collect())
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            })
        }
    }

    /// `l_j(p) = <p, r_j> + lambda_j` for the facet with zero-based index `j`.
    pub fn support_value(&self, j: usize, p: &[f64]) -> Result<f64> {
        self.check_dim(p.len())?;
        let f = self
            .facets
            .get(j)
            .ok_or_else(|| invalid(format!("facet index {j} out of range")))?;
        Ok(f.normal
            .iter()
            .zip(p)
            .map(|(&r, x)| r as f64 * x)
            .sum::<f64>()
            + f.offset as f64)
    }

    /// Exact version of [`Self::support_value`] for lattice points.
    pub fn support_value_int(&self, j: usize, p: &[i64]) -> Result<i64> {
        self.check_dim(p.len())?;
        let f = self
            .facets
            .get(j)
            .ok_or_else(|| invalid(format!("facet index {j} out of range")))?;
        Ok(f.normal.iter().zip(p).map(|(r, x)| r * x).sum::<i64>() + f.offset)
    }

    /// All facet values at `p`. The caller guarantees `p.len() == dim`.
    pub fn facet_values(&self, p: &[f64]) -> Vec<f64> {
        self.facets
            .iter()
            .map(|f| {
                f.normal
                    .iter()
                    .zip(p)
                    .map(|(&r, x)| r as f64 * x)
                    .sum::<f64>()
                    + f.offset as f64
            })
            .collect()
    }

    pub fn contains(&self, p: &[f64], strict: bool) -> Result<bool> {
        self.check_dim(p.len())?;
        let vals = self.facet_values(p);
        Ok(if strict {
            vals.iter().all(|&v| v > 0.0)
        } else {
            vals.iter().all(|&v| v >= 0.0)
        })
    }

    /// Lattice points in lexicographic order.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        Ok(NestedBounds::new(self)?.lattice_points())
    }

    pub fn vertices(&self) -> Vec<RationalVertex> {
        vertices(self)
    }

    /// Average of the vertices; an interior point for full-dimensional polytopes.
    pub fn barycenter(&self) -> Result<Vec<f64>> {
        let verts = self.vertices();
        if verts.is_empty() {
            return Err(invalid("polytope has no vertices"));
        }
        let mut c = vec![0.0; self.dim];
        for v in &verts {
            for (ci, x) in c.iter_mut().zip(v.to_f64()) {
                *ci += x;
            }
        }
        c.iter_mut().for_each(|x| *x /= verts.len() as f64);
        Ok(c)
    }

    pub fn check_delzant(&self) -> Result<DelzantReport> {
        check_delzant(self)
    }
}

/// The segment `[lo, hi]`.
pub fn interval(lo: i64, hi: i64) -> Result<DelzantPolytope> {
    if lo >= hi {
        return Err(invalid("interval needs lo < hi"));
    }
    DelzantPolytope::new(
        vec![
            Facet {
                normal: vec![1],
                offset: -lo,
            },
            Facet {
                normal: vec![-1],
                offset: hi,
            },
        ],
        vec![],
    )
}

/// `{x_i >= 0, scale - sum x_i >= 0}`, the moment polytope of `CP^dim` with `O(scale)`.
pub fn simplex(dim: usize, scale: i64) -> Result<DelzantPolytope> {
    if dim == 0 || scale <= 0 {
        return Err(invalid("simplex needs positive dimension and scale"));
    }
    let mut facets: Vec<Facet> = (0..dim)
        .map(|i| {
            let mut normal = vec![0; dim];
            normal[i] = 1;
            Facet { normal, offset: 0 }
        })
        .collect();
    facets.push(Facet {
        normal: vec![-1; dim],
        offset: scale,
    });
    DelzantPolytope::new(facets, vec![])
}

/// Cartesian product; normals are placed block-diagonally.
pub fn product_polytope(factors: &[DelzantPolytope]) -> Result<DelzantPolytope> {
    if factors.is_empty() {
        return Err(invalid("product of no polytopes"));
    }
    let dim: usize = factors.iter().map(|p| p.dim).sum();
    let mut facets = Vec::new();
    let mut labels = Vec::new();
    let mut shift = 0;
    for (k, p) in factors.iter().enumerate() {
        for f in &p.facets {
            let mut normal = vec![0; dim];
            normal[shift..shift + p.dim].copy_from_slice(&f.normal);
            facets.push(Facet {
                normal,
                offset: f.offset,
            });
        }
        labels.extend(p.labels.iter().map(|l| format!("f{}.{}", k + 1, l)));
        shift += p.dim;
    }
    DelzantPolytope::new(facets, labels)
}

/// Moment polytope of `prod_l P(wedge^l C^n)` with weights `a`: `prod_l a_l Delta^{C(n,l)-1}`.
pub fn pluecker_polytope(n: usize, a: &[i64]) -> Result<DelzantPolytope> {
    if n < 2 || a.len() != n - 1 || a.iter().any(|&x| x <= 0) {
        return Err(invalid("need n >= 2 and n-1 positive weights"));
    }
    let factors = (1..n)
        .map(|l| simplex(binomial(n, l) - 1, a[l - 1]))
        .collect::<Result<Vec<_>>>()?;
    product_polytope(&factors)
}

/// Column Hermite form `m u = h` of an integer matrix, with `u` unimodular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub h: Vec<Vec<i64>>,
    pub u: Vec<Vec<i64>>,
    pub rank: usize,
}

impl LatticeBasis {
    pub fn new(m: &[Vec<i64>]) -> Result<Self> {
        let cols = m.first().map_or(0, Vec::len);
        if cols == 0 || m.iter().any(|r| r.len() != cols) {
            return Err(invalid("matrix rows must have equal positive length"));
        }
        let (h, u, rank) = exact::column_hermite(m);
        let narrow = |a: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>> {
            a.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|v| i64::try_from(v).map_err(|_| invalid("entry overflow")))
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            h: narrow(h)?,
            u: narrow(u)?,
            rank,
        })
    }

    /// Columns of `u` spanning the integer kernel of `m`.
    pub fn kernel(&self) -> Vec<Vec<i64>> {
        (self.rank..self.u.len())
            .map(|c| self.u.iter().map(|row| row[c]).collect())
            .collect()
    }

    /// Whether `m` maps the integer lattice onto the full integer lattice of its target.
    pub fn is_surjective(&self) -> bool {
        self.rank == self.h.len() && (0..self.rank).all(|i| self.h[i][i] == 1)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
