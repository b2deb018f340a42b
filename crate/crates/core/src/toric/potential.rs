//! Symplectic potentials `g_s = g_can + h + s * nu(iota^* p)`.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::polytope::DelzantPolytope;

/// A smooth function on a real vector space with explicit derivatives.
pub trait SmoothFunction: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn value(&self, p: &[f64]) -> f64;
    fn gradient(&self, p: &[f64]) -> DVector<f64>;
    fn hessian(&self, p: &[f64]) -> DMatrix<f64>;
}

/// `nu(p) = 1/2 p^T A p` with `A` symmetric positive definite.
#[derive(Clone, Debug)]
pub struct Quadratic {
    matrix: DMatrix<f64>,
}

impl Quadratic {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("quadratic form must be square"));
        }
        if (&matrix - matrix.transpose()).amax() > 1e-12 * (1.0 + matrix.amax()) {
            return Err(invalid("quadratic form must be symmetric"));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(invalid("quadratic form must be positive definite"));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl SmoothFunction for Quadratic {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn value(&self, p: &[f64]) -> f64 {
        let v = DVector::from_column_slice(p);
        0.5 * v.dot(&(&self.matrix * &v))
    }

    fn gradient(&self, p: &[f64]) -> DVector<f64> {
        &self.matrix * DVector::from_column_slice(p)
    }

    fn hessian(&self, _p: &[f64]) -> DMatrix<f64> {
        self.matrix.clone()
    }
}

/// Serializable description of the convex deformer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum DeformerSpec {
    Quadratic {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        restriction: Option<Vec<Vec<i64>>>,
    },
}

/// Serializable potential: `{polytope_ref, s, deformer}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub polytope_ref: String,
    pub s: f64,
    pub deformer: DeformerSpec,
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(invalid("matrix rows must be non-empty and of equal length"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// The potential `g_s` on a Delzant polytope.
///
/// `g_can` has zero linear part. The deformer `nu` lives on the target of the integral
/// restriction matrix `iota^*` and is pulled back along it.
#[derive(Clone, Debug)]
pub struct SymplecticPotential {
    polytope: DelzantPolytope,
    normals: DMatrix<f64>,
    offsets: DVector<f64>,
    base: Option<Arc<dyn SmoothFunction>>,
    restriction: DMatrix<f64>,
    restriction_int: Vec<Vec<i64>>,
    nu: Arc<dyn SmoothFunction>,
    s: f64,
    barycenter: Vec<f64>,
}

impl SymplecticPotential {
    /// `g_can + s * 1/2 |p|^2` with identity restriction.
    pub fn new(polytope: DelzantPolytope, s: f64) -> Result<Self> {
        let d = polytope.dim;
        let restriction = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::with_deformer(polytope, s, restriction, Arc::new(Quadratic::identity(d)))
    }

    pub fn with_deformer(
        polytope: DelzantPolytope,
        s: f64,
        restriction: Vec<Vec<i64>>,
        nu: Arc<dyn SmoothFunction>,
    ) -> Result<Self> {
        let d = polytope.dim;
        if restriction.is_empty() || restriction.iter().any(|r| r.len() != d) {
            return Err(invalid(
                "restriction matrix must have one column per polytope coordinate",
            ));
        }
        if nu.dim() != restriction.len() {
            return Err(Error::DimensionMismatch {
                expected: restriction.len(),
                got: nu.dim(),
            });
        }
        if !s.is_finite() || s < 0.0 {
            return Err(invalid(
                "deformation parameter s must be finite and non-negative",
            ));
        }
        let normals = DMatrix::from_fn(polytope.num_facets(), d, |j, i| {
            polytope.facets[j].normal[i] as f64
        });
        let offsets = DVector::from_iterator(
            polytope.num_facets(),
            polytope.facets.iter().map(|f| f.offset as f64),
        );
        let rest = DMatrix::from_fn(restriction.len(), d, |i, j| restriction[i][j] as f64);
        let barycenter = polytope.barycenter()?;
        if !polytope.contains(&barycenter, true)? {
            return Err(invalid("polytope has empty interior"));
        }
        Ok(Self {
            polytope,
            normals,
            offsets,
            base: None,
            restriction: rest,
            restriction_int: restriction,
            nu,
            s,
            barycenter,
        })
    }

    pub fn from_spec(spec: &PotentialSpec, polytope: DelzantPolytope) -> Result<Self> {
        let DeformerSpec::Quadratic {
            matrix,
            restriction,
        } = &spec.deformer;
        let q = Quadratic::new(matrix_from_rows(matrix)?)?;
        let d = polytope.dim;
        let restriction = restriction.clone().unwrap_or_else(|| {
            (0..d)
                .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
                .collect()
        });
        Self::with_deformer(polytope, spec.s, restriction, Arc::new(q))
    }

    /// Adds a smooth base correction `h`, so that `g_0 = g_can + h`.
    pub fn with_base(mut self, base: Arc<dyn SmoothFunction>) -> Result<Self> {
        if base.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: base.dim(),
            });
        }
        self.base = Some(base);
        Ok(self)
    }

    pub fn with_s(&self, s: f64) -> Self {
        let mut g = self.clone();
        g.s = s;
        g
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn polytope(&self) -> &DelzantPolytope {
        &self.polytope
    }

    pub fn barycenter(&self) -> &[f64] {
        &self.barycenter
    }

    pub fn restriction(&self) -> &[Vec<i64>] {
        &self.restriction_int
    }

    pub fn deformer(&self) -> &Arc<dyn SmoothFunction> {
        &self.nu
    }

    pub fn base(&self) -> Option<&Arc<dyn SmoothFunction>> {
        self.base.as_ref()
    }

    pub(crate) fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            })
        }
    }

    /// Facet values `l_j(p)`.
    pub fn facet_values(&self, p: &[f64]) -> DVector<f64> {
        &self.normals * DVector::from_column_slice(p) + &self.offsets
    }

    pub(crate) fn require_interior(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.check_dim(p)?;
        let l = self.facet_values(p);
        let min = l.min();
        if min > 0.0 {
            Ok(l)
        } else {
            Err(Error::OutsideInterior {
                min_facet_value: min,
            })
        }
    }

    /// `iota^* p`.
    pub fn restrict(&self, p: &[f64]) -> Vec<f64> {
        (&self.restriction * DVector::from_column_slice(p))
            .iter()
            .copied()
            .collect()
    }

    /// `g_can(p) = 1/(4 pi) sum_j l_j log l_j`, continuous up to the boundary.
    pub fn g_can(&self, p: &[f64]) -> Result<f64> {
        self.check_dim(p)?;
        let l = self.facet_values(p);
        if l.min() < 0.0 {
            return Err(Error::OutsideInterior {
                min_facet_value: l.min(),
            });
        }
        Ok(l.iter().map(|&x| xlogx(x)).sum::<f64>() / (4.0 * PI))
    }

    pub fn g_can_gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        let l = self.require_interior(p)?;
        let w = l.map(|x| x.ln() + 1.0);
        Ok(self.normals.tr_mul(&w) / (4.0 * PI))
    }

    pub fn g_can_hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let l = self.require_interior(p)?;
        let scaled = DMatrix::from_fn(self.normals.nrows(), self.dim(), |j, i| {
            self.normals[(j, i)] / l[j]
        });
        Ok(self.normals.tr_mul(&scaled) / (4.0 * PI))
    }

    /// `nu(iota^* p)`.
    pub fn nu_value(&self, p: &[f64]) -> f64 {
        self.nu.value(&self.restrict(p))
    }

    /// Gradient of `p -> nu(iota^* p)`.
    pub fn nu_gradient(&self, p: &[f64]) -> DVector<f64> {
        self.restriction
            .tr_mul(&self.nu.gradient(&self.restrict(p)))
    }

    pub fn nu_hessian(&self, p: &[f64]) -> DMatrix<f64> {
        let h = self.nu.hessian(&self.restrict(p));
        self.restriction.transpose() * h * &self.restriction
    }

    pub fn value(&self, p: &[f64]) -> Result<f64> {
        let mut v = self.g_can(p)? + self.s * self.nu_value(p);
        if let Some(b) = &self.base {
            v += b.value(p);
        }
        Ok(v)
    }

    pub fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        let mut g = self.g_can_gradient(p)? + self.s * self.nu_gradient(p);
        if let Some(b) = &self.base {
            g += b.gradient(p);
        }
        Ok(g)
    }

    pub fn hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let mut h = self.g_can_hessian(p)? + self.s * self.nu_hessian(p);
        if let Some(b) = &self.base {
            h += b.hessian(p);
        }
        Ok(h)
    }
}

pub(crate) fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
