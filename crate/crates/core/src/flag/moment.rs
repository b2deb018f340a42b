//! The `U(n)` moment map of a flag and its Gelfand-Cetlin values.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{index_sets, FlagMatrix};
use crate::error::{invalid, Error, Result};

/// `H = sum_l a_l P_l`, `P_l` the orthogonal projection onto the span of the first `l`
/// columns of `V`.
pub fn moment_matrix(v: &FlagMatrix, a: &[f64]) -> Result<DMatrix<Complex64>> {
    let n = v.n();
    if a.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: a.len(),
        });
    }
    let q = v.matrix().clone().qr().q();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for (l, &al) in (1..n).zip(a) {
        let ql = q.columns(0, l);
        h += (ql * ql.adjoint()) * Complex64::new(al, 0.0);
    }
    Ok(hermitize(h))
}

pub(crate) fn hermitize(h: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `U(n)` moment matrix of a point of `prod_l P(wedge^l C^n)` given by homogeneous
/// coordinates per level (lexicographic index sets). For decomposable coordinates this
/// is `sum_l a_l P_l` of the corresponding flag.
pub fn ambient_moment_matrix(
    n: usize,
    levels: &[Vec<Complex64>],
    a: &[f64],
) -> Result<DMatrix<Complex64>> {
    if levels.len() != n - 1 || a.len() != n - 1 {
        return Err(invalid(
            "need one coordinate vector and one weight per level",
        ));
    }
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for (l, (z, &al)) in (1..n).zip(levels.iter().zip(a)) {
        let sets = index_sets(n, l);
        if z.len() != sets.len() {
            return Err(Error::DimensionMismatch {
                expected: sets.len(),
                got: z.len(),
            });
        }
        let norm2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(invalid("zero homogeneous coordinate vector"));
        }
        // (P)_{ij} = sum_K eps(i,K) eps(j,K) z_{K+i} conj(z_{K+j}) over (l-1)-sets K.
        for k_set in index_sets(n, l - 1) {
            let entry = |i: usize| -> Option<(f64, Complex64)> {
                if k_set.contains(&i) {
                    return None;
                }
                let below = k_set.iter().filter(|&&k| k < i).count();
                let mut s = k_set.clone();
                s.push(i);
                s.sort_unstable();
                let pos = sets.iter().position(|x| *x == s)?;
                Some((if below % 2 == 0 { 1.0 } else { -1.0 }, z[pos]))
            };
            let col: Vec<Option<(f64, Complex64)>> = (1..=n).map(entry).collect();
            for i in 0..n {
                let Some((si, zi)) = col[i] else { continue };
                for j in 0..n {
                    let Some((sj, zj)) = col[j] else { continue };
                    h[(i, j)] += zi * zj.conj() * (si * sj * al / norm2);
                }
            }
        }
    }
    Ok(hermitize(h))
}

/// Rows `l = 1..n` of descending eigenvalues of the upper-left `l x l` blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcValues {
    pub rows: Vec<Vec<f64>>,
}

impl GcValues {
    /// Largest violation of `rows[l+1][j] >= rows[l][j] >= rows[l+1][j+1]` (zero if none).
    pub fn interlacing_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.rows.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            for j in 0..lo.len() {
                worst = worst.max(lo[j] - hi[j]).max(hi[j + 1] - lo[j]);
            }
        }
        worst
    }

    /// The GC coordinates `lambda_l^j`, `l < n`, in row-major order.
    pub fn to_point(&self) -> Vec<f64> {
        self.rows[..self.rows.len() - 1].concat()
    }

    pub fn spectrum(&self) -> &[f64] {
        self.rows.last().expect("at least one row")
    }
}

fn descending_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// GC values of a Hermitian matrix.
pub fn gc_from_hermitian(h: &DMatrix<Complex64>) -> GcValues {
    let n = h.nrows();
    GcValues {
        rows: (1..=n)
            .map(|l| descending_eigenvalues(&h.view((0, 0), (l, l)).into_owned()))
            .collect(),
    }
}

pub fn gc_map(v: &FlagMatrix, a: &[f64]) -> Result<GcValues> {
    Ok(gc_from_hermitian(&moment_matrix(v, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_flag_is_diagonal() {
        let h = moment_matrix(&FlagMatrix::identity(3), &[1.0, 1.0]).unwrap();
        for (i, d) in [2.0, 1.0, 0.0].iter().enumerate() {
            assert!((h[(i, i)].re - d).abs() < 1e-15);
        }
        let gc = gc_map(&FlagMatrix::identity(3), &[1.0, 1.0]).unwrap();
        assert_eq!(gc.rows.len(), 3);
        assert!((gc.rows[0][0] - 2.0).abs() < 1e-14);
        assert!((gc.rows[1][0] - 2.0).abs() < 1e-14 && (gc.rows[1][1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_columns() {
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        for i in 0..3 {
            m[(2 - i, i)] = Complex64::new(1.0, 0.0);
        }
        let v = FlagMatrix::new(m).unwrap();
        let h = moment_matrix(&v, &[1.0, 1.0]).unwrap();
        for (i, d) in [0.0, 1.0, 2.0].iter().enumerate() {
            assert!((h[(i, i)].re - d).abs() < 1e-15);
        }
        let gc = gc_from_hermitian(&h);
        assert!(gc.rows[0][0].abs() < 1e-15);
        assert!(gc.interlacing_violation() < 1e-14);
    }
}
