//! Plücker coordinates and their deformation along the weight matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{index_sets, FlagMatrix};
use crate::error::{invalid, Result};

/// Plücker coordinates of all levels `l = 1..n-1`; each level lists its index sets
/// (one-based, increasing) in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PlueckerCoords {
    pub n: usize,
    pub levels: Vec<Vec<(Vec<usize>, Complex64)>>,
}

impl PlueckerCoords {
    /// Coordinate for the one-based index set `set`.
    pub fn get(&self, set: &[usize]) -> Option<Complex64> {
        let level = self.levels.get(set.len().checked_sub(1)?)?;
        level.iter().find(|(s, _)| s == set).map(|(_, v)| *v)
    }

    /// Coordinates of level `l` as a vector in lexicographic order.
    pub fn level(&self, l: usize) -> Vec<Complex64> {
        self.levels[l - 1].iter().map(|(_, v)| *v).collect()
    }
}

/// `omega_ij = 3^{i-j-1}` for `i > j`, zero otherwise.
pub fn weight_matrix(n: usize) -> DMatrix<i64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i > j {
            3i64.pow((i - j - 1) as u32)
        } else {
            0
        }
    })
}

/// Permutations of `0..l` in lexicographic order with their signs.
fn permutations(l: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i8)>) {
        let l = used.len();
        if prefix.len() == l {
            let inversions = (0..l)
                .flat_map(|a| (a + 1..l).map(move |b| (a, b)))
                .filter(|&(a, b)| prefix[a] > prefix[b])
                .count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..l {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; l], &mut out);
    out
}

/// Leibniz expansion of the minor on rows `rows` (zero-based) and the first `l` columns.
/// With weights, each term picks up `t^{e(sigma)}` where `e(sigma)` is the exponent of the
/// term minus the exponent of the diagonal term.
fn minor(
    v: &DMatrix<Complex64>,
    rows: &[usize],
    perms: &[(Vec<usize>, i8)],
    weights: Option<(&DMatrix<i64>, Complex64)>,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let diag_exp: i64 = weights.map_or(0, |(w, _)| {
        rows.iter().enumerate().map(|(k, &i)| w[(i, k)]).sum()
    });
    for (sigma, sign) in perms {
        let mut term = Complex64::new(f64::from(*sign), 0.0);
        for (k, &i) in rows.iter().enumerate() {
            term *= v[(i, sigma[k])];
        }
        if let Some((w, t)) = weights {
            let e: i64 = rows
                .iter()
                .enumerate()
                .map(|(k, &i)| w[(i, sigma[k])])
                .sum::<i64>()
                - diag_exp;
            if e < 0 {
                return Err(invalid(format!(
                    "negative t-exponent {e} in deformed minor"
                )));
            }
            if e > 0 {
                term *= t.powi(e as i32);
            }
        }
        acc += term;
    }
    Ok(acc)
}

fn coords(v: &FlagMatrix, weights: Option<(&DMatrix<i64>, Complex64)>) -> Result<PlueckerCoords> {
    let n = v.n();
    let mut levels = Vec::with_capacity(n - 1);
    for l in 1..n {
        let perms = permutations(l);
        let mut level = Vec::new();
        for set in index_sets(n, l) {
            let rows: Vec<usize> = set.iter().map(|i| i - 1).collect();
            level.push((set, minor(v.matrix(), &rows, &perms, weights)?));
        }
        levels.push(level);
    }
    Ok(PlueckerCoords { n, levels })
}

/// `p_I(V) = det(V[I, 1..|I|])` for every level.
pub fn pluecker(v: &FlagMatrix) -> PlueckerCoords {
    coords(v, None).expect("undeformed minors never fail")
}

/// `q_I(V, t) = d_I(t^omega)^{-1} p_I(V . iota(t^omega))`, where entry `(i, j)` of `V` is
/// scaled by `t^{omega_ij}` and `d_I = prod_k t^{omega_{i_k k}}`. Exponents are tracked as
/// integers, so `t = 0` is exact and `t = 1` reproduces [`pluecker`] bit for bit.
pub fn deformed_pluecker(v: &FlagMatrix, t: Complex64) -> Result<PlueckerCoords> {
    let w = weight_matrix(v.n());
    coords(v, Some((&w, t)))
}

/// The quadric `q_1 q_23 - q_2 q_13 + t q_3 q_12` cutting out the `n = 3` fiber.
pub fn deformed_relation_n3(q: &PlueckerCoords, t: Complex64) -> Result<Complex64> {
    if q.n != 3 {
        return Err(invalid("the deformed relation is implemented for n = 3"));
    }
    let g = |s: &[usize]| q.get(s).expect("n = 3 coordinate");
    Ok(g(&[1]) * g(&[2, 3]) - g(&[2]) * g(&[1, 3]) + t * g(&[3]) * g(&[1, 2]))
}

/// Scale of the terms of [`deformed_relation_n3`], for relative residuals.
pub fn relation_scale_n3(q: &PlueckerCoords, t: Complex64) -> f64 {
    let g = |s: &[usize]| q.get(s).expect("n = 3 coordinate").norm();
    g(&[1]) * g(&[2, 3]) + g(&[2]) * g(&[1, 3]) + t.norm() * g(&[3]) * g(&[1, 2])
}
