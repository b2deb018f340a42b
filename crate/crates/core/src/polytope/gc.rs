//! Gelfand-Cetlin patterns and polytopes.

use serde::{Deserialize, Serialize};

use super::exact::gcd;
use super::{DelzantPolytope, Facet};
use crate::error::{invalid, Result};

/// Index of `lambda_l^j` (both one-based, `l < n`) in the row-major variable order.
pub fn gc_variable_index(l: usize, j: usize) -> usize {
    l * (l - 1) / 2 + (j - 1)
}

/// The top row `lambda_i = a_i + ... + a_{n-1}`, `lambda_n = 0`.
pub fn top_row(a: &[i64]) -> Vec<i64> {
    let mut lam = vec![0; a.len() + 1];
    for i in (0..a.len()).rev() {
        lam[i] = lam[i + 1] + a[i];
    }
    lam
}

/// Triangular array `rows[l-1]` of length `l`, `l = 1..=n`; the last row is the top row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcPattern {
    pub rows: Vec<Vec<i64>>,
}

impl GcPattern {
    /// Assembles a pattern from a point of the GC polytope and its top row.
    pub fn from_point(top: &[i64], point: &[i64]) -> Result<Self> {
        let n = top.len();
        if point.len() != n * (n - 1) / 2 {
            return Err(invalid("point length does not match n(n-1)/2"));
        }
        let mut rows: Vec<Vec<i64>> = (1..n)
            .map(|l| (1..=l).map(|j| point[gc_variable_index(l, j)]).collect())
            .collect();
        rows.push(top.to_vec());
        Ok(Self { rows })
    }

    pub fn is_interlacing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            (0..lo.len()).all(|j| hi[j] >= lo[j] && lo[j] >= hi[j + 1])
        })
    }

    pub fn to_point(&self) -> Vec<i64> {
        self.rows[..self.rows.len() - 1].concat()
    }
}

/// GC polytope of the top row determined by positive weights `a` (length `n-1`).
///
/// Variables are `lambda_l^j` for `l < n` in row-major order. The returned polytope
/// enumerates lattice points top row first.
pub fn gc_polytope(n: usize, a: &[i64]) -> Result<DelzantPolytope> {
    if n < 2 {
        return Err(invalid("GC polytope needs n >= 2"));
    }
    if a.len() != n - 1 {
        return Err(invalid(format!(
            "expected {} weights, got {}",
            n - 1,
            a.len()
        )));
    }
    if a.iter().any(|&x| x <= 0) {
        return Err(invalid("weights must be positive"));
    }
    let top = top_row(a);
    let d = n * (n - 1) / 2;
    let mut facets = Vec::with_capacity(2 * d);
    // Adds `sign_a * x_a + sign_b * x_b >= 0` where `x` is either a variable or a top-row entry.
    let mut push = |terms: [(i64, usize, usize); 2]| {
        let mut normal = vec![0i64; d];
        let mut offset = 0;
        for (sign, l, j) in terms {
            if l == n {
                offset += sign * top[j - 1];
            } else {
                normal[gc_variable_index(l, j)] += sign;
            }
        }
        facets.push(Facet { normal, offset });
    };
    for l in 1..n {
        for j in 1..=l {
            push([(1, l + 1, j), (-1, l, j)]);
            push([(1, l, j), (-1, l + 1, j + 1)]);
        }
    }
    let labels = (1..n)
        .flat_map(|l| (1..=l).map(move |j| format!("lambda{l}_{j}")))
        .collect();
    let order = (1..n)
        .rev()
        .flat_map(|l| (1..=l).map(move |j| gc_variable_index(l, j)))
        .collect();
    Ok(DelzantPolytope::new(facets, labels)?.with_order(order))
}

/// Dimension of the irreducible `U(n)` representation with highest weight `lambda`,
/// `prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i)`, computed exactly.
pub fn weyl_dim(lambda: &[i64]) -> Result<u128> {
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(invalid("highest weight must be non-increasing"));
    }
    let (mut num, mut den) = (1i128, 1i128);
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            num *= (lambda[i] - lambda[j]) as i128 + (j - i) as i128;
            den *= (j - i) as i128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    if den != 1 {
        return Err(invalid("Weyl product is not an integer"));
    }
    Ok(num as u128)
}
