//! Small exact-integer helpers shared by the polytope routines.

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub(crate) fn gcd_slice(v: &[i128]) -> i128 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -(-a).div_euclid(b)
}

/// Fraction-free Gaussian elimination. Returns the determinant of a square matrix.
pub(crate) fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Solves `a x = rhs` exactly. The solution is returned as `(numerators, denominator)`
/// with a positive denominator in lowest terms, or `None` when `a` is singular.
pub(crate) fn solve_rational(a: &[Vec<i128>], rhs: &[i128]) -> Option<(Vec<i128>, i128)> {
    let n = a.len();
    let det = bareiss_det(a.to_vec());
    if det == 0 {
        return None;
    }
    let mut num = Vec::with_capacity(n);
    for col in 0..n {
        let mut m = a.to_vec();
        for (row, r) in m.iter_mut().enumerate() {
            r[col] = rhs[row];
        }
        num.push(bareiss_det(m));
    }
    let mut den = det;
    if den < 0 {
        den = -den;
        num.iter_mut().for_each(|x| *x = -*x);
    }
    let g = gcd(gcd_slice(&num), den);
    if g > 1 {
        num.iter_mut().for_each(|x| *x /= g);
        den /= g;
    }
    Some((num, den))
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Column Hermite reduction: returns `(h, u, rank)` with `m u = h`, `u` unimodular and the
/// first `rank` columns of `h` in lower echelon form with positive pivots, the rest zero.
pub(crate) fn column_hermite(m: &[Vec<i64>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&v| i128::from(v)).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |a: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
        for row in a.iter_mut() {
            row[dst] -= q * row[src];
        }
    };
    let swap = |a: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };
    let mut piv = 0;
    for r in 0..rows {
        if piv == cols {
            break;
        }
        for c in piv + 1..cols {
            while h[r][c] != 0 {
                let q = h[r][piv] / h[r][c];
                col_op(&mut h, piv, c, q);
                col_op(&mut u, piv, c, q);
                swap(&mut h, piv, c);
                swap(&mut u, piv, c);
            }
        }
        if h[r][piv] != 0 {
            if h[r][piv] < 0 {
                for a in [&mut h, &mut u] {
                    for row in a.iter_mut() {
                        row[piv] = -row[piv];
                    }
                }
            }
            piv += 1;
        }
    }
    (h, u, piv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_small_matrices() {
        assert_eq!(bareiss_det(vec![vec![2, 1], vec![1, 3]]), 5);
        assert_eq!(bareiss_det(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(
            bareiss_det(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]),
            -3
        );
    }

    #[test]
    fn rational_solution() {
        let (x, d) = solve_rational(&[vec![2, 0], vec![0, 3]], &[1, 1]).unwrap();
        assert_eq!((x, d), (vec![3, 2], 6));
    }

    #[test]
    fn hermite_kernel() {
        let m = vec![vec![1, 0, 1, 1], vec![1, 1, 0, 0], vec![0, 0, 1, 0]];
        let (h, u, rank) = column_hermite(&m);
        assert_eq!(rank, 3);
        assert!((0..3).all(|i| h[i][i] == 1));
        let k: Vec<i128> = u.iter().map(|row| row[3]).collect();
        for r in &m {
            assert_eq!(
                r.iter()
                    .zip(&k)
                    .map(|(&a, &b)| i128::from(a) * b)
                    .sum::<i128>(),
                0
            );
        }
        assert_eq!(bareiss_det(u).abs(), 1);
    }

    #[test]
    fn subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn integer_rounding() {
        assert_eq!(floor_div(-3, 2), -2);
        assert_eq!(ceil_div(-3, 2), -1);
        assert_eq!(ceil_div(3, 2), 2);
    }
}
