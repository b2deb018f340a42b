//! Fourier-Motzkin bound propagation.
//!
//! Variables are visited in a fixed order `y_0, y_1, ...`. For each level `k` we keep the
//! exact projection of the polytope onto `(y_0, ..., y_k)`; its inequalities that involve
//! `y_k` give lower and upper bounds on `y_k` once the earlier coordinates are fixed.

use std::collections::BTreeMap;

use super::exact::{ceil_div, floor_div, gcd, gcd_slice};
use super::DelzantPolytope;
use crate::error::{Error, Result};

/// `coeffs . y + offset >= 0`, coefficients indexed by level position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: Vec<i128>,
    offset: i128,
}

impl Ineq {
    fn normalized(mut self) -> Self {
        let g = gcd(gcd_slice(&self.coeffs), self.offset);
        if g > 1 {
            self.coeffs.iter_mut().for_each(|c| *c /= g);
            self.offset /= g;
        }
        self
    }
}

/// One side of the bound on `y_k`: `coeff * y_k + rest . y + offset >= 0`.
#[derive(Clone, Debug)]
struct Bound {
    coeff: i128,
    rest: Vec<i128>,
    offset: i128,
}

impl Bound {
    fn numerator_int(&self, y: &[i64]) -> i128 {
        self.rest
            .iter()
            .zip(y)
            .map(|(c, &v)| c * v as i128)
            .sum::<i128>()
            + self.offset
    }

    fn numerator_f64(&self, y: &[f64]) -> f64 {
        self.rest
            .iter()
            .zip(y)
            .map(|(&c, v)| c as f64 * v)
            .sum::<f64>()
            + self.offset as f64
    }
}

#[derive(Clone, Debug)]
struct Level {
    lower: Vec<Bound>,
    upper: Vec<Bound>,
}

/// Per-level bounds for a bounded polytope in a chosen variable order.
#[derive(Clone, Debug)]
pub struct NestedBounds {
    order: Vec<usize>,
    levels: Vec<Level>,
    infeasible: bool,
}

fn eliminate(system: &[Ineq], k: usize) -> Vec<Ineq> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut keep: BTreeMap<Vec<i128>, i128> = BTreeMap::new();
    let push = |ineq: Ineq, keep: &mut BTreeMap<Vec<i128>, i128>| {
        let ineq = ineq.normalized();
        keep.entry(ineq.coeffs)
            .and_modify(|b| *b = (*b).min(ineq.offset))
            .or_insert(ineq.offset);
    };
    for ineq in system {
        match ineq.coeffs[k].signum() {
            1 => pos.push(ineq),
            -1 => neg.push(ineq),
            _ => push(ineq.clone(), &mut keep),
        }
    }
    for p in &pos {
        for n in &neg {
            let (cp, cn) = (p.coeffs[k], -n.coeffs[k]);
            let coeffs: Vec<i128> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(a, b)| cn * a + cp * b)
                .collect();
            push(
                Ineq {
                    coeffs,
                    offset: cn * p.offset + cp * n.offset,
                },
                &mut keep,
            );
        }
    }
    keep.into_iter()
        .map(|(coeffs, offset)| Ineq { coeffs, offset })
        .collect()
}

impl NestedBounds {
    pub fn new(p: &DelzantPolytope) -> Result<Self> {
        Self::with_order(p, &p.enumeration_order())
    }

    pub fn with_order(p: &DelzantPolytope, order: &[usize]) -> Result<Self> {
        let d = p.dim;
        let mut seen = vec![false; d];
        if order.len() != d
            || order
                .iter()
                .any(|&i| i >= d || std::mem::replace(&mut seen[i], true))
        {
            return Err(crate::error::invalid(
                "variable order must be a permutation",
            ));
        }
        let mut system: Vec<Ineq> = p
            .facets
            .iter()
            .map(|f| Ineq {
                coeffs: order.iter().map(|&v| f.normal[v] as i128).collect(),
                offset: f.offset as i128,
            })
            .collect();
        let mut levels = vec![
            Level {
                lower: Vec::new(),
                upper: Vec::new()
            };
            d
        ];
        let mut infeasible = false;
        for k in (0..d).rev() {
            for ineq in &system {
                let c = ineq.coeffs[k];
                if c == 0 {
                    continue;
                }
                let b = Bound {
                    coeff: c.abs(),
                    rest: ineq.coeffs[..k].iter().map(|x| x * c.signum()).collect(),
                    offset: ineq.offset * c.signum(),
                };
                if c > 0 {
                    levels[k].lower.push(b);
                } else {
                    levels[k].upper.push(b);
                }
            }
            system = eliminate(&system, k);
        }
        for ineq in &system {
            if ineq.offset < 0 {
                infeasible = true;
            }
        }
        for (k, lvl) in levels.iter().enumerate() {
            if lvl.lower.is_empty() || lvl.upper.is_empty() {
                return Err(Error::Unbounded {
                    coordinate: order[k],
                });
            }
        }
        Ok(Self {
            order: order.to_vec(),
            levels,
            infeasible,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infeasible
    }

    /// Integer range of `y_k` given integer `y_0..y_{k-1}`; `None` when empty.
    pub fn range_int(&self, k: usize, y: &[i64]) -> Option<(i64, i64)> {
        let lvl = &self.levels[k];
        // lower bound: coeff*y_k >= -(rest.y + offset), upper: coeff*y_k <= rest.y + offset
        let lo = lvl
            .lower
            .iter()
            .map(|b| ceil_div(-b.numerator_int(y), b.coeff))
            .max()?;
        let hi = lvl
            .upper
            .iter()
            .map(|b| floor_div(-b.numerator_int(y), b.coeff))
            .min()?;
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    /// Real range of `y_k` given real `y_0..y_{k-1}`.
    pub fn range_f64(&self, k: usize, y: &[f64]) -> (f64, f64) {
        let lvl = &self.levels[k];
        let lo = lvl
            .lower
            .iter()
            .map(|b| -b.numerator_f64(y) / b.coeff as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = lvl
            .upper
            .iter()
            .map(|b| -b.numerator_f64(y) / b.coeff as f64)
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// Maps level-ordered coordinates back to the polytope's own coordinates.
    pub fn to_original<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        let mut x = vec![T::default(); y.len()];
        for (k, &v) in self.order.iter().enumerate() {
            x[v] = y[k];
        }
        x
    }

    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        if self.infeasible {
            return out;
        }
        let mut y = Vec::with_capacity(self.dim());
        self.recurse(&mut y, &mut out);
        out.sort();
        out
    }

    fn recurse(&self, y: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let k = y.len();
        if k == self.dim() {
            out.push(self.to_original(y));
            return;
        }
        if let Some((lo, hi)) = self.range_int(k, y) {
            for v in lo..=hi {
                y.push(v);
                self.recurse(y, out);
                y.pop();
            }
        }
    }
}
