//! Full flags in `C^n` as invertible matrices (columns span the flag), their Plücker
//! coordinates, the deformation of those coordinates towards the GC toric variety, and the
//! GC values of the `U(n)` moment map.

mod io;
mod moment;
mod pluecker;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use io::{pluecker_json, write_gc_csv};
pub use moment::{ambient_moment_matrix, gc_from_hermitian, gc_map, moment_matrix, GcValues};
pub use pluecker::{
    deformed_pluecker, deformed_relation_n3, pluecker, relation_scale_n3, weight_matrix,
    PlueckerCoords,
};

pub const SINGULAR_TOL: f64 = 1e-12;
pub const RESAMPLE_TOL: f64 = 1e-6;

/// An invertible `n x n` complex matrix representing the flag of spans of its leading columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagMatrix {
    m: DMatrix<Complex64>,
}

impl FlagMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(crate::error::invalid(
                "flag matrix must be square with n >= 2",
            ));
        }
        let det = m.clone().determinant().norm();
        if det < SINGULAR_TOL {
            return Err(Error::Singular {
                what: "flag matrix".into(),
                value: det,
            });
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }
}

/// Increasing one-based `l`-subsets of `1..=n` in lexicographic order.
pub fn index_sets(n: usize, l: usize) -> Vec<Vec<usize>> {
    crate::polytope::combinations_of(n, l)
        .into_iter()
        .map(|s| s.into_iter().map(|i| i + 1).collect())
        .collect()
}

/// `"13"` for `{1, 3}`; comma-separated when `n > 9`.
pub fn index_label(set: &[usize], n: usize) -> String {
    let parts: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    parts.join(if n > 9 { "," } else { "" })
}

pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random flag from stream `stream` of the ChaCha20 generator seeded with `seed`.
/// Entries are standard complex Gaussians; draws with `|det| < 1e-6` are rejected.
pub fn random_flag_stream(n: usize, seed: u64, stream: u64) -> FlagMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
        if m.clone().determinant().norm() >= RESAMPLE_TOL {
            return FlagMatrix { m };
        }
    }
}

pub fn random_flag(n: usize, seed: u64) -> FlagMatrix {
    random_flag_stream(n, seed, 0)
}

/// Haar-random unitary from a Gaussian QR with the phases of `R` removed.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_element(3, 3, Complex64::new(1.0, 0.0));
        assert!(matches!(FlagMatrix::new(m), Err(Error::Singular { .. })));
    }

    #[test]
    fn seeded_flags_reproduce() {
        assert_eq!(random_flag(3, 7), random_flag(3, 7));
        assert_ne!(random_flag_stream(3, 7, 0), random_flag_stream(3, 7, 1));
    }

    #[test]
    fn labels() {
        assert_eq!(index_sets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(index_label(&[1, 3], 3), "13");
    }
}
