//! Holonomy of the prequantum connection along the torus circles.

use std::f64::consts::PI;

use num_complex::Complex64;

pub const BS_TOL: f64 = 1e-9;

fn unit(phase_turns: f64) -> Complex64 {
    // Reduce to (-1/2, 1/2] first so integral phases give exactly 1.
    let r = phase_turns - phase_turns.round();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * r)
    }
}

/// Holonomy `exp(2 pi i x_i)` around the `i`-th circle of the fiber over `x`.
pub fn holonomy(x: &[f64], i: usize) -> Complex64 {
    unit(x[i])
}

/// Holonomy around the loop of class `k` in `H_1(T^n) = Z^n`.
pub fn loop_holonomy(x: &[f64], k: &[i64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (&xi, &ki) in x.iter().zip(k) {
        acc *= unit(ki as f64 * (xi - xi.round()));
    }
    acc
}

/// Whether the fiber over `x` is Bohr-Sommerfeld, i.e. `x` is integral.
pub fn is_bohr_sommerfeld(x: &[f64]) -> bool {
    x.iter().all(|v| (v - v.round()).abs() <= BS_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!((holonomy(&[0.5], 0) + 1.0).norm() < 1e-15);
        assert!((holonomy(&[0.25], 0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(holonomy(&[3.0], 0), Complex64::new(1.0, 0.0));
        assert_eq!(
            loop_holonomy(&[0.3, 2.0], &[0, 5]),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn k_fold_loop_is_kth_power() {
        let x = [0.37];
        let h = holonomy(&x, 0);
        assert!((loop_holonomy(&x, &[3]) - h.powi(3)).norm() < 1e-14);
    }

    #[test]
    fn bohr_sommerfeld() {
        assert!(is_bohr_sommerfeld(&[1.0, -2.0]));
        assert!(!is_bohr_sommerfeld(&[1.0, 0.5]));
        assert!(is_bohr_sommerfeld(&[1.0 + 1e-12]));
    }
}
