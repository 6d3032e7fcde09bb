use alloc::vec::Vec;

use crate::linalg::{vec_norm, CMatrix, C64, ONE, ZERO};
use crate::math::sqrt;

pub fn hadamard() -> CMatrix {
    let h = 1.0 / sqrt(2.0);
    CMatrix::from_real(2, 2, &[h, h, h, -h])
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// `|a⟩|b⟩ ↦ |a⟩|a ⊕ b⟩` on two `d`-level systems (addition mod `d`).
pub fn controlled_copy(d: usize) -> CMatrix {
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            m[(a * d + (a + b) % d, a * d + b)] = ONE;
        }
    }
    m
}

/// CNOT with the control on the first factor.
pub fn cnot() -> CMatrix {
    controlled_copy(2)
}

/// A unitary whose first column is the normalized `v`: a Householder
/// reflection times a phase, so it maps `|0…0⟩` to `|v⟩`.
pub fn preparation_unitary(v: &[C64]) -> CMatrix {
    let n = v.len();
    let norm = vec_norm(v);
    let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
    // phase making ⟨0|v⟩ real and non-negative
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
    let w: Vec<C64> = v.iter().map(|z| z / phase).collect();
    let mut u: Vec<C64> = w.iter().map(|z| -z).collect();
    u[0] += ONE;
    let un = vec_norm(&u);
    let mut h = CMatrix::identity(n);
    if un > 1e-15 {
        for z in u.iter_mut() {
            *z /= un;
        }
        let uu = CMatrix::outer(&u, &u).scale_real(2.0);
        h = &h - &uu;
    }
    h.scale(phase)
}

/// `|v⟩` amplitudes for `|k⟩`.
pub fn basis_ket(d: usize, k: usize) -> Vec<C64> {
    (0..d).map(|i| if i == k { ONE } else { ZERO }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preparation_maps_zero_to_target() {
        let v = [C64::new(0.0, 0.5), C64::new(0.5, 0.0), C64::new(-0.5, 0.5), ZERO];
        let u = preparation_unitary(&v);
        assert!(u.unitarity_error() < 1e-12);
        let n = vec_norm(&v);
        for i in 0..4 {
            assert!((u[(i, 0)] - v[i] / n).norm() < 1e-12);
        }
        let h = preparation_unitary(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!((&h - &hadamard()).max_abs() < 1e-12);
        assert!(controlled_copy(3).unitarity_error() < 1e-12);
    }
}
