use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{DensityState, StateVector, SystemLabel};
use crate::error::Result;
use crate::linalg::{qr, CMatrix, C64};

/// Seeded generator used for every random draw in the crate.
pub type SimRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random `dim × dim` unitary, deterministic in `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    haar_unitary_with(dim, &mut seeded_rng(seed))
}

/// QR of a complex Ginibre matrix, with `Q` multiplied by the phases of
/// `diag(R)`.
pub fn haar_unitary_with(dim: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(dim >= 1, "haar_unitary: dimension must be positive");
    let z = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let d = qr(&z);
    let phases: Vec<C64> = (0..dim)
        .map(|k| {
            let r = d.r[(k, k)];
            let n = r.norm();
            if n == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                r / n
            }
        })
        .collect();
    CMatrix::from_fn(dim, dim, |i, j| d.q[(i, j)] * phases[j])
}

/// Haar-random pure state.
pub fn random_pure_state(systems: Vec<SystemLabel>, rng: &mut impl Rng) -> Result<StateVector> {
    let dim: usize = systems.iter().map(|s| s.dim).product();
    let amp = (0..dim).map(|_| gaussian(rng)).collect();
    StateVector::new(systems, amp)
}

/// Mixed state obtained by tracing an `ancilla_dim`-dimensional purifier
/// out of a Haar-random pure state.
pub fn random_mixed_state(
    systems: Vec<SystemLabel>,
    ancilla_dim: usize,
    rng: &mut impl Rng,
) -> Result<DensityState> {
    let dim: usize = systems.iter().map(|s| s.dim).product();
    let g = CMatrix::from_fn(dim, ancilla_dim.max(1), |_, _| gaussian(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    DensityState::new(systems, rho.scale_real(1.0 / tr).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_deterministic() {
        for d in [1, 2, 5, 16] {
            let u = haar_unitary(d, 42);
            assert!(u.unitarity_error() < 1e-10);
            assert_eq!(u, haar_unitary(d, 42));
        }
        assert!((haar_unitary(1, 9)[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_ne!(haar_unitary(4, 1), haar_unitary(4, 2));
    }
}
