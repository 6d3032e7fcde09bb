//! Dense quantum-state engine: labelled subsystems, composition, reduction,
//! unitaries, projective measurement with conditioning, operator-sum
//! channels and Haar sampling.
//!
//! Subsystem order is always explicit. A state's `systems` list fixes the
//! tensor-factor order (first factor most significant in the flat index);
//! every reduction keeps the surviving factors in that order.

mod basis;
mod channel;
pub mod gates;
mod haar;
mod ket;
mod layout;
mod measure;
mod state;
mod system;

pub use basis::ProjectiveBasis;
pub use channel::{max_entangled_overlap, Channel, PetzRecovery};
pub use haar::{haar_unitary, haar_unitary_with, random_mixed_state, random_pure_state, seeded_rng, SimRng};
pub use ket::StateVector;
pub use measure::{lueders_update, measure_update, measurement_channel, Branch, Outcome};
pub use state::DensityState;
pub use system::SystemLabel;

#[allow(unused_imports)]
pub(crate) use layout::{resolve, Layout};

/// Max-abs Hermiticity slack of a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Pairwise inner-product slack for projective bases.
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Max-abs deviation of `U†U` from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Max-abs deviation of `Σ K†K` from the identity.
pub const CPTP_TOL: f64 = 1e-10;
/// Probabilities at or below this are treated as exactly zero.
pub const NULL_PROBABILITY: f64 = 1e-14;

/// Largest dense density matrix: 12 qubits.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest pure state vector: 16 qubits.
pub const MAX_VECTOR_QUBITS: usize = 16;

pub(crate) fn qubit_equivalent(dim: usize) -> usize {
    let mut q = 0;
    while (1usize << q) < dim {
        q += 1;
    }
    q
}
