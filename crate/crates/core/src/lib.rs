//! Dense finite-dimensional engine for multi-observer quantum thought
//! experiments.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs plus an explicit seed; IO, report formats and the
//! command line live in the `cutlab` companion crate.
//!
//! Layout:
//! - [`linalg`]: complex matrices, Hermitian eigensolver, QR.
//! - [`qcore`]: labelled subsystems, density matrices, pure states,
//!   measurement with conditioning, channels, Haar sampling.
//! - [`info`]: von Neumann / conditional entropies and uncertainty bounds.
//! - [`perspective`]: per-observer state assignments, the "can agree" test,
//!   the marginal feasibility solver, certainty and the consistency rule.
//! - [`game`]: the complementarity game.
//! - [`protocols`]: Wigner / Deutsch / Frauchiger–Renner runners and the
//!   matching verifiers.
//! - [`blackhole`]: Hayden–Preskill scrambling, decoupling, Petz decoding and
//!   the gravitational verifiers.
//! - [`pdl`]: the `.wfp` protocol description language.
#![no_std]

extern crate alloc;

pub mod blackhole;
pub mod error;
pub mod game;
pub mod info;
pub mod linalg;
pub mod pdl;
pub mod perspective;
pub mod protocols;
pub mod qcore;

mod math;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use qcore::{Channel, DensityState, Outcome, ProjectiveBasis, StateVector, SystemLabel};
