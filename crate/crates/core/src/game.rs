//! The complementarity game: a referee measures an indicated qubit in the
//! computational or diagonal basis on a fair coin and checks the matching
//! prediction.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, C64};
use crate::math::{cos, sin, sqrt};
use crate::qcore::{seeded_rng, DensityState, ProjectiveBasis, SystemLabel};

/// `½ + 1/√8`, the quantum optimum.
pub fn game_bound() -> f64 {
    0.5 + 1.0 / sqrt(8.0)
}

/// Slack on every comparison against the bound.
pub const BOUND_TOL: f64 = 1e-9;

/// The indicated qubit plus a classical prediction pair `(P, P̄)` fixed
/// before the coin is flipped. `p_bar` indexes `{0̄, 1̄}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameStrategy {
    pub indicated_state: DensityState,
    pub p: usize,
    pub p_bar: usize,
}

impl GameStrategy {
    pub fn new(indicated_state: DensityState, p: usize, p_bar: usize) -> Result<Self> {
        if indicated_state.systems().len() != 1 || indicated_state.dim() != 2 {
            return Err(Error::InvalidArgument(format!(
                "indicated state must be one qubit, got {:?}",
                indicated_state.names()
            )));
        }
        if p > 1 || p_bar > 1 {
            return Err(Error::InvalidArgument(format!("predictions ({p}, {p_bar}) must be bits")));
        }
        Ok(GameStrategy { indicated_state, p, p_bar })
    }

    fn qubit(&self) -> SystemLabel {
        self.indicated_state.systems()[0].clone()
    }

    /// `(⟨P|ρ|P⟩, ⟨P̄|ρ|P̄⟩)`.
    pub fn per_test(&self) -> (f64, f64) {
        let z = ProjectiveBasis::computational(self.qubit());
        let x = ProjectiveBasis::diagonal(self.qubit()).expect("qubit");
        (
            self.indicated_state.fidelity_with_ket(z.vector(self.p)),
            self.indicated_state.fidelity_with_ket(x.vector(self.p_bar)),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub win_probability: f64,
    /// (computational test, diagonal test) win probabilities.
    pub per_test: (f64, f64),
    pub bound: f64,
    /// Within `1e-9` of the bound.
    pub optimal: bool,
}

/// Exact winning probability `½⟨P|ρ|P⟩ + ½⟨P̄|ρ|P̄⟩`.
pub fn win_probability(s: &GameStrategy) -> GameReport {
    let per_test = s.per_test();
    let win = 0.5 * (per_test.0 + per_test.1);
    let bound = game_bound();
    GameReport { win_probability: win, per_test, bound, optimal: (win - bound).abs() <= BOUND_TOL }
}

/// Best strategy: for each prediction pair, the top eigenvector of
/// `½(|P⟩⟨P| + |P̄⟩⟨P̄|)`.
pub fn optimal_strategy() -> (GameStrategy, f64) {
    let q = SystemLabel::qubit("Q");
    let z = ProjectiveBasis::computational(q.clone());
    let x = ProjectiveBasis::diagonal(q.clone()).expect("qubit");
    let mut best: Option<(GameStrategy, f64)> = None;
    for p in 0..2 {
        for pb in 0..2 {
            let a = CMatrix::outer(z.vector(p), z.vector(p));
            let b = CMatrix::outer(x.vector(pb), x.vector(pb));
            let op = (&a + &b).scale_real(0.5);
            let e = eigh(&op);
            let value = e.values[1];
            if best.as_ref().is_none_or(|(_, v)| value > *v + 1e-15) {
                let rho = DensityState::pure(alloc::vec![q.clone()], &e.vector(1)).expect("unit vector");
                best = Some((GameStrategy { indicated_state: rho, p, p_bar: pb }, value));
            }
        }
    }
    best.expect("four candidates")
}

/// Win probability from a Bloch vector, maximized over the four pairs.
fn bloch_value(x: f64, z: f64) -> f64 {
    // ⟨0|ρ|0⟩ = (1+z)/2, ⟨0̄|ρ|0̄⟩ = (1+x)/2
    let mut best = f64::MIN;
    for sz in [1.0, -1.0] {
        for sx in [1.0, -1.0] {
            best = best.max(0.5 * (0.5 * (1.0 + sz * z) + 0.5 * (1.0 + sx * x)));
        }
    }
    best
}

fn bloch_at(theta: f64, phi: f64) -> f64 {
    bloch_value(sin(theta) * cos(phi), cos(theta))
}

/// Grid over the Bloch sphere followed by a shrinking pattern search.
/// Returns `(value, θ, φ)`.
pub fn grid_search_optimum(steps: usize) -> (f64, f64, f64) {
    let pi = core::f64::consts::PI;
    let steps = steps.max(4);
    let mut best = (f64::MIN, 0.0, 0.0);
    for i in 0..=steps {
        let th = pi * i as f64 / steps as f64;
        for j in 0..(2 * steps) {
            let ph = pi * j as f64 / steps as f64;
            let v = bloch_at(th, ph);
            if v > best.0 {
                best = (v, th, ph);
            }
        }
    }
    let mut h = pi / steps as f64;
    while h > 1e-12 {
        let mut improved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (h, -h), (-h, h), (-h, -h)] {
            let v = bloch_at(best.1 + dt, best.2 + dp);
            if v > best.0 {
                best = (v, best.1 + dt, best.2 + dp);
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Best value over diagonal (classical) indicated states on a grid of
/// `resolution + 1` weights.
pub fn classical_optimum(resolution: usize) -> f64 {
    let q = SystemLabel::qubit("Q");
    let mut best: f64 = 0.0;
    for i in 0..=resolution {
        let p0 = i as f64 / resolution as f64;
        let rho = DensityState::classical(alloc::vec![q.clone()], &[p0, 1.0 - p0]).expect("diagonal");
        for p in 0..2 {
            for pb in 0..2 {
                let s = GameStrategy { indicated_state: rho.clone(), p, p_bar: pb };
                best = best.max(win_probability(&s).win_probability);
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefereeMode {
    /// Check `P` after a computational test, `P̄` after a diagonal one.
    Standard,
    /// Deterministic bits `(c, d) = (¬b ∧ ¬m, b ∧ m)` from the basis bit `b`
    /// and outcome `m`, compared with the pair implied by the predictions.
    AndBits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    /// 0 computational, 1 diagonal.
    pub basis: u8,
    pub outcome: u8,
    pub win: bool,
}

fn play(s: &GameStrategy, mode: RefereeMode, rng: &mut impl Rng) -> Round {
    let b: bool = rng.random();
    let (pz, px) = {
        let z = ProjectiveBasis::computational(s.qubit());
        let x = ProjectiveBasis::diagonal(s.qubit()).expect("qubit");
        (s.indicated_state.fidelity_with_ket(z.vector(0)), s.indicated_state.fidelity_with_ket(x.vector(0)))
    };
    let p0 = if b { px } else { pz };
    let u: f64 = rng.random();
    let m = if u < p0 { 0u8 } else { 1u8 };
    let predicted = if b { s.p_bar as u8 } else { s.p as u8 };
    let win = match mode {
        RefereeMode::Standard => m == predicted,
        RefereeMode::AndBits => {
            let and_bits = |mm: u8| (!b && mm == 0, b && mm == 1);
            and_bits(m) == and_bits(predicted)
        }
    };
    Round { basis: b as u8, outcome: m, win }
}

/// One seeded round.
pub fn referee_round(s: &GameStrategy, seed: u64) -> Round {
    play(s, RefereeMode::Standard, &mut seeded_rng(seed))
}

/// `n` rounds from one seeded stream.
pub fn referee_rounds(s: &GameStrategy, n: usize, seed: u64, mode: RefereeMode) -> Vec<Round> {
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| play(s, mode, &mut rng)).collect()
}

/// Index (1-based) of the first lost round within `max_rounds`.
pub fn first_loss(s: &GameStrategy, seed: u64, max_rounds: usize) -> Option<usize> {
    let mut rng = seeded_rng(seed);
    (1..=max_rounds).find(|_| !play(s, RefereeMode::Standard, &mut rng).win)
}

/// `|v⟩` for single-qubit amplitudes.
pub fn qubit_state(a0: C64, a1: C64) -> Result<DensityState> {
    DensityState::pure(alloc::vec![SystemLabel::qubit("Q")], &[a0, a1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_state(k: usize) -> DensityState {
        DensityState::basis(alloc::vec![SystemLabel::qubit("Q")], k).unwrap()
    }

    #[test]
    fn fixed_strategies() {
        let s = GameStrategy::new(basis_state(0), 0, 0).unwrap();
        assert!((win_probability(&s).win_probability - 0.75).abs() < 1e-12);
        let s = GameStrategy::new(basis_state(1), 1, 0).unwrap();
        assert!((win_probability(&s).win_probability - 0.75).abs() < 1e-12);
        let m = DensityState::maximally_mixed(alloc::vec![SystemLabel::qubit("Q")]).unwrap();
        for (p, pb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let s = GameStrategy::new(m.clone(), p, pb).unwrap();
            assert!((win_probability(&s).win_probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_and_cross_checks() {
        let (s, v) = optimal_strategy();
        assert!((v - game_bound()).abs() < 1e-12);
        let r = win_probability(&s);
        assert!(r.optimal);
        assert!((r.per_test.0 - r.per_test.1).abs() < 1e-9);
        assert!((grid_search_optimum(60).0 - v).abs() < 1e-6);
        assert!((classical_optimum(1000) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = GameStrategy::new(basis_state(0), 0, 0).unwrap();
        let a = referee_rounds(&s, 50, 7, RefereeMode::Standard);
        assert_eq!(a, referee_rounds(&s, 50, 7, RefereeMode::Standard));
        assert!(a.iter().filter(|r| r.basis == 0).all(|r| r.win));
        let and = referee_rounds(&s, 50, 7, RefereeMode::AndBits);
        assert_eq!(a.iter().map(|r| r.win).collect::<Vec<_>>(), and.iter().map(|r| r.win).collect::<Vec<_>>());
    }
}
