//! Finite Hayden–Preskill model: an old black hole maximally entangled with
//! its early radiation, a diary qubit `Q` thrown in with its reference `S`,
//! one Haar scrambling step, late radiation, decoupling diagnostics, Petz
//! decoding, and the horizon versions of the paradoxes.
//!
//! Factor order of the global vector is `S, R_1..R_n, B_1..B_n, Q, R_A`.
//! The scrambled block is `B ∪ {Q, R_A}`; emission relabels its first `m`
//! factors as late radiation `R'_1..R'_m`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::game_bound;
use crate::info::{measured_conditional_entropy, mutual_information, pure_entropy_of, pure_mutual_information, EntropyReport};
use crate::linalg::{CMatrix, C64};
use crate::math::sqrt;
use crate::perspective::{agreement_feasible, MarginalConstraintSet, Semantics, Verdict};
use crate::protocols::{Assumption, TheoremId, TheoremReport, Toggles};
use crate::qcore::gates::{cnot, hadamard};
use crate::qcore::{
    haar_unitary, max_entangled_overlap, measurement_channel, Channel, DensityState, ProjectiveBasis, StateVector,
    SystemLabel, MAX_VECTOR_QUBITS,
};

pub const REFERENCE: &str = "S";
pub const INFALLING: &str = "Q";
pub const ALICE_MEMORY: &str = "R_A";
pub const DECODED: &str = "Q_R";
pub const BOB_RECORD: &str = "R_B";

/// Desk-scale defaults used by the verifiers.
pub const DEFAULT_INTERIOR: usize = 5;
pub const DEFAULT_EMITTED: usize = 4;
pub const DEFAULT_SEEDS: u64 = 20;

/// Slack on the per-seed uncertainty bound.
pub const UNCERTAINTY_SLACK: f64 = 1e-6;

/// When Alice's copy of `Q` into `R_A` happens relative to scrambling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceTiming {
    #[default]
    BeforeScrambling,
    AfterScrambling,
    /// No measurement: `R_A` stays in `|0⟩`.
    Never,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackHoleModel {
    pub n_interior: usize,
    pub seed: u64,
    pub early_radiation: Vec<String>,
    /// Scrambled factors not yet emitted, in label order (`R_A` last).
    pub remaining: Vec<String>,
    pub late_radiation: Vec<String>,
    pub late_radiation_count: usize,
    pub alice_timing: AliceTiming,
    pub evolved: bool,
    pub state: StateVector,
}

fn label(prefix: &str, i: usize) -> String {
    format!("{prefix}_{i}")
}

/// `S, R_1..R_n, B_1..B_n, Q, R_A` with each `B_i` maximally entangled with
/// `R_i`, `Q` with `S`, and `R_A` in `|0⟩`.
pub fn build_old_blackhole(n_interior: usize, seed: u64) -> Result<BlackHoleModel> {
    let total = 2 * n_interior + 3;
    if total > MAX_VECTOR_QUBITS {
        return Err(Error::SizeCapExceeded { requested: total, cap: MAX_VECTOR_QUBITS });
    }
    if n_interior == 0 {
        return Err(Error::InvalidArgument("black hole needs at least one interior qubit".into()));
    }
    let early: Vec<String> = (1..=n_interior).map(|i| label("R", i)).collect();
    let interior: Vec<String> = (1..=n_interior).map(|i| label("B", i)).collect();
    let mut names: Vec<String> = vec![REFERENCE.to_string()];
    names.extend(early.iter().cloned());
    names.extend(interior.iter().cloned());
    names.push(INFALLING.to_string());
    names.push(ALICE_MEMORY.to_string());
    let systems: Vec<SystemLabel> = names.iter().map(|n| SystemLabel::qubit(n.as_str())).collect();

    let nq = total;
    let dim = 1usize << nq;
    let bit = |idx: usize, pos: usize| (idx >> (nq - 1 - pos)) & 1;
    let norm = 1.0 / sqrt((1usize << (n_interior + 1)) as f64);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (idx, a) in amps.iter_mut().enumerate() {
        let s = bit(idx, 0);
        let q = bit(idx, 2 * n_interior + 1);
        let ra = bit(idx, 2 * n_interior + 2);
        let paired = (0..n_interior).all(|i| bit(idx, 1 + i) == bit(idx, 1 + n_interior + i));
        if s == q && ra == 0 && paired {
            *a = C64::new(norm, 0.0);
        }
    }
    let mut remaining = interior;
    remaining.push(INFALLING.to_string());
    remaining.push(ALICE_MEMORY.to_string());
    Ok(BlackHoleModel {
        n_interior,
        seed,
        early_radiation: early,
        remaining,
        late_radiation: Vec::new(),
        late_radiation_count: 0,
        alice_timing: AliceTiming::Never,
        evolved: false,
        state: StateVector::new(systems, amps)?,
    })
}

impl BlackHoleModel {
    /// Number of factors emitted by [`hp_evolve`]; at most `n + 2`.
    pub fn with_emission(mut self, m: usize) -> Result<Self> {
        if m > self.n_interior + 2 {
            return Err(Error::InvalidArgument(format!("m = {m} exceeds scrambled block {}", self.n_interior + 2)));
        }
        self.late_radiation_count = m;
        Ok(self)
    }

    pub fn with_alice(mut self, timing: AliceTiming) -> Self {
        self.alice_timing = timing;
        self
    }

    /// Bob's laboratory: early plus late radiation.
    pub fn bob_systems(&self) -> Vec<&str> {
        self.early_radiation.iter().chain(&self.late_radiation).map(|s| s.as_str()).collect()
    }

    pub fn remaining_systems(&self) -> Vec<&str> {
        self.remaining.iter().map(|s| s.as_str()).collect()
    }

    /// `|1 − ⟨ψ|ψ⟩|`.
    pub fn norm_error(&self) -> f64 {
        let n: f64 = self.state.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        (1.0 - n).abs()
    }

    /// Dimension of `R` is at least that of the remaining interior.
    pub fn past_page_time(&self) -> bool {
        let interior = self.remaining.iter().filter(|s| s.starts_with("B_")).count();
        self.early_radiation.len() >= interior
    }

    /// Entropy of the late radiation in bits.
    pub fn late_radiation_entropy(&self) -> Result<f64> {
        if self.late_radiation.is_empty() {
            return Ok(0.0);
        }
        let l: Vec<&str> = self.late_radiation.iter().map(|s| s.as_str()).collect();
        pure_entropy_of(&self.state, &l)
    }
}

fn alice_copy(state: &StateVector) -> Result<StateVector> {
    state.apply_unitary(&cnot(), &[INFALLING, ALICE_MEMORY])
}

/// One Haar unitary on the scrambled block, then emission of its first `m`
/// factors.
pub fn hp_evolve(model: &BlackHoleModel, seed: u64) -> Result<BlackHoleModel> {
    if model.evolved {
        return Err(Error::InvalidArgument("model already evolved".into()));
    }
    let mut out = model.clone();
    out.seed = seed;
    if out.alice_timing == AliceTiming::BeforeScrambling {
        out.state = alice_copy(&out.state)?;
    }
    let block: Vec<&str> = model.remaining.iter().map(|s| s.as_str()).collect();
    let u = haar_unitary(1usize << block.len(), seed);
    out.state = out.state.apply_unitary(&u, &block)?;
    if out.alice_timing == AliceTiming::AfterScrambling {
        out.state = alice_copy(&out.state)?;
    }
    let m = model.late_radiation_count;
    let emitted: Vec<String> = out.remaining.drain(..m).collect();
    for (j, name) in emitted.iter().enumerate() {
        let new = format!("R'_{}", j + 1);
        out.state.relabel(name, &new)?;
        out.late_radiation.push(new);
    }
    out.evolved = true;
    Ok(out)
}

/// Decoupling of `S` from the unemitted block, plus the Petz decoder's
/// entanglement fidelity when filled in by [`reconstruct`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    /// `‖ρ_{S,rem} − ρ_S ⊗ ρ_rem‖₁`, no factor ½.
    pub trace_distance: f64,
    pub mutual_information_bits: f64,
    pub reconstruction_fidelity: Option<f64>,
}

pub fn decoupling_error(model: &BlackHoleModel) -> Result<DecouplingReport> {
    let rem = model.remaining_systems();
    if rem.is_empty() {
        return Ok(DecouplingReport { trace_distance: 0.0, mutual_information_bits: 0.0, reconstruction_fidelity: None });
    }
    let mut keep = vec![REFERENCE];
    keep.extend(rem.iter().copied());
    let joint = model.state.reduced(&keep)?;
    let rs = joint.partial_trace(&[REFERENCE])?;
    let rr = joint.partial_trace(&rem)?;
    let prod = rs.tensor(&rr)?;
    let diff = joint.matrix() - prod.matrix();
    Ok(DecouplingReport {
        trace_distance: diff.hermitian_part().trace_norm_hermitian(),
        mutual_information_bits: pure_mutual_information(&model.state, &[REFERENCE], &rem)?,
        reconstruction_fidelity: None,
    })
}

/// The channel `Q → Bob` of the scrambling dynamics, read off the purified
/// global state `|Ψ⟩ = Σ_s |s⟩_S W|s⟩ / √2`.
fn bob_channel(model: &BlackHoleModel) -> Result<Channel> {
    let bob = model.bob_systems();
    let env: Vec<&str> = model.state.names().into_iter().filter(|n| *n != REFERENCE && !bob.contains(n)).collect();
    let mut order = vec![REFERENCE];
    order.extend(env.iter().copied());
    order.extend(bob.iter().copied());
    let p = model.state.permuted(&order)?;
    let db = 1usize << bob.len();
    let de = p.dim() / 2 / db;
    let amp = p.amplitudes();
    let r2 = sqrt(2.0);
    let kraus: Vec<CMatrix> = (0..de)
        .map(|e| CMatrix::from_fn(db, 2, |b, q| amp[(q * de + e) * db + b].scale(r2)))
        .collect();
    let outputs = bob.iter().map(|n| SystemLabel::qubit(*n)).collect();
    Channel::new(kraus, vec![SystemLabel::qubit(INFALLING)], outputs)
}

/// Decoded state on `Q_R, S, R_A`, normalized.
pub fn decode(model: &BlackHoleModel) -> Result<DensityState> {
    if model.bob_systems().is_empty() {
        return Err(Error::InvalidArgument("Bob holds nothing".into()));
    }
    if !model.state.has_system(ALICE_MEMORY) {
        return Err(Error::InvalidArgument("R_A was emitted; keep m ≤ n + 1 for decoding".into()));
    }
    let ch = bob_channel(model)?;
    let petz = ch
        .petz_recovery(&CMatrix::identity(2).scale_real(0.5))?
        .with_outputs(vec![SystemLabel::qubit(DECODED)])?;
    let rho = petz.apply_pure(&model.state, &[REFERENCE, ALICE_MEMORY])?;
    let tr = rho.trace().re;
    if tr <= 0.0 {
        return Err(Error::InvalidState("decoder output has zero trace".into()));
    }
    DensityState::new(
        vec![SystemLabel::qubit(DECODED), SystemLabel::qubit(REFERENCE), SystemLabel::qubit(ALICE_MEMORY)],
        rho.scale_real(1.0 / tr),
    )
}

pub fn reconstruct(model: &BlackHoleModel) -> Result<DecouplingReport> {
    let mut rep = decoupling_error(model)?;
    let rho = decode(model)?;
    let qs = rho.partial_trace(&[DECODED, REFERENCE])?;
    rep.reconstruction_fidelity = Some(max_entangled_overlap(qs.matrix(), 2));
    Ok(rep)
}

/// `(H(Z|R_A), H(X|R_B))` for `S`, after Bob measures the decoded qubit
/// diagonally into `R_B`.
pub fn objective_entropies(decoded: &DensityState) -> Result<(f64, f64)> {
    let s = SystemLabel::qubit(REFERENCE);
    let hz = measured_conditional_entropy(decoded, &ProjectiveBasis::computational(s.clone()), &[ALICE_MEMORY])?;
    let bob = measurement_channel(&ProjectiveBasis::diagonal(SystemLabel::qubit(DECODED))?, SystemLabel::qubit(BOB_RECORD))?;
    let measured = bob.apply(decoded)?;
    let hx = measured_conditional_entropy(&measured, &ProjectiveBasis::diagonal(s)?, &[BOB_RECORD])?;
    Ok((hz, hx))
}

/// One row of an ensemble sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub m: usize,
    pub trace_distance: f64,
    pub mutual_information_bits: f64,
    pub fidelity: f64,
    pub h_z_given_ra: f64,
    pub h_x_given_rb: f64,
}

/// Build, evolve, decode and measure for one `(n, m, seed)`.
pub fn hp_sample(n_interior: usize, m: usize, seed: u64, timing: AliceTiming) -> Result<SweepRow> {
    let model = build_old_blackhole(n_interior, seed)?.with_emission(m)?.with_alice(timing);
    let ev = hp_evolve(&model, seed)?;
    let rep = reconstruct(&ev)?;
    let (hz, hx) = objective_entropies(&decode(&ev)?)?;
    Ok(SweepRow {
        seed,
        m,
        trace_distance: rep.trace_distance,
        mutual_information_bits: rep.mutual_information_bits,
        fidelity: rep.reconstruction_fidelity.unwrap_or(0.0),
        h_z_given_ra: hz,
        h_x_given_rb: hx,
    })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpConfig {
    pub n_interior: usize,
    pub m: usize,
    pub seeds: Vec<u64>,
    pub timing: AliceTiming,
    /// Whether Bob decodes; without it the entropies are read right after
    /// Alice's measurement and Bob's record is empty.
    pub reconstruct: bool,
}

impl Default for HpConfig {
    fn default() -> Self {
        HpConfig {
            n_interior: DEFAULT_INTERIOR,
            m: DEFAULT_EMITTED,
            seeds: (0..DEFAULT_SEEDS).collect(),
            timing: AliceTiming::BeforeScrambling,
            reconstruct: true,
        }
    }
}

pub fn verify_hp_extended() -> Result<TheoremReport> {
    verify_hp_extended_with(&HpConfig::default(), &Toggles::all())
}

pub fn verify_hp_extended_with(cfg: &HpConfig, toggles: &Toggles) -> Result<TheoremReport> {
    let mut hz = Vec::new();
    let mut hx = Vec::new();
    let mut fid = Vec::new();
    if cfg.reconstruct {
        for &seed in &cfg.seeds {
            let row = hp_sample(cfg.n_interior, cfg.m, seed, cfg.timing)?;
            hz.push(row.h_z_given_ra);
            hx.push(row.h_x_given_rb);
            fid.push(row.fidelity);
        }
    } else {
        let model = build_old_blackhole(cfg.n_interior, 0)?;
        let copied = alice_copy(&model.state)?;
        let rho = copied.reduced(&[REFERENCE, ALICE_MEMORY])?;
        let z = measured_conditional_entropy(&rho, &ProjectiveBasis::computational(SystemLabel::qubit(REFERENCE)), &[ALICE_MEMORY])?;
        // Bob's record carries nothing about S
        let x = measured_conditional_entropy(&copied.reduced(&[REFERENCE])?, &ProjectiveBasis::diagonal(SystemLabel::qubit(REFERENCE))?, &[])?;
        hz.push(z);
        hx.push(x);
    }
    let sums: Vec<f64> = hz.iter().zip(&hx).map(|(a, b)| a + b).collect();
    let min_sum = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let excluded = min_sum >= 1.0 - UNCERTAINTY_SLACK;
    let mut rep = TheoremReport::new(TheoremId::Thm4, toggles, excluded);
    rep.set("n_interior", cfg.n_interior as f64);
    rep.set("m", cfg.m as f64);
    rep.set("mean_h_z_given_ra", mean(&hz));
    rep.set("mean_h_x_given_rb", mean(&hx));
    rep.set("min_sum", min_sum);
    rep.set("h_z_given_ra", hz.clone());
    rep.set("h_x_given_rb", hx.clone());
    if !fid.is_empty() {
        rep.set("mean_fidelity", mean(&fid));
    }
    rep.set("objectivity_demands_sum", 0.0);
    rep.entropy = Some(EntropyReport::new(mean(&hz), mean(&hx), 1.0));
    if !cfg.reconstruct {
        rep.notes.push("reconstruction disabled: entropies read right after Alice's measurement".to_string());
    }
    if !toggles.enabled(Assumption::BlackHole) {
        rep.notes.push("black-hole assumptions off: Bob is not granted the decoded qubit".to_string());
    }
    Ok(rep)
}

fn phi_plus(a: &str, b: &str) -> Result<DensityState> {
    StateVector::max_entangled(SystemLabel::qubit(a), SystemLabel::qubit(b))?.density()
}

pub fn verify_no_cloning() -> Result<TheoremReport> {
    verify_no_cloning_with(&Toggles::all())
}

pub fn verify_no_cloning_with(toggles: &Toggles) -> Result<TheoremReport> {
    let alice = phi_plus(INFALLING, REFERENCE)?;
    let bob = phi_plus(DECODED, REFERENCE)?;
    let i_alice = mutual_information(&alice, &[INFALLING], &[REFERENCE])?;
    let i_bob = mutual_information(&bob, &[DECODED], &[REFERENCE])?;
    let set = MarginalConstraintSet::from_targets(vec![alice.clone(), bob], Semantics::ExactMarginals)?;
    let feas = agreement_feasible(&set)?;

    let product = DensityState::maximally_mixed(vec![SystemLabel::qubit(DECODED), SystemLabel::qubit(REFERENCE)])?;
    let control = MarginalConstraintSet::from_targets(vec![alice, product], Semantics::ExactMarginals)?;
    let control = agreement_feasible(&control)?;

    let backing = hp_sample(DEFAULT_INTERIOR, DEFAULT_EMITTED, 0, AliceTiming::Never)?;

    let mut rep = TheoremReport::new(TheoremId::NoCloning, toggles, feas.verdict == Verdict::Infeasible);
    rep.set("i_q_s_bits", i_alice);
    rep.set("i_qr_s_bits", i_bob);
    rep.set("bob_reconstruction_fidelity", backing.fidelity);
    if let Some(c) = &feas.certificate {
        rep.set("certificate", c.as_str());
    }
    rep.add_feasibility("alice_q_s_vs_bob_qr_s", feas);
    rep.add_feasibility("control_bob_uncorrelated", control);
    Ok(rep)
}

/// Six-qubit horizon model `R_1, R_2, H, Q_Ref, A, Q_Bob`: Bob's old black
/// hole has `Q_Ref` entangled with the early radiation through a Haar
/// unitary on `R`, `A` untouched.
pub const FIREWALL_SYSTEMS: [&str; 6] = ["R_1", "R_2", "H", "Q_Ref", "A", "Q_Bob"];

fn firewall_bob_state(seed: u64) -> Result<StateVector> {
    let sys: Vec<SystemLabel> = FIREWALL_SYSTEMS.iter().map(|n| SystemLabel::qubit(*n)).collect();
    let z = StateVector::zeros(sys)?;
    let h = hadamard();
    let mut s = z.apply_unitary(&h, &["R_1"])?.apply_unitary(&cnot(), &["R_1", "Q_Ref"])?;
    s = s.apply_unitary(&h, &["R_2"])?.apply_unitary(&cnot(), &["R_2", "H"])?;
    s.apply_unitary(&haar_unitary(4, seed), &["R_1", "R_2"])
}

/// Bob's distillation: undo the radiation unitary, swap the partner into
/// `Q_Bob`.
fn distill(s: &StateVector, seed: u64) -> Result<StateVector> {
    let v = haar_unitary(4, seed).adjoint();
    let s = s.apply_unitary(&v, &["R_1", "R_2"])?;
    let mut swap = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = C64::new(1.0, 0.0);
    }
    s.apply_unitary(&swap, &["R_1", "Q_Bob"])
}

/// Win probability of `(P = Alice's Z outcome on A, P̄ = Bob's X outcome on
/// Q_Bob)` for the indicated `Q_Ref`.
fn firewall_win(s: &StateVector) -> Result<f64> {
    let z = s.reduced(&["A", "Q_Ref"])?;
    let pz = z.matrix()[(0, 0)].re + z.matrix()[(3, 3)].re;
    let hh = hadamard().kron(&hadamard());
    let x = z_basis_of(&s.reduced(&["Q_Bob", "Q_Ref"])?, &hh)?;
    let px = x.matrix()[(0, 0)].re + x.matrix()[(3, 3)].re;
    Ok(0.5 * pz + 0.5 * px)
}

fn z_basis_of(rho: &DensityState, u: &CMatrix) -> Result<DensityState> {
    let names = rho.names();
    rho.apply_unitary(u, &names)
}

pub fn verify_firewall() -> Result<TheoremReport> {
    verify_firewall_with(&Toggles::all(), 0)
}

pub fn verify_firewall_with(toggles: &Toggles, seed: u64) -> Result<TheoremReport> {
    let bob_state = distill(&firewall_bob_state(seed)?, seed)?;
    let i_bob = pure_mutual_information(&bob_state, &["Q_Bob"], &["Q_Ref"])?;
    let bob_marginal = bob_state.reduced(&["Q_Ref", "Q_Bob"])?;
    let alice_marginal = phi_plus("A", "Q_Ref")?;

    let set = MarginalConstraintSet::from_targets(vec![alice_marginal, bob_marginal], Semantics::ExactMarginals)?;
    let feas = agreement_feasible(&set)?;

    let win_bob = firewall_win(&bob_state)?;
    // Alice-consistent state: vacuum pair across the horizon, Bob's qubit blank
    let sys: Vec<SystemLabel> = FIREWALL_SYSTEMS.iter().map(|n| SystemLabel::qubit(*n)).collect();
    let alice_state = StateVector::zeros(sys)?.apply_unitary(&hadamard(), &["A"])?.apply_unitary(&cnot(), &["A", "Q_Ref"])?;
    let win_alice = firewall_win(&alice_state)?;

    let claimed = 1.0;
    let bound = game_bound();
    let combine = toggles.enabled(Assumption::Consistency);
    let contradiction = feas.verdict == Verdict::Infeasible && combine && win_bob < claimed && claimed > bound;
    let mut rep = TheoremReport::new(TheoremId::Thm5, toggles, contradiction);
    rep.set("i_qbob_qref_bits", i_bob);
    rep.set("strategy_win_probability_bob_state", win_bob);
    rep.set("strategy_win_probability_alice_state", win_alice);
    rep.set("bound", bound);
    if combine {
        rep.set("claimed", claimed);
    }
    if let Some(c) = &feas.certificate {
        rep.set("certificate", c.as_str());
    }
    rep.add_feasibility("alice_a_qref_vs_bob_qbob_qref", feas);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model_diagnostics_are_linked() {
        for m in 0..4 {
            let row = hp_sample(2, m, 1, AliceTiming::Never).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&row.fidelity), "{row:?}");
            assert!(row.fidelity >= 1.0 - row.trace_distance - 1e-9, "{row:?}");
        }
    }
}
