use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::exec::{Executor, PhysicistSpec, ProtocolTrace};
use super::{Assumption, TheoremId, TheoremReport, Toggles};
use crate::error::Result;
use crate::info::{maassen_uffink_bound, measured_conditional_entropy, EntropyReport};
use crate::linalg::{CMatrix, C64};
use crate::math::sqrt;
use crate::perspective::{agreement_feasible, MarginalConstraintSet, Semantics, Verdict};
use crate::qcore::gates::{cnot, hadamard, preparation_unitary};
use crate::qcore::{measurement_channel, DensityState, ProjectiveBasis, StateVector, SystemLabel};

pub const WIGNER_SYSTEMS: [&str; 2] = ["Q", "L_A"];
pub const DEUTSCH_SYSTEMS: [&str; 3] = ["Q", "R_A", "R_B"];

fn qubits(names: &[&str]) -> Vec<SystemLabel> {
    names.iter().map(|n| SystemLabel::qubit(*n)).collect()
}

fn plus() -> Vec<C64> {
    let h = 1.0 / sqrt(2.0);
    vec![C64::new(h, 0.0), C64::new(h, 0.0)]
}

fn zero() -> Vec<C64> {
    vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
}

pub fn run_wigner() -> Result<(ProtocolTrace, TheoremReport)> {
    run_wigner_with(&Toggles::all())
}

pub fn run_wigner_with(toggles: &Toggles) -> Result<(ProtocolTrace, TheoremReport)> {
    let mut ex = Executor::new(
        qubits(&WIGNER_SYSTEMS),
        vec![PhysicistSpec::new("Alice", &["Q"]), PhysicistSpec::new("Bob", &["Q", "L_A"])],
    )?;
    ex.apply(&preparation_unitary(&zero()), &["L_A"])?;
    ex.finish_step("Bob", "prepare L_A |0>")?;
    ex.apply(&preparation_unitary(&plus()), &["Q"])?;
    ex.finish_step("Bob", "prepare Q |+>")?;
    ex.finish_step("Bob", "isolate")?;
    ex.apply(&cnot(), &["Q", "L_A"])?;
    ex.record("Alice", "L_A")?;
    ex.finish_step("Alice", "measure Q computational into L_A")?;
    ex.finish_step("Alice", "infer Q")?;
    ex.finish_step("Bob", "infer Q L_A")?;
    let trace = ex.into_trace("wigner");

    let last = trace.last();
    let alice0 = last
        .perspectives
        .iter()
        .find(|p| p.owner == "Alice" && p.condition == vec![("L_A".to_string(), 0)])
        .expect("Alice branch 0")
        .state
        .clone();
    let bob = last.perspectives.iter().find(|p| p.owner == "Bob").expect("Bob").state.clone();
    let bob_q = bob.partial_trace(&["Q"])?;
    let half = CMatrix::identity(2).scale_real(0.5);

    let set = MarginalConstraintSet::from_targets(vec![alice0.clone(), bob.clone()], Semantics::SupportContainment)?;
    let feas = agreement_feasible(&set)?;
    let infeasible = feas.verdict == Verdict::Infeasible;

    let mut rep = TheoremReport::new(TheoremId::Thm1, toggles, infeasible);
    rep.set("alice_branch0_purity", alice0.purity());
    rep.set("alice_branch0_p0", alice0.matrix()[(0, 0)].re);
    rep.set("bob_purity", bob.purity());
    rep.set("bob_marginal_q_deviation", (bob_q.matrix() - &half).max_abs());
    if let Some(c) = &feas.certificate {
        rep.set("certificate", c.as_str());
    }
    if !toggles.enabled(Assumption::Agreement) {
        rep.notes.push("agreement not assumed: the two descriptions may coexist".to_string());
    }
    rep.add_feasibility("alice_q_vs_bob_q_la", feas);

    // the footnote control: a product state and a mixed marginal can agree
    let ket0 = DensityState::basis(qubits(&["A"]), 0)?;
    let plus_b = DensityState::pure(qubits(&["B"]), &plus())?;
    let ab = ket0.tensor(&plus_b)?;
    let a_mixed = DensityState::maximally_mixed(qubits(&["A"]))?;
    let control = MarginalConstraintSet::from_targets(vec![ab, a_mixed], Semantics::SupportContainment)?;
    rep.add_feasibility("control_product_vs_mixed", agreement_feasible(&control)?);
    Ok((trace, rep))
}

pub fn run_deutsch() -> Result<ProtocolTrace> {
    run_deutsch_with(&plus())
}

/// Deutsch's protocol with `Q` prepared in `ket`.
pub fn run_deutsch_with(ket: &[C64]) -> Result<ProtocolTrace> {
    let mut ex = Executor::new(
        qubits(&DEUTSCH_SYSTEMS),
        vec![PhysicistSpec::new("Alice", &["Q"]), PhysicistSpec::new("Bob", &["Q", "R_A"])],
    )?;
    ex.apply(&preparation_unitary(ket), &["Q"])?;
    ex.finish_step("Bob", "prepare Q")?;
    ex.finish_step("Bob", "isolate")?;
    ex.apply(&cnot(), &["Q", "R_A"])?;
    ex.record("Alice", "R_A")?;
    ex.finish_step("Alice", "measure Q computational into R_A")?;
    ex.apply(&cnot(), &["Q", "R_A"])?;
    ex.finish_step("Bob", "reverse Q R_A to step 2")?;
    let h = hadamard();
    ex.apply(&h, &["Q"])?;
    ex.apply(&cnot(), &["Q", "R_B"])?;
    ex.apply(&h, &["Q"])?;
    ex.record("Bob", "R_B")?;
    ex.finish_step("Bob", "measure Q diagonal into R_B")?;
    Ok(ex.into_trace("deutsch"))
}

pub fn verify_objective_outcomes() -> Result<TheoremReport> {
    verify_objective_outcomes_with(&Toggles::all())
}

pub fn verify_objective_outcomes_with(toggles: &Toggles) -> Result<TheoremReport> {
    let q = SystemLabel::qubit("Q");
    let s = SystemLabel::qubit("S");
    let phi = StateVector::max_entangled(q.clone(), s.clone())?.density()?;
    let z = ProjectiveBasis::computational(q.clone());
    let x = ProjectiveBasis::diagonal(q.clone())?;
    let zc = measurement_channel(&z, SystemLabel::qubit("R_A"))?;
    let xc = measurement_channel(&x, SystemLabel::qubit("R_B"))?;
    let sigma_a = zc.apply(&phi)?.partial_trace(&["R_A", "S"])?;
    let sigma_b = xc.apply(&phi)?.partial_trace(&["R_B", "S"])?;

    let zs = ProjectiveBasis::computational(s.clone());
    let xs = ProjectiveBasis::diagonal(s.clone())?;
    let hz = measured_conditional_entropy(&sigma_a, &zs, &["R_A"])?;
    let hx = measured_conditional_entropy(&sigma_b, &xs, &["R_B"])?;
    let bound = maassen_uffink_bound(&zs, &xs)?;

    // one actual joint description: Z first, then X on the same Q
    let seq = xc.apply(&zc.apply(&phi)?)?;
    let seq_hz = measured_conditional_entropy(&seq, &zs, &["R_A"])?;
    let seq_hx = measured_conditional_entropy(&seq, &xs, &["R_B"])?;

    let set = MarginalConstraintSet::from_targets(vec![sigma_a, sigma_b], Semantics::ExactMarginals)?;
    let feas = agreement_feasible(&set)?;
    let infeasible = feas.verdict == Verdict::Infeasible;

    let mut rep = TheoremReport::new(TheoremId::Thm2, toggles, infeasible && hz + hx < bound);
    rep.set("h_z_given_ra", hz);
    rep.set("h_x_given_rb", hx);
    rep.set("maassen_uffink_bound", bound);
    rep.set("sequential_h_z_given_ra", seq_hz);
    rep.set("sequential_h_x_given_rb", seq_hx);
    rep.set("sequential_sum", seq_hz + seq_hx);
    if let Some(c) = &feas.certificate {
        rep.set("certificate", c.as_str());
    }
    rep.entropy = Some(EntropyReport::new(hz, hx, bound));
    rep.add_feasibility("sigma_ra_s_vs_sigma_rb_s", feas);
    Ok(rep)
}
