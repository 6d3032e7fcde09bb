use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::exec::{Executor, PhysicistSpec, ProtocolTrace};
use super::{Assumption, TheoremId, TheoremReport, Toggles};
use crate::error::{Error, Result};
use crate::game::{game_bound, win_probability, GameStrategy};
use crate::linalg::C64;
use crate::math::sqrt;
use crate::perspective::{apply_assumption_c, is_classical, CertaintyStatement, CERTAINTY_TOL};
use crate::qcore::gates::{cnot, hadamard, preparation_unitary};
use crate::qcore::{seeded_rng, DensityState, ProjectiveBasis, SystemLabel};

pub const FR_SYSTEMS: [&str; 5] = ["Q_A", "Q_C", "R_A", "R_C", "R_B"];

/// One nested certainty statement checked against the global trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub chain: Vec<String>,
    pub target: String,
    pub basis: String,
    pub outcome: usize,
    /// Conditional probability of `outcome` in the innermost physicist's view.
    pub probability: f64,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrOutcome {
    pub acceptance: f64,
    pub chains: Vec<ChainCheck>,
    /// `(P, P̄)` when the chain collapses under the consistency rule.
    pub prediction: Option<(usize, usize)>,
    pub claimed_win_probability: Option<f64>,
    pub actual_win_probability: Option<f64>,
    pub bound: f64,
    pub final_q_c: DensityState,
}

pub(crate) fn hardy_ket() -> Vec<C64> {
    let t = C64::new(1.0 / sqrt(3.0), 0.0);
    vec![t, t, t, C64::new(0.0, 0.0)]
}

pub(crate) fn fr_physicists() -> Vec<PhysicistSpec> {
    vec![
        PhysicistSpec::new("Alice", &["Q_A", "Q_C", "R_C"]),
        PhysicistSpec::new("Charly", &["Q_A", "Q_C"]),
        PhysicistSpec::new("Bob", &["Q_A", "R_A", "Q_C"]),
        PhysicistSpec::new("Darwin", &["Q_A", "R_A", "Q_C", "R_C"]),
        PhysicistSpec::new("Referee", &["Q_C"]),
    ]
}

fn fr_trace() -> Result<ProtocolTrace> {
    let mut ex = Executor::new(FR_SYSTEMS.iter().map(|n| SystemLabel::qubit(*n)).collect(), fr_physicists())?;
    ex.apply(&preparation_unitary(&hardy_ket()), &["Q_A", "Q_C"])?;
    ex.finish_step("Darwin", "prepare Q_A Q_C hardy")?;
    ex.apply(&cnot(), &["Q_A", "R_A"])?;
    ex.record("Alice", "R_A")?;
    ex.finish_step("Alice", "measure Q_A computational into R_A")?;
    ex.apply(&cnot(), &["Q_C", "R_C"])?;
    ex.record("Charly", "R_C")?;
    ex.finish_step("Charly", "measure Q_C computational into R_C")?;
    ex.apply(&cnot(), &["Q_A", "R_A"])?;
    ex.finish_step("Bob", "reverse Q_A R_A to step 2")?;
    let h = hadamard();
    ex.apply(&h, &["Q_A"])?;
    ex.apply(&cnot(), &["Q_A", "R_B"])?;
    ex.apply(&h, &["Q_A"])?;
    ex.record("Bob", "R_B")?;
    ex.finish_step("Bob", "measure Q_A diagonal into R_B")?;
    ex.postselect("R_B", 1)?;
    ex.finish_step("Bob", "postselect R_B = 1bar")?;
    ex.apply(&cnot(), &["Q_C", "R_C"])?;
    ex.finish_step("Darwin", "reverse Q_C R_C to step 3")?;
    ex.finish_step("Bob", "send Q_C to Referee")?;
    ex.finish_step("Bob", "predict (1, 0bar)")?;
    Ok(ex.into_trace("fr"))
}

fn outcome_probability(rho: &DensityState, basis: &ProjectiveBasis, k: usize) -> Result<f64> {
    let m = rho.partial_trace(&[basis.target().name.as_str()])?;
    Ok(m.fidelity_with_ket(basis.vector(k)))
}

fn view<'a>(trace: &'a ProtocolTrace, step: usize, owner: &str, cond: &[(&str, usize)]) -> Result<&'a DensityState> {
    let s = &trace.steps[step - 1];
    s.perspectives
        .iter()
        .find(|p| {
            p.owner == owner
                && p.condition.len() == cond.len()
                && p.condition.iter().zip(cond).all(|((r, v), (r2, v2))| r == r2 && v == v2)
        })
        .map(|p| &p.state)
        .ok_or_else(|| Error::InvalidArgument(format!("no {owner} view at step {step} for {cond:?}")))
}

fn check(
    chain: &[&str],
    state: &DensityState,
    basis: &ProjectiveBasis,
    basis_name: &str,
    outcome: usize,
    step: usize,
) -> Result<ChainCheck> {
    Ok(ChainCheck {
        chain: chain.iter().map(|s| s.to_string()).collect(),
        target: basis.target().name.clone(),
        basis: basis_name.to_string(),
        outcome,
        probability: outcome_probability(state, basis, outcome)?,
        step,
    })
}

fn collapse(mut s: CertaintyStatement, classical: &[bool]) -> Result<CertaintyStatement> {
    for &c in classical {
        s = apply_assumption_c(&s, c)?;
    }
    Ok(s)
}

fn evaluate(apply_c: bool, quantum: bool) -> Result<(ProtocolTrace, FrOutcome)> {
    let trace = fr_trace()?;
    let global = |step: usize| &trace.steps[step - 1].global;
    let comp = |n: &str| ProjectiveBasis::computational(SystemLabel::qubit(n));
    let diag = |n: &str| ProjectiveBasis::diagonal(SystemLabel::qubit(n));

    let mut chains = Vec::new();
    if quantum {
        // Bob after post-selection: Charly saw 1
        chains.push(check(&["Bob"], &global(6).partial_trace(&["R_C"])?, &comp("R_C"), "computational", 1, 6)?);
        // Charly, having seen 1, on the Hardy state
        chains.push(check(&["Bob", "Charly"], view(&trace, 3, "Charly", &[("R_C", 1)])?, &comp("Q_A"), "computational", 0, 3)?);
        // Alice, having seen 0, about the referee's diagonal test
        chains.push(check(&["Bob", "Charly", "Alice"], view(&trace, 2, "Alice", &[("R_A", 0)])?, &diag("Q_C")?, "diagonal", 0, 2)?);
        // Darwin after undoing Charly
        chains.push(check(&["Bob", "Darwin"], view(&trace, 7, "Darwin", &[])?, &comp("Q_C"), "computational", 1, 7)?);
    }
    let certain = chains.len() == 4 && chains.iter().all(|c| c.probability >= 1.0 - CERTAINTY_TOL);

    let final_q_c = trace.last().global.partial_trace(&["Q_C"])?;
    let mut out = FrOutcome {
        acceptance: trace.last().acceptance,
        chains,
        prediction: None,
        claimed_win_probability: None,
        actual_win_probability: None,
        bound: game_bound(),
        final_q_c: final_q_c.clone(),
    };
    if apply_c && certain {
        let alice = CertaintyStatement::new(vec!["Bob".into(), "Charly".into(), "Alice".into()], diag("Q_C")?, 0)?;
        let darwin = CertaintyStatement::new(vec!["Bob".into(), "Darwin".into()], comp("Q_C"), 1)?;
        // outer describes inner classically in the global state at the inner's step
        let alice_classical = is_classical(global(3), &["R_A"])?;
        let charly_classical = is_classical(global(6), &["R_C"])?;
        let bob_classical = is_classical(global(7), &["R_B"])?;
        let p_bar = collapse(alice, &[alice_classical, charly_classical])?;
        let p = collapse(darwin, &[bob_classical])?;
        let strategy = GameStrategy::new(final_q_c, p.outcome, p_bar.outcome)?;
        out.prediction = Some((p.outcome, p_bar.outcome));
        out.claimed_win_probability = Some(1.0);
        out.actual_win_probability = Some(win_probability(&strategy).win_probability);
    }
    Ok((trace, out))
}

pub fn run_fr(apply_c: bool) -> Result<(ProtocolTrace, TheoremReport)> {
    let t = if apply_c { Toggles::all() } else { Toggles::all().without(Assumption::Consistency) };
    run_fr_with(&t)
}

pub fn run_fr_with(toggles: &Toggles) -> Result<(ProtocolTrace, TheoremReport)> {
    let (trace, out) = evaluate(toggles.enabled(Assumption::Consistency), toggles.enabled(Assumption::Quantum))?;
    let contradiction = match (out.claimed_win_probability, out.actual_win_probability) {
        (Some(c), Some(a)) => c > a + 1e-9 && c > out.bound,
        _ => false,
    };
    let mut rep = TheoremReport::new(TheoremId::Thm3, toggles, contradiction);
    rep.set("p_accept", out.acceptance);
    rep.set("bound", out.bound);
    rep.set("final_q_c_p1", out.final_q_c.matrix()[(1, 1)].re);
    for c in &out.chains {
        rep.set(&format!("certainty_{}", c.chain.join("_").to_lowercase()), c.probability);
    }
    if let Some((p, pb)) = out.prediction {
        rep.set("prediction_p", p as f64);
        rep.set("prediction_p_bar", pb as f64);
        rep.set("claimed", out.claimed_win_probability.unwrap_or(0.0));
        rep.set("actual", out.actual_win_probability.unwrap_or(0.0));
        let s = GameStrategy::new(out.final_q_c.clone(), p, pb)?;
        rep.game = Some(win_probability(&s));
    } else if !toggles.enabled(Assumption::Consistency) {
        rep.notes.push("consistency rule off: nested statements do not collapse".to_string());
    }
    if !toggles.enabled(Assumption::Quantum) {
        rep.notes.push("quantum theory not applied to other physicists".to_string());
    }
    Ok((trace, rep))
}

/// A single cut around everything: one description, whose referee
/// statistics are the actual ones.
pub fn run_fr_meta() -> Result<TheoremReport> {
    let trace = fr_trace()?;
    let q_c = trace.last().global.partial_trace(&["Q_C"])?;
    let z = ProjectiveBasis::computational(SystemLabel::qubit("Q_C"));
    let x = ProjectiveBasis::diagonal(SystemLabel::qubit("Q_C"))?;
    let mut rep = TheoremReport::new(TheoremId::Thm3, &Toggles::all().without(Assumption::Consistency), false);
    rep.set("meta_p_computational_1", outcome_probability(&q_c, &z, 1)?);
    rep.set("meta_p_diagonal_0bar", outcome_probability(&q_c, &x, 0)?);
    rep.set("meta_p_diagonal_1bar", outcome_probability(&q_c, &x, 1)?);
    rep.set("p_accept", trace.last().acceptance);
    rep.set("bound", game_bound());
    rep.notes.push("one Heisenberg cut around all labs: no nested reasoning".to_string());
    Ok(rep)
}

/// Restart loop of the sampled demo: attempts until Bob sees 1̄, per run.
pub fn sample_fr_restarts(runs: usize, seed: u64) -> Result<Vec<usize>> {
    let (_, out) = evaluate(false, true)?;
    let p = out.acceptance;
    let mut rng = seeded_rng(seed);
    Ok((0..runs)
        .map(|_| {
            let mut n = 1;
            while rng.random::<f64>() >= p {
                n += 1;
            }
            n
        })
        .collect())
}
