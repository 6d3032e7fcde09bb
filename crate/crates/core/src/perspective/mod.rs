//! Observer-relative descriptions: Heisenberg cuts, conditioning, the
//! "can agree" support test, certainty statements and the consistency rule.

mod feasibility;

pub use feasibility::{
    agreement_feasible, agreement_feasible_with, CertificateKind, FeasibilityReport, MarginalConstraintSet,
    Semantics, SolverOptions, Verdict,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::qcore::{lueders_update, DensityState, Outcome, ProjectiveBasis, SystemLabel};

/// Relative eigenvalue cutoff defining a support projector.
pub const SUPPORT_CUTOFF: f64 = 1e-10;
/// Max-abs leakage outside a support that still counts as contained.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Probability slack for "certain".
pub const CERTAINTY_TOL: f64 = 1e-9;
/// Off-diagonal max-abs allowed in a classically described register.
pub const CLASSICALITY_TOL: f64 = 1e-9;
/// Smallest probability one may condition on.
pub const MIN_CONDITION_PROBABILITY: f64 = 1e-12;

/// One applied update: register, basis index and its prior probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningEvent {
    pub register: String,
    pub outcome: usize,
    pub probability: f64,
}

/// A physicist's description of the systems inside their cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perspective {
    owner: String,
    own_registers: Vec<String>,
    state: DensityState,
    conditioning_log: Vec<ConditioningEvent>,
}

impl Perspective {
    /// `own_registers` are the owner's memory systems; none of them (and no
    /// system named like the owner) may appear in the state.
    pub fn new(owner: &str, own_registers: &[&str], state: DensityState) -> Result<Self> {
        for s in state.systems() {
            if s.name == owner || own_registers.contains(&s.name.as_str()) {
                return Err(Error::SelfDescription { owner: owner.to_string(), system: s.name.clone() });
            }
        }
        Ok(Perspective {
            owner: owner.to_string(),
            own_registers: own_registers.iter().map(|s| s.to_string()).collect(),
            state,
            conditioning_log: Vec::new(),
        })
    }

    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn own_registers(&self) -> &[String] {
        &self.own_registers
    }

    pub fn cut(&self) -> &[SystemLabel] {
        self.state.systems()
    }

    pub fn state(&self) -> &DensityState {
        &self.state
    }

    pub fn conditioning_log(&self) -> &[ConditioningEvent] {
        &self.conditioning_log
    }

    /// Marginal of the assigned state on `subset`.
    pub fn marginal(&self, subset: &[&str]) -> Result<DensityState> {
        self.state.partial_trace(subset)
    }

    /// Update on `register` reading `outcome` in the computational basis.
    pub fn condition_on(&self, register: &str, outcome: usize) -> Result<Perspective> {
        let label = self.state.system(register)?.clone();
        self.condition_on_basis(&ProjectiveBasis::computational(label), outcome)
    }

    /// Update on outcome `outcome` of `basis`. The measured system stays in
    /// the description, collapsed onto the observed vector, so marginals of
    /// the other systems follow `σ ∝ tr_Q(|x⟩⟨x|_Q ρ)`.
    pub fn condition_on_basis(&self, basis: &ProjectiveBasis, outcome: usize) -> Result<Perspective> {
        let reg = basis.target().name.clone();
        if outcome >= basis.len() {
            return Err(Error::InvalidArgument(format!("outcome {outcome} out of range for {reg}")));
        }
        let (p, post) = lueders_update(&self.state, &reg, basis.vector(outcome))?;
        let post = match post {
            Some(s) if p > MIN_CONDITION_PROBABILITY => s,
            _ => return Err(Error::ZeroProbability { register: reg, outcome, probability: p }),
        };
        let mut log = self.conditioning_log.clone();
        log.push(ConditioningEvent { register: reg, outcome, probability: p });
        Ok(Perspective {
            owner: self.owner.clone(),
            own_registers: self.own_registers.clone(),
            state: post,
            conditioning_log: log,
        })
    }

    /// The outcome predicted with probability `≥ 1 − 1e-9`, if any.
    pub fn certainty(&self, basis: &ProjectiveBasis) -> Result<Option<Outcome>> {
        certainty(&self.state, basis)
    }
}

/// The outcome of `basis` that `rho` predicts with certainty, if any.
pub fn certainty(rho: &DensityState, basis: &ProjectiveBasis) -> Result<Option<Outcome>> {
    let m = rho.partial_trace(&[basis.target().name.as_str()])?;
    if m.systems()[0].dim != basis.target().dim {
        return Err(Error::DimensionMismatch(format!("basis on {}", basis.target())));
    }
    for (k, v) in basis.vectors().iter().enumerate() {
        let p = m.fidelity_with_ket(v);
        if p >= 1.0 - CERTAINTY_TOL {
            return Ok(Some(Outcome { register: basis.target().clone(), value: k, probability: p.min(1.0) }));
        }
    }
    Ok(None)
}

/// Support projector of a Hermitian PSD matrix (relative cutoff).
pub(crate) fn support_projector(m: &CMatrix) -> CMatrix {
    let e = eigh(m);
    let top = e.values.last().copied().unwrap_or(0.0).max(0.0);
    let n = m.rows();
    let mut p = CMatrix::zeros(n, n);
    for k in 0..n {
        if e.values[k] > SUPPORT_CUTOFF * top {
            let v = e.vector(k);
            p = &p + &CMatrix::outer(&v, &v);
        }
    }
    p
}

/// `‖(𝟙−Π_ρ) ψ (𝟙−Π_ρ)‖_max`: the weight of `psi` outside `supp(rho)`.
pub(crate) fn support_leakage(psi: &CMatrix, rho: &CMatrix) -> f64 {
    let n = rho.rows();
    let q = &CMatrix::identity(n) - &support_projector(rho);
    q.matmul(psi).matmul(&q).max_abs()
}

/// `supp(ψ_T) ⊆ supp(ρ^P_T)` for every non-empty subset `T` of the systems
/// shared by the cut and `psi`.
pub fn can_agree(p: &Perspective, psi: &DensityState) -> Result<bool> {
    let overlap: Vec<&str> = p
        .state
        .names()
        .into_iter()
        .filter(|n| psi.has_system(n))
        .collect();
    if overlap.is_empty() {
        return Err(Error::NoOverlap);
    }
    for s in p.state.systems() {
        if let Ok(t) = psi.system(&s.name) {
            if t.dim != s.dim {
                return Err(Error::DimensionMismatch(format!("{s} vs {t}")));
            }
        }
    }
    let n = overlap.len();
    for mask in 1u64..(1u64 << n) {
        let subset: Vec<&str> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| overlap[i]).collect();
        let r = p.state.partial_trace(&subset)?;
        let order = r.names();
        let s = psi.partial_trace(&subset)?.permuted(&order)?;
        if support_leakage(s.matrix(), r.matrix()) > SUPPORT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `rho` describes `registers` classically: the marginal on them is
/// diagonal to `1e-9` max-abs in the computational basis.
pub fn is_classical(rho: &DensityState, registers: &[&str]) -> Result<bool> {
    let m = rho.partial_trace(registers)?;
    let d = m.dim();
    let mut off: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                off = off.max(m.matrix()[(i, j)].norm());
            }
        }
    }
    Ok(off <= CLASSICALITY_TOL)
}

/// "`chain[0]` is certain that `chain[1]` is certain that … measuring
/// `basis` yields `outcome`".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertaintyStatement {
    pub chain: Vec<String>,
    pub basis: ProjectiveBasis,
    pub outcome: usize,
}

impl CertaintyStatement {
    pub fn new(chain: Vec<String>, basis: ProjectiveBasis, outcome: usize) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::ChainTooShort);
        }
        if outcome >= basis.len() {
            return Err(Error::InvalidArgument(format!("outcome {outcome} out of range")));
        }
        Ok(CertaintyStatement { chain, basis, outcome })
    }

    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    pub fn target(&self) -> &str {
        &self.basis.target().name
    }
}

/// The consistency rule: "I am certain that Q is certain of x" becomes "I am
/// certain of x", allowed only when the outer physicist describes the inner
/// one classically.
pub fn apply_assumption_c(s: &CertaintyStatement, inner_is_classical: bool) -> Result<CertaintyStatement> {
    if s.chain.len() < 2 {
        return Err(Error::ChainTooShort);
    }
    let inner = s.chain.last().expect("chain non-empty");
    if !inner_is_classical {
        return Err(Error::ClassicalityViolated(format!(
            "{} does not describe {} classically",
            s.chain[s.chain.len() - 2],
            inner
        )));
    }
    let mut out = s.clone();
    out.chain.pop();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};
    use crate::math::sqrt;
    use alloc::vec;

    fn q(n: &str) -> SystemLabel {
        SystemLabel::qubit(n)
    }

    fn hardy_with_record() -> DensityState {
        // Hardy state on (Q_A, Q_C) with Charly's reading copied into R_C
        let t = 1.0 / sqrt(3.0);
        let mut ket = vec![ZERO; 8];
        ket[0b000] = C64::new(t, 0.0);
        ket[0b011] = C64::new(t, 0.0);
        ket[0b100] = C64::new(t, 0.0);
        DensityState::pure(vec![q("Q_A"), q("Q_C"), q("R_C")], &ket).unwrap()
    }

    #[test]
    fn charly_concludes_alice_zero() {
        let p = Perspective::new("Charly", &["L_C"], hardy_with_record()).unwrap();
        let c = p.condition_on("R_C", 1).unwrap();
        let qa = c.marginal(&["Q_A"]).unwrap();
        assert!((qa.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        let cert = c.certainty(&ProjectiveBasis::computational(q("Q_A"))).unwrap().unwrap();
        assert_eq!(cert.value, 0);
        assert_eq!(c.conditioning_log().len(), 1);
    }

    #[test]
    fn self_description_rejected() {
        let s = DensityState::basis(vec![q("R_A")], 0).unwrap();
        assert!(matches!(Perspective::new("Alice", &["R_A"], s), Err(Error::SelfDescription { .. })));
    }

    #[test]
    fn zero_probability_condition() {
        let s = DensityState::basis(vec![q("R")], 0).unwrap();
        let p = Perspective::new("P", &[], s).unwrap();
        assert!(matches!(p.condition_on("R", 1), Err(Error::ZeroProbability { .. })));
        assert_eq!(p.condition_on("R", 0).unwrap().state(), p.state());
    }

    #[test]
    fn agreement_cases() {
        let mixed = Perspective::new("P", &[], DensityState::maximally_mixed(vec![q("S")]).unwrap()).unwrap();
        let zero = DensityState::basis(vec![q("S")], 0).unwrap();
        let one = DensityState::basis(vec![q("S")], 1).unwrap();
        assert!(can_agree(&mixed, &zero).unwrap());
        let pz = Perspective::new("P", &[], zero.clone()).unwrap();
        assert!(!can_agree(&pz, &one).unwrap());
        assert!(can_agree(&pz, &zero).unwrap());
        let other = DensityState::basis(vec![q("T")], 0).unwrap();
        assert_eq!(can_agree(&pz, &other), Err(Error::NoOverlap));
    }

    #[test]
    fn consistency_rule() {
        let b = ProjectiveBasis::computational(q("Q_A"));
        let s = CertaintyStatement::new(vec!["Bob".into(), "Charly".into()], b.clone(), 0).unwrap();
        assert_eq!(apply_assumption_c(&s, true).unwrap().chain, vec!["Bob".to_string()]);
        assert!(matches!(apply_assumption_c(&s, false), Err(Error::ClassicalityViolated(_))));
        let one = CertaintyStatement::new(vec!["Bob".into()], b, 0).unwrap();
        assert_eq!(apply_assumption_c(&one, true), Err(Error::ChainTooShort));
    }
}
