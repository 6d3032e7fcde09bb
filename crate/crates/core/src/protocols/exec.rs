use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qcore::{gates::basis_ket, DensityState, StateVector, SystemLabel, NULL_PROBABILITY};

/// A physicist as far as the executor is concerned: a cut and the registers
/// they have written so far.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicistSpec {
    pub name: String,
    pub cut: Vec<String>,
    pub records: Vec<String>,
}

impl PhysicistSpec {
    pub fn new(name: &str, cut: &[&str]) -> Self {
        PhysicistSpec { name: name.to_string(), cut: cut.iter().map(|s| s.to_string()).collect(), records: Vec::new() }
    }
}

/// A physicist's state on their cut, conditioned on one assignment of
/// values to their records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerspectiveSnapshot {
    pub owner: String,
    pub condition: Vec<(String, usize)>,
    pub probability: f64,
    pub state: DensityState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordProbability {
    pub register: String,
    pub outcome: usize,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    pub actor: String,
    pub operation: String,
    pub global: DensityState,
    pub perspectives: Vec<PerspectiveSnapshot>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<RecordProbability>,
    /// Product of all post-selection probabilities so far.
    pub acceptance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub protocol: String,
    pub systems: Vec<SystemLabel>,
    pub steps: Vec<TraceStep>,
}

impl ProtocolTrace {
    pub fn step(&self, label: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.label == label)
    }

    pub fn last(&self) -> &TraceStep {
        self.steps.last().expect("non-empty trace")
    }

    /// Largest max-abs difference between corresponding global and
    /// perspective states of two traces.
    pub fn max_deviation(&self, other: &ProtocolTrace) -> Result<f64> {
        if self.steps.len() != other.steps.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} steps vs {} steps",
                self.steps.len(),
                other.steps.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.steps.iter().zip(&other.steps) {
            let order = a.global.names();
            worst = worst.max((a.global.matrix() - b.global.permuted(&order)?.matrix()).max_abs());
            if a.perspectives.len() != b.perspectives.len() {
                return Err(Error::DimensionMismatch(format!("perspective count at step {}", a.label)));
            }
            for (p, q) in a.perspectives.iter().zip(&b.perspectives) {
                if p.owner != q.owner || p.condition != q.condition {
                    return Err(Error::InvalidArgument(format!("perspective mismatch at step {}", a.label)));
                }
                let o = p.state.names();
                worst = worst.max((p.state.matrix() - q.state.permuted(&o)?.matrix()).max_abs());
                worst = worst.max((p.probability - q.probability).abs());
            }
            worst = worst.max((a.acceptance - b.acceptance).abs());
        }
        Ok(worst)
    }
}

/// Pure-state protocol executor with a unitary log for exact reversal.
#[derive(Clone, Debug)]
pub struct Executor {
    psi: StateVector,
    physicists: Vec<PhysicistSpec>,
    steps: Vec<TraceStep>,
    acceptance: f64,
    log: Vec<(usize, CMatrix, Vec<String>)>,
    pending_records: Vec<RecordProbability>,
}

impl Executor {
    /// All systems start in `|0⟩`.
    pub fn new(systems: Vec<SystemLabel>, physicists: Vec<PhysicistSpec>) -> Result<Self> {
        Ok(Executor {
            psi: StateVector::zeros(systems)?,
            physicists,
            steps: Vec::new(),
            acceptance: 1.0,
            log: Vec::new(),
            pending_records: Vec::new(),
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.psi
    }

    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    /// Index (1-based) of the step currently being built.
    pub fn current_step(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn apply(&mut self, u: &CMatrix, targets: &[&str]) -> Result<()> {
        self.psi = self.psi.apply_unitary(u, targets)?;
        let step = self.current_step();
        self.log.push((step, u.clone(), targets.iter().map(|s| s.to_string()).collect()));
        Ok(())
    }

    /// Undo, newest first, every logged unitary from step `from` onwards
    /// whose targets lie inside `systems`. Returns how many were undone.
    pub fn reverse(&mut self, systems: &[&str], from: usize) -> Result<usize> {
        let picked: Vec<(CMatrix, Vec<String>)> = self
            .log
            .iter()
            .rev()
            .filter(|(s, _, t)| *s >= from && t.iter().all(|x| systems.contains(&x.as_str())))
            .map(|(_, u, t)| (u.adjoint(), t.clone()))
            .collect();
        for (u, t) in &picked {
            let tr: Vec<&str> = t.iter().map(|s| s.as_str()).collect();
            self.apply(u, &tr)?;
        }
        Ok(picked.len())
    }

    /// Mark `register` as written by `physicist` and note its outcome
    /// probabilities for this step.
    pub fn record(&mut self, physicist: &str, register: &str) -> Result<()> {
        let p = self
            .physicists
            .iter_mut()
            .find(|p| p.name == physicist)
            .ok_or_else(|| Error::UnknownLabel(physicist.to_string()))?;
        if !p.records.iter().any(|r| r == register) {
            p.records.push(register.to_string());
        }
        let m = self.psi.reduced(&[register])?;
        for k in 0..m.dim() {
            self.pending_records.push(RecordProbability {
                register: register.to_string(),
                outcome: k,
                probability: m.matrix()[(k, k)].re,
            });
        }
        Ok(())
    }

    /// Keep only the branch `register = value`; returns its probability.
    pub fn postselect(&mut self, register: &str, value: usize) -> Result<f64> {
        let d = self.psi.systems().iter().find(|s| s.name == register).ok_or_else(|| Error::UnknownLabel(register.into()))?.dim;
        let (p, post) = self.psi.project(register, &basis_ket(d, value))?;
        match post {
            Some(s) => {
                self.psi = s;
                self.acceptance *= p;
                Ok(p)
            }
            None => Err(Error::ZeroProbability { register: register.to_string(), outcome: value, probability: p }),
        }
    }

    pub fn finish_step(&mut self, actor: &str, operation: &str) -> Result<()> {
        let global = self.psi.density()?;
        let perspectives = snapshots(&self.psi, &self.physicists)?;
        let label = format!("{}", self.current_step());
        self.steps.push(TraceStep {
            label,
            actor: actor.to_string(),
            operation: operation.to_string(),
            global,
            perspectives,
            records: core::mem::take(&mut self.pending_records),
            acceptance: self.acceptance,
        });
        Ok(())
    }

    pub fn into_trace(self, protocol: &str) -> ProtocolTrace {
        ProtocolTrace { protocol: protocol.to_string(), systems: self.psi.systems().to_vec(), steps: self.steps }
    }
}

/// Perspective snapshots for every physicist and every non-null assignment
/// of their records.
pub(crate) fn snapshots(psi: &StateVector, physicists: &[PhysicistSpec]) -> Result<Vec<PerspectiveSnapshot>> {
    let mut out = Vec::new();
    for p in physicists {
        let cut: Vec<&str> = p.cut.iter().map(|s| s.as_str()).collect();
        let dims: Vec<usize> = p
            .records
            .iter()
            .map(|r| psi.systems().iter().find(|s| &s.name == r).map(|s| s.dim).ok_or_else(|| Error::UnknownLabel(r.clone())))
            .collect::<Result<_>>()?;
        let total: usize = dims.iter().product();
        for idx in 0..total {
            let mut rem = idx;
            let mut values = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                values[i] = rem % dims[i];
                rem /= dims[i];
            }
            let mut branch = Some(psi.clone());
            let mut prob = 1.0;
            for (r, (&v, &d)) in p.records.iter().zip(values.iter().zip(&dims)) {
                let b = branch.take().expect("branch alive");
                let (q, post) = b.project(r, &basis_ket(d, v))?;
                prob *= q;
                branch = post;
                if branch.is_none() {
                    break;
                }
            }
            let Some(b) = branch else { continue };
            if prob <= NULL_PROBABILITY {
                continue;
            }
            out.push(PerspectiveSnapshot {
                owner: p.name.clone(),
                condition: p.records.iter().cloned().zip(values).collect(),
                probability: prob,
                state: b.reduced(&cut)?,
            });
        }
    }
    Ok(out)
}
