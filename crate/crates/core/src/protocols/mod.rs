//! Executable encodings of the Wigner, Deutsch and Frauchiger–Renner
//! protocols plus the theorem verifiers built on them.

mod exec;
mod fr;
mod wigner;

pub use exec::{Executor, PerspectiveSnapshot, PhysicistSpec, ProtocolTrace, RecordProbability, TraceStep};
pub use fr::{run_fr, run_fr_meta, run_fr_with, sample_fr_restarts, ChainCheck, FrOutcome, FR_SYSTEMS};
pub use wigner::{run_deutsch, run_deutsch_with, run_wigner, run_wigner_with, verify_objective_outcomes,
    verify_objective_outcomes_with, DEUTSCH_SYSTEMS, WIGNER_SYSTEMS};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::game::GameReport;
use crate::info::EntropyReport;
use crate::perspective::FeasibilityReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    /// The original Hayden–Preskill cloning variant of the agreement paradox.
    NoCloning,
}

impl TheoremId {
    pub fn title(self) -> &'static str {
        match self {
            TheoremId::Thm1 => "State agreement paradox",
            TheoremId::Thm2 => "Objective outcome paradox",
            TheoremId::Thm3 => "Quantum collaboration paradox",
            TheoremId::Thm4 => "Gravitational objective outcome paradox",
            TheoremId::Thm5 => "Firewall paradox",
            TheoremId::NoCloning => "Black-hole no-cloning paradox",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        match s {
            "thm1" => Some(TheoremId::Thm1),
            "thm2" => Some(TheoremId::Thm2),
            "thm3" => Some(TheoremId::Thm3),
            "thm4" => Some(TheoremId::Thm4),
            "thm5" => Some(TheoremId::Thm5),
            "no_cloning" | "no-cloning" => Some(TheoremId::NoCloning),
            _ => None,
        }
    }

    /// Assumptions whose conjunction the theorem refutes.
    pub fn required(self) -> &'static [Assumption] {
        match self {
            TheoremId::Thm1 => &[Assumption::Quantum, Assumption::Agreement],
            TheoremId::Thm2 => &[Assumption::Quantum, Assumption::Objectivity],
            TheoremId::Thm3 => &[Assumption::Quantum, Assumption::Consistency],
            TheoremId::Thm4 => &[Assumption::Quantum, Assumption::BlackHole, Assumption::Objectivity],
            TheoremId::Thm5 => &[Assumption::Quantum, Assumption::BlackHole, Assumption::Consistency],
            TheoremId::NoCloning => &[Assumption::Quantum, Assumption::BlackHole, Assumption::Agreement],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// (Q): any physicist may apply quantum theory to any system.
    Quantum,
    /// (C): nested certainty collapses for classically described peers.
    Consistency,
    /// A jointly agreeable state exists.
    Agreement,
    /// Descriptions can be updated with every observed outcome.
    Objectivity,
    /// The Hayden–Preskill / horizon assumptions.
    BlackHole,
}

impl Assumption {
    pub fn key(self) -> &'static str {
        match self {
            Assumption::Quantum => "quantum",
            Assumption::Consistency => "consistency",
            Assumption::Agreement => "agreement",
            Assumption::Objectivity => "objectivity",
            Assumption::BlackHole => "black_hole",
        }
    }
}

/// Assumption toggles; every assumption not listed counts as enabled.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Toggles {
    disabled: Vec<Assumption>,
}

impl Toggles {
    pub fn all() -> Self {
        Toggles::default()
    }

    pub fn without(mut self, a: Assumption) -> Self {
        if !self.disabled.contains(&a) {
            self.disabled.push(a);
        }
        self
    }

    pub fn enabled(&self, a: Assumption) -> bool {
        !self.disabled.contains(&a)
    }

    fn echo(&self, t: TheoremId) -> BTreeMap<String, bool> {
        t.required().iter().map(|a| (a.key().to_string(), self.enabled(*a))).collect()
    }

    fn full(&self, t: TheoremId) -> bool {
        t.required().iter().all(|a| self.enabled(*a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremVerdict {
    ContradictionReproduced,
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Evidence {
    Flag(bool),
    Number(f64),
    Series(Vec<f64>),
    Text(String),
}

impl From<f64> for Evidence {
    fn from(v: f64) -> Self {
        Evidence::Number(v)
    }
}

impl From<bool> for Evidence {
    fn from(v: bool) -> Self {
        Evidence::Flag(v)
    }
}

impl From<Vec<f64>> for Evidence {
    fn from(v: Vec<f64>) -> Self {
        Evidence::Series(v)
    }
}

impl From<&str> for Evidence {
    fn from(v: &str) -> Self {
        Evidence::Text(v.to_string())
    }
}

impl From<String> for Evidence {
    fn from(v: String) -> Self {
        Evidence::Text(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFeasibility {
    pub name: String,
    pub report: FeasibilityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub title: String,
    pub assumptions: BTreeMap<String, bool>,
    pub verdict: TheoremVerdict,
    pub evidence: BTreeMap<String, Evidence>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub feasibility: Vec<NamedFeasibility>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entropy: Option<EntropyReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub game: Option<GameReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl TheoremReport {
    /// A report whose verdict is `CONTRADICTION_REPRODUCED` exactly when all
    /// required assumptions are on and `contradiction` holds.
    pub fn new(theorem: TheoremId, toggles: &Toggles, contradiction: bool) -> Self {
        let verdict = if toggles.full(theorem) && contradiction {
            TheoremVerdict::ContradictionReproduced
        } else {
            TheoremVerdict::Consistent
        };
        TheoremReport {
            theorem,
            title: theorem.title().to_string(),
            assumptions: toggles.echo(theorem),
            verdict,
            evidence: BTreeMap::new(),
            feasibility: Vec::new(),
            entropy: None,
            game: None,
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Evidence>) {
        self.evidence.insert(key.to_string(), v.into());
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.evidence.get(key) {
            Some(Evidence::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn feasibility(&self, name: &str) -> Option<&FeasibilityReport> {
        self.feasibility.iter().find(|f| f.name == name).map(|f| &f.report)
    }

    pub fn add_feasibility(&mut self, name: &str, report: FeasibilityReport) {
        self.feasibility.push(NamedFeasibility { name: name.to_string(), report });
    }
}
