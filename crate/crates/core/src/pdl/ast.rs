use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDecl {
    pub name: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhysicistDecl {
    pub name: String,
    pub cut: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Computational,
    Diagonal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KetExpr {
    Zero,
    One,
    Plus,
    Hardy(String, String),
}

/// `0`, `1`, `0bar`, `1bar`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeLit {
    pub value: usize,
    pub bar: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    Prepare { target: String, ket: KetExpr },
    Send { what: String, to: String },
    Isolate { name: String },
    Measure { target: String, basis: BasisName, into: String },
    Reverse { targets: Vec<String>, step: usize },
    Postselect { register: String, outcome: OutcomeLit },
    Predict { p: OutcomeLit, p_bar: OutcomeLit },
    /// A reasoning marker: the actor describes the named systems.
    Infer { names: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub number: usize,
    pub actor: String,
    pub verb: Verb,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolAst {
    pub systems: Vec<SystemDecl>,
    pub physicists: Vec<PhysicistDecl>,
    pub steps: Vec<Step>,
}

impl ProtocolAst {
    pub fn system(&self, name: &str) -> Option<&SystemDecl> {
        self.systems.iter().find(|s| s.name == name)
    }

    pub fn physicist(&self, name: &str) -> Option<&PhysicistDecl> {
        self.physicists.iter().find(|p| p.name == name)
    }

    /// Prediction clauses in step order.
    pub fn predictions(&self) -> Vec<(OutcomeLit, OutcomeLit)> {
        self.steps
            .iter()
            .filter_map(|s| match s.verb {
                Verb::Predict { p, p_bar } => Some((p, p_bar)),
                _ => None,
            })
            .collect()
    }
}
