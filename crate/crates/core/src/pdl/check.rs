use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    DuplicateDeclaration,
    UndeclaredLabel,
    SelfDescription,
    ReversalOutsideCut,
    NonUnitaryReversal,
    BadStepReference,
    OutcomeMismatch,
    DimensionMismatch,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::DuplicateDeclaration => "duplicate declaration",
            DiagnosticKind::UndeclaredLabel => "undeclared label",
            DiagnosticKind::SelfDescription => "self-description",
            DiagnosticKind::ReversalOutsideCut => "reversal outside cut",
            DiagnosticKind::NonUnitaryReversal => "non-unitary operation in reversal window",
            DiagnosticKind::BadStepReference => "bad step reference",
            DiagnosticKind::OutcomeMismatch => "outcome mismatch",
            DiagnosticKind::DimensionMismatch => "dimension mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub step: Option<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl core::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.step {
            Some(s) => write!(f, "step {s}: {}: {}", self.kind.as_str(), self.message),
            None => write!(f, "{}: {}", self.kind.as_str(), self.message),
        }
    }
}

struct Checker<'a> {
    ast: &'a ProtocolAst,
    out: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn push(&mut self, step: Option<usize>, kind: DiagnosticKind, message: String) {
        self.out.push(Diagnostic { step, kind, message });
    }

    fn system(&mut self, step: usize, name: &str) -> Option<usize> {
        match self.ast.system(name) {
            Some(s) => Some(s.dim),
            None => {
                self.push(Some(step), DiagnosticKind::UndeclaredLabel, format!("system `{name}` is not declared"));
                None
            }
        }
    }

    fn declarations(&mut self) {
        let mut seen: Vec<&str> = Vec::new();
        for n in self.ast.systems.iter().map(|s| s.name.as_str()).chain(self.ast.physicists.iter().map(|p| p.name.as_str())) {
            if seen.contains(&n) {
                self.push(None, DiagnosticKind::DuplicateDeclaration, format!("`{n}` declared twice"));
            }
            seen.push(n);
        }
        for p in &self.ast.physicists {
            for c in &p.cut {
                if self.ast.system(c).is_none() {
                    self.push(None, DiagnosticKind::UndeclaredLabel, format!("cut of {} names undeclared `{c}`", p.name));
                }
            }
        }
    }

    fn steps(&mut self) {
        // register -> (writer, step, basis)
        let mut written: BTreeMap<String, (String, usize, BasisName)> = BTreeMap::new();
        let mut isolated: Vec<String> = Vec::new();
        for step in &self.ast.steps {
            let n = step.number;
            let Some(actor) = self.ast.physicist(&step.actor) else {
                self.push(Some(n), DiagnosticKind::UndeclaredLabel, format!("physicist `{}` is not declared", step.actor));
                continue;
            };
            match &step.verb {
                Verb::Prepare { target, ket } => {
                    self.system(n, target);
                    if let KetExpr::Hardy(a, b) = ket {
                        let da = self.system(n, a);
                        let db = self.system(n, b);
                        if a == b || (target != a && target != b) {
                            self.push(Some(n), DiagnosticKind::UndeclaredLabel, format!("hardy({a}, {b}) must name `{target}` and a second system"));
                        }
                        if da.is_some_and(|d| d != 2) || db.is_some_and(|d| d != 2) {
                            self.push(Some(n), DiagnosticKind::DimensionMismatch, "hardy needs two qubits".to_string());
                        }
                    }
                }
                Verb::Send { what, to } => {
                    self.system(n, what);
                    if self.ast.physicist(to).is_none() {
                        self.push(Some(n), DiagnosticKind::UndeclaredLabel, format!("physicist `{to}` is not declared"));
                    }
                }
                Verb::Isolate { name } => {
                    if self.ast.system(name).is_none() && self.ast.physicist(name).is_none() {
                        self.push(Some(n), DiagnosticKind::UndeclaredLabel, format!("`{name}` is not declared"));
                    }
                    isolated.push(name.clone());
                }
                Verb::Measure { target, basis, into } => {
                    let dt = self.system(n, target);
                    let dr = self.system(n, into);
                    if target == into {
                        self.push(Some(n), DiagnosticKind::DimensionMismatch, format!("`{target}` measured into itself"));
                    }
                    if let (Some(a), Some(b)) = (dt, dr) {
                        if a != b {
                            self.push(Some(n), DiagnosticKind::DimensionMismatch, format!("`{target}` (dim {a}) into `{into}` (dim {b})"));
                        }
                        if *basis == BasisName::Diagonal && a != 2 {
                            self.push(Some(n), DiagnosticKind::DimensionMismatch, format!("diagonal basis needs a qubit, `{target}` has dim {a}"));
                        }
                    }
                    if actor.cut.iter().any(|c| c == into) {
                        self.push(
                            Some(n),
                            DiagnosticKind::SelfDescription,
                            format!("{} records into `{into}`, which lies inside their own cut", actor.name),
                        );
                    }
                    written.insert(into.clone(), (actor.name.clone(), n, *basis));
                }
                Verb::Reverse { targets, step: to } => {
                    for t in targets {
                        self.system(n, t);
                    }
                    if *to == 0 || *to >= n {
                        self.push(Some(n), DiagnosticKind::BadStepReference, format!("cannot reverse to step {to} from step {n}"));
                    }
                    for t in targets {
                        let in_cut = actor.cut.iter().any(|c| c == t);
                        let lab_isolated = isolated.iter().any(|i| {
                            i == t || written.get(t).is_some_and(|(w, _, _)| w == i)
                        });
                        if !in_cut && !lab_isolated {
                            self.push(
                                Some(n),
                                DiagnosticKind::ReversalOutsideCut,
                                format!("{} reverses `{t}`, which is neither in their cut nor isolated", actor.name),
                            );
                        }
                    }
                    for s in self.ast.steps.iter().filter(|s| s.number >= *to && s.number < n) {
                        if let Verb::Postselect { register, .. } = &s.verb {
                            if targets.contains(register) {
                                self.push(
                                    Some(n),
                                    DiagnosticKind::NonUnitaryReversal,
                                    format!("step {} post-selects `{register}` inside the reversed window", s.number),
                                );
                            }
                        }
                    }
                }
                Verb::Postselect { register, outcome } => {
                    let d = self.system(n, register);
                    match written.get(register) {
                        None => self.push(Some(n), DiagnosticKind::OutcomeMismatch, format!("`{register}` holds no measurement record")),
                        Some((_, _, basis)) => {
                            let want_bar = *basis == BasisName::Diagonal;
                            if outcome.bar != want_bar {
                                self.push(
                                    Some(n),
                                    DiagnosticKind::OutcomeMismatch,
                                    format!("`{register}` records a {} outcome, got `{outcome}`", if want_bar { "diagonal" } else { "computational" }),
                                );
                            }
                        }
                    }
                    if d.is_some_and(|d| outcome.value >= d) {
                        self.push(Some(n), DiagnosticKind::OutcomeMismatch, format!("outcome {} out of range", outcome.value));
                    }
                }
                Verb::Predict { p, p_bar } => {
                    if p.bar || !p_bar.bar || p.value > 1 || p_bar.value > 1 {
                        self.push(Some(n), DiagnosticKind::OutcomeMismatch, format!("predictions must read (bit, bitbar), got ({p}, {p_bar})"));
                    }
                }
                Verb::Infer { names } => {
                    for x in names {
                        self.system(n, x);
                    }
                }
            }
        }
    }
}

/// All diagnostics, in source order; empty iff the protocol can run.
pub fn validate(ast: &ProtocolAst) -> Vec<Diagnostic> {
    let mut c = Checker { ast, out: Vec::new() };
    c.declarations();
    c.steps();
    c.out
}
