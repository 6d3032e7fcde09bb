//! Protocol description language (`.wfp`): a line-oriented text format for
//! multi-physicist protocols, its parser, printer, validator and compiler
//! onto the protocol executor.

mod ast;
mod check;
mod lexer;
mod parser;
mod print;

pub use ast::{BasisName, KetExpr, OutcomeLit, PhysicistDecl, ProtocolAst, Step, SystemDecl, Verb};
pub use check::{validate, Diagnostic, DiagnosticKind};
pub use parser::{parse, ParseError, VERBS};
pub use print::pretty_print;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::C64;
use crate::math::sqrt;
use crate::protocols::{Executor, PhysicistSpec, ProtocolTrace};
use crate::qcore::gates::{controlled_copy, hadamard, preparation_unitary};
use crate::qcore::SystemLabel;

/// Bundled transcriptions of the three protocols.
pub mod corpus {
    pub const WIGNER: &str = include_str!("../../corpus/wigner.wfp");
    pub const DEUTSCH: &str = include_str!("../../corpus/deutsch.wfp");
    pub const FR: &str = include_str!("../../corpus/fr.wfp");

    /// `(file name, source)` of every bundled protocol.
    pub const ALL: [(&str, &str); 3] = [("wigner.wfp", WIGNER), ("deutsch.wfp", DEUTSCH), ("fr.wfp", FR)];
}

#[derive(Clone, Debug, PartialEq)]
pub enum PdlError {
    Parse(ParseError),
    Invalid(Vec<Diagnostic>),
    Runtime { step: usize, message: String },
}

impl PdlError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            PdlError::Parse(_) => 2,
            PdlError::Invalid(_) => 1,
            PdlError::Runtime { .. } => 3,
        }
    }
}

impl core::fmt::Display for PdlError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PdlError::Parse(e) => write!(f, "parse error: {e}"),
            PdlError::Invalid(d) => {
                write!(f, "{} diagnostic(s)", d.len())?;
                for x in d {
                    write!(f, "\n  {x}")?;
                }
                Ok(())
            }
            PdlError::Runtime { step, message } => write!(f, "step {step}: {message}"),
        }
    }
}

impl From<ParseError> for PdlError {
    fn from(e: ParseError) -> Self {
        PdlError::Parse(e)
    }
}

fn ket_amplitudes(k: &KetExpr, d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    match k {
        KetExpr::Zero => v[0] = C64::new(1.0, 0.0),
        KetExpr::One => v[1] = C64::new(1.0, 0.0),
        KetExpr::Plus => {
            let a = 1.0 / sqrt(d as f64);
            v.iter_mut().for_each(|z| *z = C64::new(a, 0.0));
        }
        KetExpr::Hardy(..) => {
            let t = C64::new(1.0 / sqrt(3.0), 0.0);
            v = vec![t, t, t, C64::new(0.0, 0.0)];
        }
    }
    v
}

pub fn compile_and_run(ast: &ProtocolAst) -> Result<ProtocolTrace, PdlError> {
    compile_and_run_named(ast, "pdl")
}

pub fn compile_and_run_named(ast: &ProtocolAst, name: &str) -> Result<ProtocolTrace, PdlError> {
    let diags = validate(ast);
    if !diags.is_empty() {
        return Err(PdlError::Invalid(diags));
    }
    let systems: Vec<SystemLabel> = ast.systems.iter().map(|s| SystemLabel { name: s.name.clone(), dim: s.dim }).collect();
    let physicists = ast
        .physicists
        .iter()
        .map(|p| PhysicistSpec { name: p.name.clone(), cut: p.cut.clone(), records: Vec::new() })
        .collect();
    let at = |step: usize| move |e: crate::error::Error| PdlError::Runtime { step, message: e.to_string() };
    let mut ex = Executor::new(systems, physicists).map_err(at(0))?;
    for step in &ast.steps {
        let n = step.number;
        let dim = |s: &str| ast.system(s).map_or(2, |d| d.dim);
        match &step.verb {
            Verb::Prepare { target, ket } => {
                let targets: Vec<&str> = match ket {
                    KetExpr::Hardy(a, b) => vec![a.as_str(), b.as_str()],
                    _ => vec![target.as_str()],
                };
                let d: usize = targets.iter().map(|t| dim(t)).product();
                ex.apply(&preparation_unitary(&ket_amplitudes(ket, d)), &targets).map_err(at(n))?;
            }
            Verb::Measure { target, basis, into } => {
                let cc = controlled_copy(dim(target));
                match basis {
                    BasisName::Computational => ex.apply(&cc, &[target, into]).map_err(at(n))?,
                    BasisName::Diagonal => {
                        let h = hadamard();
                        ex.apply(&h, &[target]).map_err(at(n))?;
                        ex.apply(&cc, &[target, into]).map_err(at(n))?;
                        ex.apply(&h, &[target]).map_err(at(n))?;
                    }
                }
                ex.record(&step.actor, into).map_err(at(n))?;
            }
            Verb::Reverse { targets, step: to } => {
                let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
                let undone = ex.reverse(&t, *to).map_err(at(n))?;
                if undone == 0 {
                    return Err(PdlError::Runtime { step: n, message: format!("nothing to reverse on {} since step {to}", targets.join(" ")) });
                }
            }
            Verb::Postselect { register, outcome } => {
                ex.postselect(register, outcome.value).map_err(at(n))?;
            }
            Verb::Send { .. } | Verb::Isolate { .. } | Verb::Predict { .. } | Verb::Infer { .. } => {}
        }
        ex.finish_step(&step.actor, &print::describe_step(step)).map_err(at(n))?;
    }
    Ok(ex.into_trace(name))
}

/// Parse, validate and run in one go.
pub fn run_source(source: &str, name: &str) -> Result<ProtocolTrace, PdlError> {
    let ast = parse(source)?;
    compile_and_run_named(&ast, name)
}
