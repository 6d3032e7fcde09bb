use alloc::format;
use alloc::string::String;
use core::fmt::{self, Display, Formatter, Write};

use super::ast::*;

impl Display for OutcomeLit {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.bar {
            write!(f, "{}bar", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl Display for KetExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            KetExpr::Zero => f.write_str("|0>"),
            KetExpr::One => f.write_str("|1>"),
            KetExpr::Plus => f.write_str("|+>"),
            KetExpr::Hardy(a, b) => write!(f, "hardy({a}, {b})"),
        }
    }
}

impl Display for Verb {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Verb::Prepare { target, ket } => write!(f, "prepare {target} in {ket}"),
            Verb::Send { what, to } => write!(f, "send {what} to {to}"),
            Verb::Isolate { name } => write!(f, "isolate {name}"),
            Verb::Measure { target, basis, into } => {
                let b = match basis {
                    BasisName::Computational => "computational",
                    BasisName::Diagonal => "diagonal",
                };
                write!(f, "measure {target} in {b} into {into}")
            }
            Verb::Reverse { targets, step } => write!(f, "reverse {} to step {step}", targets.join(" ")),
            Verb::Postselect { register, outcome } => write!(f, "postselect {register} = {outcome}"),
            Verb::Predict { p, p_bar } => write!(f, "predict ({p}, {p_bar})"),
            Verb::Infer { names } => write!(f, "infer {}", names.join(" ")),
        }
    }
}

impl Display for ProtocolAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in &self.systems {
            if s.dim == 2 {
                writeln!(f, "system {} : qubit", s.name)?;
            } else {
                writeln!(f, "system {} : dim {}", s.name, s.dim)?;
            }
        }
        for p in &self.physicists {
            writeln!(f, "physicist {} cut {{{}}}", p.name, p.cut.join(", "))?;
        }
        for s in &self.steps {
            writeln!(f, "step {}: {} {}", s.number, s.actor, s.verb)?;
        }
        Ok(())
    }
}

/// Canonical source text; reparses to an equal AST.
pub fn pretty_print(ast: &ProtocolAst) -> String {
    let mut s = String::new();
    let _ = write!(s, "{ast}");
    s
}

pub(crate) fn describe_step(s: &Step) -> String {
    format!("{}", s.verb)
}
