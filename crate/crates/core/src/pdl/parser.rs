use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::lexer::{lex, Spanned, Tok};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}, column {}: expected ", self.line, self.col)?;
        if self.expected.len() == 1 {
            write!(f, "{}", self.expected[0])?;
        } else {
            write!(f, "one of {}", self.expected.join(", "))?;
        }
        write!(f, "; found {}", self.found)
    }
}

pub const VERBS: [&str; 8] = ["prepare", "send", "isolate", "measure", "reverse", "postselect", "predict", "infer"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = core::result::Result<T, ParseError>;

fn quoted(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| format!("`{w}`")).collect()
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<String>) -> PResult<T> {
        let t = self.peek();
        Err(ParseError { line: t.line, col: t.col, expected, found: t.tok.describe() })
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match &self.peek().tok {
            Tok::Name(n) if n == kw => {
                self.bump();
                Ok(())
            }
            _ => self.fail(quoted(&[kw])),
        }
    }

    fn punct(&mut self, want: Tok) -> PResult<()> {
        if self.peek().tok == want {
            self.bump();
            Ok(())
        } else {
            self.fail(vec![want.describe()])
        }
    }

    fn name(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Name(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => self.fail(vec!["name".to_string()]),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match self.peek().tok {
            Tok::Int(v) => {
                self.bump();
                Ok(v as usize)
            }
            _ => self.fail(vec!["integer".to_string()]),
        }
    }

    fn outcome(&mut self) -> PResult<OutcomeLit> {
        match self.peek().tok {
            Tok::Int(v) => {
                self.bump();
                Ok(OutcomeLit { value: v as usize, bar: false })
            }
            Tok::Bar(v) => {
                self.bump();
                Ok(OutcomeLit { value: v as usize, bar: true })
            }
            _ => self.fail(vec!["outcome".to_string()]),
        }
    }

    fn end_of_line(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.fail(vec!["end of line".to_string()]),
        }
    }

    fn file(&mut self) -> PResult<ProtocolAst> {
        let mut ast = ProtocolAst::default();
        loop {
            match &self.peek().tok {
                Tok::Newline => {
                    self.bump();
                }
                Tok::Eof => return Ok(ast),
                Tok::Name(n) if n == "system" => {
                    self.bump();
                    let name = self.name()?;
                    self.punct(Tok::Colon)?;
                    let dim = match &self.peek().tok {
                        Tok::Name(k) if k == "qubit" => {
                            self.bump();
                            2
                        }
                        Tok::Name(k) if k == "dim" => {
                            self.bump();
                            let at = self.peek().clone();
                            let d = self.int()?;
                            if d < 2 {
                                return Err(ParseError {
                                    line: at.line,
                                    col: at.col,
                                    expected: vec!["dimension ≥ 2".to_string()],
                                    found: at.tok.describe(),
                                });
                            }
                            d
                        }
                        _ => return self.fail(quoted(&["qubit", "dim"])),
                    };
                    self.end_of_line()?;
                    ast.systems.push(SystemDecl { name, dim });
                }
                Tok::Name(n) if n == "physicist" => {
                    self.bump();
                    let name = self.name()?;
                    self.keyword("cut")?;
                    self.punct(Tok::LBrace)?;
                    let mut cut = vec![self.name()?];
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        cut.push(self.name()?);
                    }
                    self.punct(Tok::RBrace)?;
                    self.end_of_line()?;
                    ast.physicists.push(PhysicistDecl { name, cut });
                }
                Tok::Name(n) if n == "step" => {
                    self.bump();
                    let at = self.peek().clone();
                    let number = self.int()?;
                    let want = ast.steps.len() + 1;
                    if number != want {
                        return Err(ParseError {
                            line: at.line,
                            col: at.col,
                            expected: vec![format!("step number {want}")],
                            found: at.tok.describe(),
                        });
                    }
                    self.punct(Tok::Colon)?;
                    let actor = self.name()?;
                    let verb = self.verb()?;
                    self.end_of_line()?;
                    ast.steps.push(Step { number, actor, verb });
                }
                _ => return self.fail(quoted(&["system", "physicist", "step"])),
            }
        }
    }

    fn verb(&mut self) -> PResult<Verb> {
        let v = match &self.peek().tok {
            Tok::Name(n) if VERBS.contains(&n.as_str()) => n.clone(),
            _ => return self.fail(quoted(&VERBS)),
        };
        self.bump();
        Ok(match v.as_str() {
            "prepare" => {
                let target = self.name()?;
                self.keyword("in")?;
                Verb::Prepare { target, ket: self.ket()? }
            }
            "send" => {
                let what = self.name()?;
                self.keyword("to")?;
                Verb::Send { what, to: self.name()? }
            }
            "isolate" => Verb::Isolate { name: self.name()? },
            "measure" => {
                let target = self.name()?;
                self.keyword("in")?;
                let basis = match &self.peek().tok {
                    Tok::Name(b) if b == "computational" => BasisName::Computational,
                    Tok::Name(b) if b == "diagonal" => BasisName::Diagonal,
                    _ => return self.fail(quoted(&["computational", "diagonal"])),
                };
                self.bump();
                self.keyword("into")?;
                Verb::Measure { target, basis, into: self.name()? }
            }
            "reverse" => {
                let mut targets = vec![self.name()?];
                while !matches!(&self.peek().tok, Tok::Name(n) if n == "to") {
                    match &self.peek().tok {
                        Tok::Name(_) => targets.push(self.name()?),
                        _ => return self.fail(vec!["name".to_string(), "`to`".to_string()]),
                    }
                }
                self.keyword("to")?;
                self.keyword("step")?;
                Verb::Reverse { targets, step: self.int()? }
            }
            "postselect" => {
                let register = self.name()?;
                self.punct(Tok::Eq)?;
                Verb::Postselect { register, outcome: self.outcome()? }
            }
            "predict" => {
                self.punct(Tok::LParen)?;
                let p = self.outcome()?;
                self.punct(Tok::Comma)?;
                let p_bar = self.outcome()?;
                self.punct(Tok::RParen)?;
                Verb::Predict { p, p_bar }
            }
            _ => {
                let mut names = vec![self.name()?];
                while let Tok::Name(_) = &self.peek().tok {
                    names.push(self.name()?);
                }
                Verb::Infer { names }
            }
        })
    }

    fn ket(&mut self) -> PResult<KetExpr> {
        let k = match &self.peek().tok {
            Tok::Ket(k) if k == "0" => KetExpr::Zero,
            Tok::Ket(k) if k == "1" => KetExpr::One,
            Tok::Ket(k) if k == "+" => KetExpr::Plus,
            Tok::Name(n) if n == "hardy" => {
                self.bump();
                self.punct(Tok::LParen)?;
                let a = self.name()?;
                self.punct(Tok::Comma)?;
                let b = self.name()?;
                self.punct(Tok::RParen)?;
                return Ok(KetExpr::Hardy(a, b));
            }
            _ => return self.fail(quoted(&["|0>", "|1>", "|+>", "hardy("])),
        };
        self.bump();
        Ok(k)
    }
}

pub fn parse(source: &str) -> Result<ProtocolAst, ParseError> {
    Parser { toks: lex(source), pos: 0 }.file()
}
