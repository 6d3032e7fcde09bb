use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Int(u64),
    /// `0bar`, `1bar`, …
    Bar(u64),
    Ket(String),
    Colon,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Newline,
    Eof,
    Bad(char),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Bar(i) => format!("`{i}bar`"),
            Tok::Ket(k) => format!("`|{k}>`"),
            Tok::Colon => "`:`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Eq => "`=`".to_string(),
            Tok::Newline => "end of line".to_string(),
            Tok::Eof => "end of input".to_string(),
            Tok::Bad(c) => format!("`{c}`"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(src: &str) -> Vec<Spanned> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = col;
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, col: start });
        match c {
            '\n' => {
                push(&mut out, Tok::Newline);
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            ':' => push(&mut out, Tok::Colon),
            ',' => push(&mut out, Tok::Comma),
            '{' => push(&mut out, Tok::LBrace),
            '}' => push(&mut out, Tok::RBrace),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '=' => push(&mut out, Tok::Eq),
            '|' => {
                let body: String = chars[i + 1..].iter().take_while(|c| **c != '>' && **c != '\n').collect();
                let closed = chars.get(i + 1 + body.chars().count()) == Some(&'>');
                if closed && matches!(body.as_str(), "0" | "1" | "+") {
                    let n = body.chars().count() + 2;
                    push(&mut out, Tok::Ket(body));
                    i += n;
                    col += n;
                    continue;
                }
                push(&mut out, Tok::Bad('|'));
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let v = digits.parse::<u64>().unwrap_or(u64::MAX);
                let tail: String = chars[j..].iter().take_while(|c| name_char(**c)).collect();
                let tok = if tail == "bar" {
                    j += 3;
                    Tok::Bar(v)
                } else {
                    Tok::Int(v)
                };
                push(&mut out, tok);
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && name_char(chars[j]) {
                    j += 1;
                }
                push(&mut out, Tok::Name(chars[i..j].iter().collect()));
                col += j - i;
                i = j;
                continue;
            }
            other => push(&mut out, Tok::Bad(other)),
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    out
}
