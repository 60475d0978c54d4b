//! Recursive-descent reader for polynomial strings such as `1 - 3/2*n1*z^2`.
//!
//! Grammar:
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := power ('*' power)*
//! power   := atom ('^' integer)?
//! atom    := integer ('/' integer)? | identifier | '(' sum ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{GradedPoly, Rational, VarTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = lx.src[start..i].parse().expect("digits");
                lx.toks.push((start, Tok::Int(n)));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((start, Tok::Ident(lx.src[start..i].to_string())));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((i, Tok::Sym(c)));
                i += 1;
            } else {
                return Err(Error::Parse { offset: i, message: format!("unexpected character `{c}`") });
            }
        }
        lx.toks.push((src.len(), Tok::End));
        Ok(lx.toks)
    }
}

struct Parser<'t> {
    table: &'t Arc<VarTable>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

pub(super) fn parse(table: &Arc<VarTable>, input: &str) -> Result<GradedPoly> {
    let toks = Lexer::run(input)?;
    if toks.len() == 1 {
        return Err(Error::Parse { offset: 0, message: "empty polynomial".into() });
    }
    let mut p = Parser { table, toks, pos: 0 };
    let value = p.sum()?;
    match p.peek() {
        Tok::End => Ok(value),
        t => Err(p.error(format!("unexpected {}", describe(t)))),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> Error {
        Error::Parse { offset: self.offset(), message }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<GradedPoly> {
        let mut acc = GradedPoly::zero(self.table);
        let mut first = true;
        loop {
            let negative = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                return Ok(acc);
            };
            first = false;
            let term = self.product()?;
            acc = if negative { &acc - &term } else { &acc + &term };
        }
    }

    fn product(&mut self) -> Result<GradedPoly> {
        let mut acc = self.power()?;
        while self.eat('*') {
            let rhs = self.power()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<GradedPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.offset();
            match self.bump() {
                Tok::Int(n) => {
                    let k: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse { offset: at, message: "exponent too large".into() })?;
                    Ok(base.pow(k))
                }
                t => Err(Error::Parse { offset: at, message: format!("expected exponent, found {}", describe(&t)) }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<GradedPoly> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let mut value = Rational::from_integer(n);
                if self.eat('/') {
                    let den_at = self.offset();
                    match self.bump() {
                        Tok::Int(d) if !d.is_zero() => value /= Rational::from_integer(d),
                        Tok::Int(_) => {
                            return Err(Error::Parse { offset: den_at, message: "division by zero".into() })
                        }
                        t => {
                            return Err(Error::Parse {
                                offset: den_at,
                                message: format!("expected denominator, found {}", describe(&t)),
                            })
                        }
                    }
                }
                Ok(GradedPoly::constant(self.table, value))
            }
            Tok::Ident(name) => match self.table.index_of(&name) {
                Some(v) => Ok(GradedPoly::var(self.table, v)),
                None => Err(Error::Parse { offset: at, message: format!("unknown variable `{name}`") }),
            },
            Tok::Sym('(') => {
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`".into()));
                }
                Ok(inner)
            }
            t => Err(Error::Parse { offset: at, message: format!("expected a term, found {}", describe(&t)) }),
        }
    }
}
