//! Text syntax for Gram matrices.
//!
//! ```text
//! expr  := term ('+' term)*
//! term  := 'H' | 'Hodd(' int ')' | 'I(' int ',' ('1'|'-1') ')' | 'diag(' entry (',' entry)* ')'
//! entry := ['-'] unit ['*' power] | ['-'] power
//! unit  := int | 's' | int '/' int
//! power := 'pi0' ['^' int] | '(-pi0)' ['^' int]
//! ```
//!
//! `s` is the smallest quadratic non-residue mod `p`; `+` is the orthogonal sum.

use num::bigint::BigInt;
use num::traits::One;

use super::{hyperbolic, h_plane, diag, unimodular, Gram, LatticeError};
use crate::local_ring::{pow_q, q_int, RingConfig, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, LatticeError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = cs[st..i].iter().collect();
            let v = text.parse().map_err(|_| LatticeError::Parse { token: text.clone(), message: "integer too large".into() })?;
            out.push(Tok::Int(v));
        } else if "(),+*^-/".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(LatticeError::Parse { token: c.to_string(), message: "unexpected character".into() });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    cfg: &'a RingConfig,
}

fn show(t: Option<&Tok>) -> String {
    match t {
        None => "<end>".into(),
        Some(Tok::Ident(s)) => s.clone(),
        Some(Tok::Int(v)) => v.to_string(),
        Some(Tok::Sym(c)) => c.to_string(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err<T>(&self, message: &str) -> Result<T, LatticeError> {
        Err(LatticeError::Parse { token: show(self.peek()), message: message.into() })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), LatticeError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(&format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<i64, LatticeError> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected an integer"),
        }
    }

    fn expr(&mut self) -> Result<Gram, LatticeError> {
        let mut parts = vec![self.term()?];
        while self.eat_sym('+') {
            parts.push(self.term()?);
        }
        if self.pos != self.toks.len() {
            return self.err("trailing input");
        }
        Ok(Gram::orth_sum_all(&parts, self.cfg.pi0_int()))
    }

    fn term(&mut self) -> Result<Gram, LatticeError> {
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.err("expected H, Hodd, I or diag"),
        };
        self.pos += 1;
        match name.as_str() {
            "H" => Ok(h_plane(self.cfg)),
            "Hodd" => {
                self.expect_sym('(')?;
                let e = self.int()?;
                if e.rem_euclid(2) != 1 {
                    self.pos -= 1;
                    return self.err("Hodd needs an odd exponent");
                }
                self.expect_sym(')')?;
                Ok(hyperbolic(self.cfg, e))
            }
            "I" => {
                self.expect_sym('(')?;
                let n = self.int()?;
                self.expect_sym(',')?;
                let e = self.int()?;
                self.expect_sym(')')?;
                if n < 0 || (e != 1 && e != -1) {
                    return Err(LatticeError::Parse { token: format!("I({n},{e})"), message: "bad parameters".into() });
                }
                unimodular(self.cfg, n as usize, e as i8)
            }
            "diag" => {
                self.expect_sym('(')?;
                let mut vals = vec![self.entry()?];
                while self.eat_sym(',') {
                    vals.push(self.entry()?);
                }
                self.expect_sym(')')?;
                Ok(diag(self.cfg, &vals))
            }
            _ => {
                self.pos -= 1;
                self.err("unknown block")
            }
        }
    }

    fn entry(&mut self) -> Result<Q, LatticeError> {
        let neg = self.eat_sym('-');
        let mut value = Q::one();
        let is_power_start = matches!(self.peek(), Some(Tok::Ident(s)) if s == "pi0")
            || (self.peek() == Some(&Tok::Sym('(')));
        if !is_power_start {
            value = self.unit()?;
            if self.eat_sym('*') {
                value *= self.power()?;
            }
        } else {
            value *= self.power()?;
        }
        if value == Q::from_integer(BigInt::from(0)) {
            return self.err("zero diagonal entry");
        }
        Ok(if neg { -value } else { value })
    }

    fn unit(&mut self) -> Result<Q, LatticeError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "s" => {
                self.pos += 1;
                Ok(q_int(self.cfg.nonresidue() as i64))
            }
            Some(Tok::Int(v)) => {
                self.pos += 1;
                if self.eat_sym('/') {
                    let d = self.int()?;
                    if d == 0 {
                        return self.err("zero denominator");
                    }
                    Ok(Q::new(v.into(), d.into()))
                } else {
                    Ok(q_int(v))
                }
            }
            _ => self.err("expected a unit (integer or s)"),
        }
    }

    fn power(&mut self) -> Result<Q, LatticeError> {
        let base = if self.eat_sym('(') {
            self.expect_sym('-')?;
            match self.peek() {
                Some(Tok::Ident(s)) if s == "pi0" => self.pos += 1,
                _ => return self.err("expected pi0"),
            }
            self.expect_sym(')')?;
            self.cfg.neg_pi0()
        } else {
            match self.peek() {
                Some(Tok::Ident(s)) if s == "pi0" => self.pos += 1,
                _ => return self.err("expected pi0"),
            }
            self.cfg.pi0()
        };
        let k = if self.eat_sym('^') { self.int()? } else { 1 };
        Ok(pow_q(&base, k))
    }
}

/// Parse the Gram DSL into a Gram matrix.
pub fn parse_gram(cfg: &RingConfig, text: &str) -> Result<Gram, LatticeError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(LatticeError::Parse { token: "<end>".into(), message: "empty input".into() });
    }
    let g = Parser { toks, pos: 0, cfg }.expr()?;
    Gram::new(g.m)
}
