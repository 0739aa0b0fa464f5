//! Text syntax for scalars and forms.
//!
//! ```text
//! expr  := [+|-] term ((+|-) term)*
//! term  := wedge ((*|/) wedge)*
//! wedge := atom (^ atom)*
//! atom  := integer | name | ( expr )
//! ```
//!
//! `i` is the imaginary unit; other names are generators or parameters.
//! Everything evaluates to a form; a scalar is a form of degree zero.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exterior::{Form, MonomialIndex, Side};
use crate::poly::{Poly, SymForm};
use crate::scalar::GaussianRational as Q;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub text: String,
    pub line: usize,
}

pub fn tokenize(src: &str, line: usize) -> Result<Vec<Token>, Error> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Num(text.parse().expect("digits"))
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(Error::parse(line, c.to_string(), "unexpected character")),
            }
        };
        out.push(Token { tok, text: chars[start..i].iter().collect(), line });
    }
    Ok(out)
}

/// Names an expression may refer to.
#[derive(Clone, Debug, Default)]
pub struct NameContext {
    pub n: usize,
    pub holo: Vec<String>,
    pub anti: Vec<String>,
    pub params: Vec<String>,
}

impl NameContext {
    fn lookup(&self, name: &str) -> Option<SymForm> {
        let n = self.n;
        if name == "i" {
            return Some(SymForm::scalar(n, Poly::constant(Q::i())));
        }
        if let Some(j) = self.holo.iter().position(|h| h == name) {
            return Some(SymForm::monomial(
                n,
                MonomialIndex::generator(Side::Holo, j),
                Poly::constant(Q::from_integer(1)),
            ));
        }
        if let Some(j) = self.anti.iter().position(|h| h == name) {
            return Some(SymForm::monomial(
                n,
                MonomialIndex::generator(Side::Anti, j),
                Poly::constant(Q::from_integer(1)),
            ));
        }
        if self.params.iter().any(|p| p == name) {
            return Some(SymForm::scalar(n, Poly::var(name)));
        }
        None
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ctx: &'a NameContext,
    end_line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn error_here(&self, message: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some(t) => Error::parse(t.line, t.text.clone(), message),
            None => Error::parse(self.end_line, "<end of expression>", message),
        }
    }

    fn expr(&mut self) -> Result<SymForm, Error> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SymForm, Error> {
        let mut acc = self.wedge()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.wedge()?;
                    if acc.as_scalar().is_none() && rhs.as_scalar().is_none() {
                        self.pos = at;
                        return Err(self.error_here("`*` needs a scalar on one side; use `^` to wedge forms"));
                    }
                    acc = acc.wedge(&rhs);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.wedge()?;
                    let divisor = rhs.as_scalar().and_then(|p| p.as_constant()).and_then(|c| c.inv());
                    match divisor {
                        Some(inv) => acc = acc.scale(&inv),
                        None => {
                            self.pos = at;
                            return Err(self.error_here("divisor must be a nonzero constant scalar"));
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn wedge(&mut self) -> Result<SymForm, Error> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            acc = acc.wedge(&self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<SymForm, Error> {
        let Some(t) = self.tokens.get(self.pos) else {
            return Err(self.error_here("expected a number, a name or `(`"));
        };
        match &t.tok {
            Tok::Num(v) => {
                self.pos += 1;
                let c = Q::from(BigRational::from_integer(v.clone()));
                Ok(SymForm::scalar(self.ctx.n, Poly::constant(c)))
            }
            Tok::Ident(name) => {
                let f = self.ctx.lookup(name).ok_or_else(|| self.error_here("unknown name"))?;
                self.pos += 1;
                Ok(f)
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error_here("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error_here("expected a number, a name or `(`")),
        }
    }
}

/// Parses a whole token stream as one expression.
pub fn parse_tokens(tokens: &[Token], ctx: &NameContext, end_line: usize) -> Result<SymForm, Error> {
    let mut p = Parser { tokens, pos: 0, ctx, end_line };
    let f = p.expr()?;
    if p.pos != tokens.len() {
        return Err(p.error_here("unexpected token"));
    }
    Ok(f)
}

pub fn parse_sym_form(src: &str, ctx: &NameContext) -> Result<SymForm, Error> {
    parse_tokens(&tokenize(src, 1)?, ctx, 1)
}

/// Parses a parameter-free form.
pub fn parse_form(src: &str, ctx: &NameContext) -> Result<Form, Error> {
    let f = parse_sym_form(src, ctx)?;
    f.as_form().ok_or_else(|| Error::parse(1, src.trim(), "form must not contain parameters"))
}

pub fn parse_scalar(src: &str) -> Result<Q, Error> {
    let f = parse_sym_form(src, &NameContext::default())?;
    f.as_scalar().and_then(|p| p.as_constant()).ok_or_else(|| Error::parse(1, src.trim(), "not a scalar literal"))
}

/// `xi1..xin` and `eta1..etan`.
pub fn default_names(n: usize) -> (Vec<String>, Vec<String>) {
    ((1..=n).map(|j| format!("xi{j}")).collect(), (1..=n).map(|j| format!("eta{j}")).collect())
}

fn monomial_text(m: MonomialIndex, holo: &[String], anti: &[String]) -> String {
    m.generators()
        .into_iter()
        .map(|(side, j)| match side {
            Side::Holo => holo[j].as_str(),
            Side::Anti => anti[j].as_str(),
        })
        .collect::<Vec<_>>()
        .join("^")
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, t) in terms.into_iter().enumerate() {
        if k == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

fn term_text(coef: &str, unit: Option<bool>, parens: bool, mono: String) -> String {
    if mono.is_empty() {
        return if parens && coef.contains(['+', ' ']) { format!("({coef})") } else { coef.to_string() };
    }
    match unit {
        Some(true) => mono,
        Some(false) => format!("-{mono}"),
        None if parens => format!("({coef}) * {mono}"),
        None => format!("{coef} * {mono}"),
    }
}

/// Canonical text of a form, e.g. `(-1/2*i) * xi1^eta1 + xi2^eta2`.
pub fn format_form(f: &Form, holo: &[String], anti: &[String]) -> String {
    let terms = f
        .terms()
        .iter()
        .map(|(&m, c)| {
            let unit = if *c == Q::from_integer(1) {
                Some(true)
            } else if *c == Q::from_integer(-1) {
                Some(false)
            } else {
                None
            };
            term_text(&c.to_string(), unit, !c.is_real(), monomial_text(m, holo, anti))
        })
        .collect();
    join_terms(terms)
}

pub fn format_sym_form(f: &SymForm, holo: &[String], anti: &[String]) -> String {
    let terms = f
        .terms()
        .iter()
        .map(|(&m, p)| {
            let unit = match p.as_constant() {
                Some(c) if c == Q::from_integer(1) => Some(true),
                Some(c) if c == Q::from_integer(-1) => Some(false),
                _ => None,
            };
            term_text(&p.to_string(), unit, p.needs_parens(), monomial_text(m, holo, anti))
        })
        .collect();
    join_terms(terms)
}
