// SPDX-License-Identifier: Apache-2.0

//! Text syntax for trace polynomials and matrix polynomials.
//!
//! ```text
//! 2.5 * tr(g1 g1* g1^-1) * tr(g2) - (0.5+1i) * tr(a1 g1^-1*) + 1
//! g1 + g1* + 0.5 * a1 g2^-1
//! ```
//!
//! Letters are `g<k>` (process `k ≥ 1`) with the suffixes `*`, `^-1`,
//! `^-1*`, and `a<j>` (deterministic matrix `j ≥ 1`) with optional `*`.
//! A `*` right after a letter is an adjoint; elsewhere it is a product.

use super::letter::{Letter, Variant};
use super::poly::TracePolynomial;
use super::word::TraceProduct;
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Star,
    Caret,
    Plus,
    Minus,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            })
        };
        match ch {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '*' => push(&mut out, Tok::Star),
            '^' => push(&mut out, Tok::Caret),
            '+' => push(&mut out, Tok::Plus),
            '-' => push(&mut out, Tok::Minus),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let x: f64 = s
                    .parse()
                    .map_err(|_| syntax(l0, c0, format!("malformed number {s:?}")))?;
                let imaginary = i < chars.len()
                    && chars[i] == 'i'
                    && !chars
                        .get(i + 1)
                        .is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if imaginary {
                    i += 1;
                    push(&mut out, Tok::Imag(x));
                } else {
                    push(&mut out, Tok::Num(x));
                }
                col += i - start;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                push(&mut out, Tok::Ident(s));
                col += i - start;
                continue;
            }
            other => return Err(syntax(l0, c0, format!("unexpected character {other:?}"))),
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        syntax(t.line, t.column, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn at_letter(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s != "tr" && s != "i")
    }

    /// `g<k>`, `a<j>` with suffixes.
    fn letter(&mut self) -> Result<Letter> {
        let t = self.next();
        let Tok::Ident(name) = &t.tok else {
            return Err(syntax(t.line, t.column, "expected a letter"));
        };
        let bad = || syntax(t.line, t.column, format!("unknown letter {name:?}"));
        let (kind, digits) = name.split_at(1);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let k: usize = digits.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(syntax(t.line, t.column, "letter indices start at 1"));
        }
        let mut inverse = false;
        if self.peek().tok == Tok::Caret {
            let caret = self.next();
            let minus = self.next();
            let one = self.next();
            if minus.tok != Tok::Minus || one.tok != Tok::Num(1.0) {
                return Err(syntax(
                    caret.line,
                    caret.column,
                    "only the exponent ^-1 is supported",
                ));
            }
            inverse = true;
        }
        let mut adjoint = false;
        if self.peek().tok == Tok::Star {
            self.next();
            adjoint = true;
        }
        if self.peek().tok == Tok::Caret {
            return Err(self.error("write the inverse adjoint as ^-1*"));
        }
        let variant = match (inverse, adjoint) {
            (false, false) => Variant::Id,
            (false, true) => Variant::Star,
            (true, false) => Variant::Inv,
            (true, true) => Variant::InvStar,
        };
        match kind {
            "g" => Ok(Letter::process(k - 1, variant)),
            "a" => Letter::det(k - 1, variant).map_err(|e| syntax(t.line, t.column, e.to_string())),
            _ => Err(bad()),
        }
    }

    fn letters(&mut self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        while self.at_letter() {
            out.push(self.letter()?);
        }
        Ok(out)
    }

    /// Number, imaginary number, `i`, or a parenthesised scalar sum.
    fn scalar(&mut self) -> Result<Option<C<f64>>> {
        match self.peek().tok.clone() {
            Tok::Num(x) => {
                self.next();
                Ok(Some(C::new(x, 0.0)))
            }
            Tok::Imag(x) => {
                self.next();
                Ok(Some(C::new(0.0, x)))
            }
            Tok::Ident(s) if s == "i" => {
                self.next();
                Ok(Some(C::new(0.0, 1.0)))
            }
            Tok::LParen => {
                let save = self.pos;
                self.next();
                let mut sum = C::new(0.0, 0.0);
                let mut sign = 1.0;
                let mut first = true;
                loop {
                    match self.peek().tok {
                        Tok::Plus if !first => {
                            self.next();
                            sign = 1.0;
                        }
                        Tok::Minus => {
                            self.next();
                            sign = -1.0;
                        }
                        _ if !first => break,
                        _ => {}
                    }
                    match self.scalar()? {
                        Some(z) => sum += z * sign,
                        None => {
                            self.pos = save;
                            return Ok(None);
                        }
                    }
                    first = false;
                    sign = 1.0;
                    if self.peek().tok == Tok::RParen {
                        break;
                    }
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(Some(sum))
            }
            _ => Ok(None),
        }
    }
}

/// Parses a sum of products of scalars and `tr(...)` factors.
pub fn parse_trace_polynomial<T: Real>(text: &str) -> Result<TracePolynomial<T>> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut out = TracePolynomial::zero();
    let mut sign = 1.0;
    if p.peek().tok == Tok::End {
        return Err(p.error("empty polynomial"));
    }
    loop {
        match p.peek().tok {
            Tok::Plus => {
                p.next();
            }
            Tok::Minus => {
                p.next();
                sign = -sign;
            }
            _ => {}
        }
        let mut coef = C::new(sign, 0.0);
        let mut words = Vec::new();
        loop {
            if let Tok::Ident(s) = &p.peek().tok {
                if s == "tr" {
                    p.next();
                    p.expect(Tok::LParen, "'(' after tr")?;
                    let letters = p.letters()?;
                    if p.peek().tok != Tok::RParen {
                        return Err(p.error("expected a letter or ')'"));
                    }
                    p.next();
                    words.push(super::word::Word::raw(letters));
                } else if s == "i" {
                    p.next();
                    coef *= C::new(0.0, 1.0);
                } else {
                    return Err(p.error(format!(
                        "unknown letter or function {s:?} (letters appear inside tr(...))"
                    )));
                }
            } else if let Some(z) = p.scalar()? {
                coef *= z;
            } else {
                return Err(p.error("expected a number or tr(...)"));
            }
            if p.peek().tok == Tok::Star {
                p.next();
                continue;
            }
            break;
        }
        out.add_term(
            TraceProduct::new(words),
            c(T::lit(coef.re), T::lit(coef.im)),
        );
        sign = 1.0;
        match p.peek().tok {
            Tok::End => break,
            Tok::Plus | Tok::Minus => continue,
            _ => return Err(p.error("expected '+', '-', '*' or end of input")),
        }
    }
    Ok(out)
}

/// Parses a sum of scalar multiples of words, `Σ c_k w_k`.
pub fn parse_matrix_polynomial<T: Real>(text: &str) -> Result<Vec<(C<T>, Vec<Letter>)>> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut out = Vec::new();
    if p.peek().tok == Tok::End {
        return Err(p.error("empty polynomial"));
    }
    loop {
        let mut sign = 1.0;
        match p.peek().tok {
            Tok::Plus => {
                p.next();
            }
            Tok::Minus => {
                p.next();
                sign = -1.0;
            }
            _ => {}
        }
        let mut coef = C::new(sign, 0.0);
        let mut saw_scalar = false;
        while let Some(z) = p.scalar()? {
            coef *= z;
            saw_scalar = true;
            if p.peek().tok == Tok::Star {
                p.next();
            } else {
                break;
            }
        }
        if let Tok::Ident(s) = &p.peek().tok {
            if s == "tr" {
                return Err(p.error("tr(...) is not allowed in a matrix polynomial"));
            }
        }
        let letters = p.letters()?;
        if letters.is_empty() && !saw_scalar {
            return Err(p.error("expected a number or a letter"));
        }
        out.push((c(T::lit(coef.re), T::lit(coef.im)), letters));
        match p.peek().tok {
            Tok::End => break,
            Tok::Plus | Tok::Minus => continue,
            _ => return Err(p.error("expected '+', '-' or end of input")),
        }
    }
    Ok(out)
}
