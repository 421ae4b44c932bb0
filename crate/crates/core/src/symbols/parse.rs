//! Text syntax for polynomial symbols: variables `x1..xn`, `xi1..xin`
//! (plain `x`, `xi` when `n = 1`), real literals, the imaginary unit `i`
//! (also as a suffix, `2i`), operators `+ - * ^` and parentheses.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{PolySymbol, SymbolError};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Imag(f64),
    Var { xi: bool, index: usize },
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(msg: impl Into<String>) -> SymbolError {
    SymbolError::Parse(msg.into())
}

fn lex(text: &str) -> Result<Vec<Token>, SymbolError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1
            }
            '-' => {
                out.push(Token::Minus);
                k += 1
            }
            '*' => {
                out.push(Token::Star);
                k += 1
            }
            '^' => {
                out.push(Token::Caret);
                k += 1
            }
            '(' => {
                out.push(Token::LParen);
                k += 1
            }
            ')' => {
                out.push(Token::RParen);
                k += 1
            }
            '0'..='9' | '.' => {
                let start = k;
                while k < bytes.len() && (bytes[k].is_ascii_digit() || bytes[k] == b'.') {
                    k += 1;
                }
                if k < bytes.len() && (bytes[k] == b'e' || bytes[k] == b'E') {
                    let mut j = k + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        k = j;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let v: f64 = text[start..k]
                    .parse()
                    .map_err(|_| err(alloc::format!("bad number `{}`", &text[start..k])))?;
                // `2i` is an imaginary literal, `2xi1` is not
                let imag_suffix = k < bytes.len()
                    && bytes[k] == b'i'
                    && !(k + 1 < bytes.len() && bytes[k + 1].is_ascii_alphanumeric());
                if imag_suffix {
                    out.push(Token::Imag(v));
                    k += 1;
                } else {
                    out.push(Token::Num(v));
                }
            }
            'a'..='z' | 'A'..='Z' => {
                let start = k;
                while k < bytes.len() && bytes[k].is_ascii_alphabetic() {
                    k += 1;
                }
                let name = &text[start..k];
                let dstart = k;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                let index = if dstart == k {
                    None
                } else {
                    Some(text[dstart..k].parse::<usize>().map_err(|_| err("bad index"))?)
                };
                match (name, index) {
                    ("i", None) => out.push(Token::Imag(1.0)),
                    ("x", idx) | ("xi", idx) => {
                        let index = idx.unwrap_or(1);
                        if index == 0 {
                            return Err(err("variable indices start at 1"));
                        }
                        out.push(Token::Var {
                            xi: name == "xi",
                            index,
                        });
                    }
                    _ => return Err(err(alloc::format!("unknown identifier `{}`", &text[start..k]))),
                }
            }
            _ => return Err(err(alloc::format!("unexpected character `{}`", c))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    dim_n: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<PolySymbol, SymbolError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolySymbol, SymbolError> {
        let mut acc = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolySymbol, SymbolError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PolySymbol, SymbolError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Token::Num(v)) if v >= 0.0 && v == libm::trunc(v) && v <= 64.0 => {
                    Ok(base.pow(v as u32))
                }
                _ => Err(err("exponent must be a nonnegative integer literal")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolySymbol, SymbolError> {
        let n = self.dim_n;
        match self.next() {
            Some(Token::Num(v)) => Ok(PolySymbol::constant(n, Complex64::new(v, 0.0))),
            Some(Token::Imag(v)) => Ok(PolySymbol::constant(n, Complex64::new(0.0, v))),
            Some(Token::Var { xi, index }) => {
                if index > n {
                    return Err(err(alloc::format!(
                        "variable index {} exceeds dimension {}",
                        index,
                        n
                    )));
                }
                Ok(if xi {
                    PolySymbol::xi(n, index - 1)
                } else {
                    PolySymbol::x(n, index - 1)
                })
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(err("missing `)`")),
                }
            }
            Some(t) => Err(err(alloc::format!("unexpected token {:?}", t))),
            None => Err(err("unexpected end of input")),
        }
    }
}

/// Largest variable index appearing in the text (at least 1).
pub fn infer_dimension(text: &str) -> Result<usize, SymbolError> {
    Ok(lex(text)?
        .iter()
        .filter_map(|t| match t {
            Token::Var { index, .. } => Some(*index),
            _ => None,
        })
        .max()
        .unwrap_or(1))
}

/// Parses a polynomial symbol on `R^n x R^n`; `dim_n = None` infers `n` from
/// the largest variable index.
pub fn parse_symbol(text: &str, dim_n: Option<usize>) -> Result<PolySymbol, SymbolError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(err("empty symbol"));
    }
    let n = match dim_n {
        Some(n) if n > 0 => n,
        Some(_) => return Err(err("dimension must be positive")),
        None => infer_dimension(text)?,
    };
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        dim_n: n,
    };
    let out = p.expr()?;
    if p.pos != tokens.len() {
        return Err(err(alloc::format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}
