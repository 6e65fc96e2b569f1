//! Nonlinearity grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := 'u' | 'ux' | 'uc' | 'uxc' | 'i' | LITERAL | '(' expr ')'
//! LITERAL := INT ('/' INT)? 'i'?
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::nonlin_poly::{ComplexPolynomial4, GaussianRational, VAR_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at token {token} (column {column}): expected {expected}, found {found}")]
    Syntax { token: usize, column: usize, expected: String, found: String },
    #[error("non-rational literal '{literal}' at token {token} (column {column}); use p/q")]
    NonRationalLiteral { token: usize, column: usize, literal: String },
    #[error("unknown identifier '{name}' at token {token} (column {column})")]
    UnknownIdentifier { token: usize, column: usize, name: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Var(usize),
    Literal(GaussianRational),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    text: String,
    column: usize,
}

fn digits(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn big(s: &[char]) -> BigInt {
    s.iter().collect::<String>().parse().expect("ascii digits")
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let token = out.len() + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Kind::Plus),
            '-' => Some(Kind::Minus),
            '*' => Some(Kind::Star),
            '^' => Some(Kind::Caret),
            '(' => Some(Kind::LParen),
            ')' => Some(Kind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, text: c.to_string(), column });
            i += 1;
        } else if c.is_ascii_digit() {
            let num_end = digits(&chars, i);
            let mut value = BigRational::from_integer(big(&chars[i..num_end]));
            let mut j = num_end;
            if j < chars.len() && (chars[j] == '.' || chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '.') {
                    k += 1;
                }
                return Err(ParseError::NonRationalLiteral {
                    token,
                    column,
                    literal: chars[i..k].iter().collect(),
                });
            }
            if j + 1 < chars.len() && chars[j] == '/' && chars[j + 1].is_ascii_digit() {
                let den_end = digits(&chars, j + 1);
                let den = big(&chars[j + 1..den_end]);
                if den.is_zero() {
                    return Err(ParseError::Syntax {
                        token,
                        column,
                        expected: "nonzero denominator".into(),
                        found: chars[i..den_end].iter().collect(),
                    });
                }
                value /= BigRational::from_integer(den);
                j = den_end;
            }
            let imaginary = j < chars.len() && chars[j] == 'i' && !chars.get(j + 1).is_some_and(|c| c.is_alphanumeric());
            let lit = if imaginary {
                j += 1;
                GaussianRational::new(BigRational::zero(), value)
            } else {
                GaussianRational::real(value)
            };
            out.push(Token { kind: Kind::Literal(lit), text: chars[i..j].iter().collect(), column });
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let name: String = chars[i..j].iter().collect();
            let kind = if name == "i" {
                Kind::Literal(GaussianRational::i())
            } else if let Some(v) = VAR_NAMES.iter().position(|&n| n == name) {
                Kind::Var(v)
            } else {
                return Err(ParseError::UnknownIdentifier { token, column, name });
            };
            out.push(Token { kind, text: name, column });
            i = j;
        } else {
            return Err(ParseError::Syntax {
                token,
                column,
                expected: "operand or operator".into(),
                found: format!("'{c}'"),
            });
        }
    }
    out.push(Token { kind: Kind::End, text: "end of input".into(), column: chars.len() + 1 });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Kind {
        &self.tokens[self.pos].kind
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = &self.tokens[self.pos];
        let found = if t.kind == Kind::End { t.text.clone() } else { format!("'{}'", t.text) };
        ParseError::Syntax { token: self.pos + 1, column: t.column, expected: expected.into(), found }
    }

    fn expr(&mut self) -> Result<ComplexPolynomial4, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Kind::Plus => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Kind::Minus => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ComplexPolynomial4, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Kind::Star {
            self.pos += 1;
            acc = acc * self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ComplexPolynomial4, ParseError> {
        if *self.peek() == Kind::Minus {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<ComplexPolynomial4, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Kind::Caret {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = match self.peek() {
            Kind::Literal(g) if g.is_real() => {
                let text = &self.tokens[self.pos].text;
                text.parse::<u32>().ok()
            }
            _ => None,
        };
        match exponent {
            Some(k) => {
                self.pos += 1;
                Ok(base.pow(k))
            }
            None => Err(self.error("nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<ComplexPolynomial4, ParseError> {
        match self.peek().clone() {
            Kind::Var(v) => {
                self.pos += 1;
                Ok(ComplexPolynomial4::var(v))
            }
            Kind::Literal(g) => {
                self.pos += 1;
                Ok(ComplexPolynomial4::constant(g))
            }
            Kind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Kind::RParen {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("operand (u, ux, uc, uxc, literal or '(')")),
        }
    }
}

pub fn parse_nonlinearity(src: &str) -> Result<ComplexPolynomial4, ParseError> {
    let mut p = Parser { tokens: tokenize(src)?, pos: 0 };
    let out = p.expr()?;
    if *p.peek() != Kind::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(out)
}
