//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! exponent := integer | '-' integer | '(' ['-'] integer ')'
//! atom   := number | identifier | '(' expr ')'
//! ```
//!
//! Numbers are exact: `0.25` is the rational `1/4`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::expr::Expr;
use super::vars::VarTable;
use super::ExprError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let c = b as char;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == '.' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit()) {
                self.pos += 1;
            }
            let int_part = &self.src[start..self.pos];
            let mut frac_part = "";
            if self.pos < bytes.len() && bytes[self.pos] == b'.' {
                self.pos += 1;
                let fs = self.pos;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                frac_part = &self.src[fs..self.pos];
            }
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(syntax(start, "malformed number"));
            }
            return Ok((Tok::Num(decimal(int_part, frac_part)), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        Err(syntax(start, &format!("unexpected character `{c}`")))
    }
}

fn decimal(int_part: &str, frac_part: &str) -> BigRational {
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().expect("ascii digits") };
    let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
    BigRational::new(n, scale)
}

fn syntax(offset: usize, message: &str) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.to_string(),
    }
}

struct Parser<'t> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    vars: &'t VarTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = self.exponent()?;
        base.powi(e)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let at = self.offset();
        let value: i32 = match self.bump().0 {
            Tok::Num(n) if n.is_integer() => n
                .to_integer()
                .try_into()
                .map_err(|_| syntax(at, "exponent out of range"))?,
            Tok::Num(_) => return Err(ExprError::NonIntegerExponent { offset: at }),
            Tok::Ident(_) | Tok::LParen => return Err(ExprError::NonIntegerExponent { offset: at }),
            _ => return Err(syntax(at, "expected integer exponent")),
        };
        if paren {
            let at = self.offset();
            if self.bump().0 != Tok::RParen {
                return Err(syntax(at, "expected `)`"));
            }
        }
        Ok(if neg { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Num(n) => Ok(Expr::rational(n)),
            Tok::Ident(name) => self
                .vars
                .lookup(&name)
                .map(Expr::var)
                .ok_or(ExprError::UnknownVariable { name, offset: at }),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.bump().0 {
                    Tok::RParen => Ok(inner),
                    _ => Err(syntax(close, "expected `)`")),
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, &format!("unexpected token {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

/// Parses `text` over the variables of `vars` into a canonical expression.
pub fn parse_expr(text: &str, vars: &VarTable) -> Result<Expr, ExprError> {
    let toks = Lexer::tokenize(text)?;
    let mut p = Parser { toks, i: 0, vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let at = p.offset();
        return Err(syntax(at, &format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}
