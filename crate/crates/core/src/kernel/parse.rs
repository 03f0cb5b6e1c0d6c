//! Expression grammar for coefficient functions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := atom ("^" nonneg-int)? | "-" factor
//! atom   := integer | identifier | "(" expr ")"
//! ```
//!
//! Rational literals such as `3/4` parse as a quotient of integers, so the
//! printed form of every [`RatFn`] reads back to an equal value.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::Poly;
use super::ratfn::RatFn;
use super::symbol::Var;
use super::KernelError;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(BigInt),
    Variable(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>, KernelError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (line0, col0);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let j = (i..chars.len()).find(|&k| !chars[k].is_ascii_digit()).unwrap_or(chars.len());
            let s: String = chars[i..j].iter().collect();
            out.push(Spanned { tok: Tok::Int(s.parse().expect("digits")), line: start.0, col: start.1 });
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let j = (i..chars.len())
                .find(|&k| !(chars[k].is_ascii_alphanumeric() || chars[k] == '_'))
                .unwrap_or(chars.len());
            out.push(Spanned { tok: Tok::Ident(chars[i..j].iter().collect()), line: start.0, col: start.1 });
            col += j - i;
            i = j;
        } else if "+-*/^()".contains(c) {
            out.push(Spanned { tok: Tok::Op(c), line, col });
            col += 1;
            i += 1;
        } else {
            return Err(KernelError::Syntax { line, col, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    known: Option<&'a [String]>,
}

impl Parser<'_> {
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

    fn fail<T>(&self, msg: &str) -> Result<T, KernelError> {
        let t = self.peek();
        let found = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
        };
        Err(KernelError::Syntax { line: t.line, col: t.col, msg: format!("{msg}, found {found}") })
    }

    fn expr(&mut self) -> Result<Expr, KernelError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, KernelError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, KernelError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let Tok::Int(n) = self.peek().tok.clone() else {
                return self.fail("expected a nonnegative integer exponent");
            };
            let e: u32 = match n.try_into() {
                Ok(e) => e,
                Err(_) => return self.fail("exponent too large"),
            };
            self.bump();
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, KernelError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Number(n))
            }
            Tok::Ident(name) => {
                if let Some(known) = self.known {
                    if !known.iter().any(|k| k == &name) {
                        return Err(KernelError::UnknownVariable { name, line: t.line, col: t.col });
                    }
                }
                self.bump();
                Ok(Expr::Variable(name))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek().tok != Tok::Op(')') {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            _ => self.fail("expected a number, variable or `(`"),
        }
    }
}

/// Parses `text` allowing only identifiers listed in `context`.
pub fn parse_expr(text: &str, context: &[String]) -> Result<Expr, KernelError> {
    parse_at(text, Some(context), 1, 1)
}

/// Parses `text` accepting any identifier.
pub fn parse_expr_free(text: &str) -> Result<Expr, KernelError> {
    parse_at(text, None, 1, 1)
}

/// Parses with positions offset to (`line`, `col`) so errors point into a
/// larger source file.
pub fn parse_at(text: &str, context: Option<&[String]>, line: usize, col: usize) -> Result<Expr, KernelError> {
    let toks = lex(text, line, col)?;
    let mut p = Parser { toks, pos: 0, known: context };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return p.fail("expected an operator or end of input");
    }
    Ok(e)
}

pub fn eval_expr(e: &Expr) -> Result<RatFn, KernelError> {
    Ok(match e {
        Expr::Number(n) => RatFn::constant(BigRational::from_integer(n.clone())),
        Expr::Variable(name) => RatFn::poly(Poly::var(Var::new(name))),
        Expr::Add(a, b) => &eval_expr(a)? + &eval_expr(b)?,
        Expr::Sub(a, b) => &eval_expr(a)? - &eval_expr(b)?,
        Expr::Mul(a, b) => &eval_expr(a)? * &eval_expr(b)?,
        Expr::Div(a, b) => {
            let d = eval_expr(b)?;
            if d.is_zero() {
                return Err(KernelError::DivisionByZero);
            }
            &eval_expr(a)? / &d
        }
        Expr::Pow(a, k) => eval_expr(a)?.pow(*k),
        Expr::Neg(a) => -&eval_expr(a)?,
    })
}

/// Parse and evaluate in one step.
pub fn ratfn(text: &str, context: &[String]) -> Result<RatFn, KernelError> {
    eval_expr(&parse_expr(text, context)?)
}

/// Parse and evaluate, accepting any identifier. Handy in tests.
pub fn rf(text: &str) -> RatFn {
    eval_expr(&parse_expr_free(text).unwrap_or_else(|e| panic!("{text}: {e}")))
        .unwrap_or_else(|e| panic!("{text}: {e}"))
}
