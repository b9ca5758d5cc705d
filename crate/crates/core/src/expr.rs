//! Arithmetic expressions in `x` and `y`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-' exponent | numeric ('^' exponent)?
//! numeric  := NUMBER | '(' exponent ')'
//! atom     := NUMBER | 'x' | 'y' | '(' expr ')'
//!           | ('exp' | 'abs') '(' expr ')'
//!           | ('max' | 'min') '(' expr (',' expr)+ ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`. Exponents are
//! numeric literals only and `^` is right-associative. There is no implicit
//! multiplication: `2x` is an error.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::func::Fn2D;

/// Byte range `[start, end)` in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallOp {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(CallOp, Vec<Expr>),
}

/// A parsed expression. Equality is structural and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    fn at(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    pub fn num(v: f64) -> Self {
        Self::at(ExprKind::Number(v), Span::default())
    }

    pub fn var(v: Var) -> Self {
        Self::at(ExprKind::Var(v), Span::default())
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Self::at(ExprKind::Unary(op, Box::new(child)), Span::default())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Self::at(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), Span::default())
    }

    pub fn call(op: CallOp, args: Vec<Expr>) -> Self {
        Self::at(ExprKind::Call(op, args), Span::default())
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let v = match &self.kind {
            ExprKind::Number(v) => *v,
            ExprKind::Var(Var::X) => x,
            ExprKind::Var(Var::Y) => y,
            ExprKind::Unary(op, child) => {
                let c = child.eval(x, y)?;
                match op {
                    UnaryOp::Neg => -c,
                    UnaryOp::Abs => c.abs(),
                    UnaryOp::Exp => c.exp(),
                }
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let l = lhs.eval(x, y)?;
                let r = rhs.eval(x, y)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError {
                                span: self.span,
                                message: "division by zero".into(),
                            });
                        }
                        l / r
                    }
                    BinaryOp::Pow => l.powf(r),
                }
            }
            ExprKind::Call(op, args) => {
                let mut acc = args[0].eval(x, y)?;
                for a in &args[1..] {
                    let v = a.eval(x, y)?;
                    acc = match op {
                        CallOp::Max => acc.max(v),
                        CallOp::Min => acc.min(v),
                    };
                }
                acc
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError {
                span: self.span,
                message: format!("non-finite result {v}"),
            })
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            ExprKind::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            ExprKind::Unary(UnaryOp::Neg, _) => 3,
            ExprKind::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the fewest parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(v) => write!(f, "{v}"),
            ExprKind::Var(Var::X) => f.write_str("x"),
            ExprKind::Var(Var::Y) => f.write_str("y"),
            ExprKind::Unary(UnaryOp::Neg, c) => {
                f.write_str("-")?;
                c.fmt_child(f, 3)
            }
            ExprKind::Unary(UnaryOp::Abs, c) => write!(f, "abs({c})"),
            ExprKind::Unary(UnaryOp::Exp, c) => write!(f, "exp({c})"),
            ExprKind::Binary(BinaryOp::Pow, base, exp) => {
                base.fmt_child(f, 5)?;
                write!(f, "^{exp}")
            }
            ExprKind::Binary(op, l, r) => {
                let (sym, prec) = match op {
                    BinaryOp::Add => (" + ", 1),
                    BinaryOp::Sub => (" - ", 1),
                    BinaryOp::Mul => (" * ", 2),
                    _ => (" / ", 2),
                };
                l.fmt_child(f, prec)?;
                f.write_str(sym)?;
                r.fmt_child(f, prec + 1)
            }
            ExprKind::Call(op, args) => {
                f.write_str(match op {
                    CallOp::Max => "max(",
                    CallOp::Min => "min(",
                })?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("at byte {}: {message}", span.start)]
pub struct EvalError {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    /// The message followed by the source line and a caret under the position.
    pub fn render(&self, src: &str) -> String {
        let col = src[..self.position.min(src.len())].chars().count();
        format!("{self}\n  {src}\n  {}^", " ".repeat(col))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, Span { start, end: i + 1 }));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                position: start,
                expected: "number".into(),
                found: format!("'{text}'"),
            })?;
            if !v.is_finite() {
                return Err(ParseError {
                    position: start,
                    expected: "finite number".into(),
                    found: format!("'{text}'"),
                });
            }
            out.push((Tok::Num(v), Span { start, end: i }));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), Span { start, end: i }));
        } else {
            let ch = src[start..].chars().next().expect("non-empty remainder");
            return Err(ParseError {
                position: start,
                expected: "token".into(),
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((
        Tok::End,
        Span {
            start: src.len(),
            end: src.len(),
        },
    ));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.span().start,
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().1.start;
            let child = self.unary()?;
            let end = child.span.end;
            return Ok(Expr::at(
                ExprKind::Unary(UnaryOp::Neg, Box::new(child)),
                Span { start, end },
            ));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.exponent()?;
            return Ok(join(BinaryOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().1.start;
            let child = self.exponent()?;
            let end = child.span.end;
            return Ok(Expr::at(
                ExprKind::Unary(UnaryOp::Neg, Box::new(child)),
                Span { start, end },
            ));
        }
        let base = match self.peek().clone() {
            Tok::Num(v) => Expr::at(ExprKind::Number(v), self.bump().1),
            Tok::LParen => {
                self.bump();
                let inner = self.exponent()?;
                self.expect(Tok::RParen, "')'")?;
                inner
            }
            _ => return Err(self.error("numeric exponent")),
        };
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.exponent()?;
            return Ok(join(BinaryOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::at(ExprKind::Number(v), span))
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                let end = self.expect(Tok::RParen, "')'")?.end;
                inner.span = Span { start: span.start, end };
                Ok(inner)
            }
            Tok::Ident(name) => {
                let kind = match name.as_str() {
                    "x" => Some(ExprKind::Var(Var::X)),
                    "y" => Some(ExprKind::Var(Var::Y)),
                    _ => None,
                };
                if let Some(kind) = kind {
                    self.bump();
                    return Ok(Expr::at(kind, span));
                }
                match name.as_str() {
                    "exp" | "abs" => {
                        let op = if name == "exp" { UnaryOp::Exp } else { UnaryOp::Abs };
                        self.bump();
                        self.expect(Tok::LParen, "'('")?;
                        let arg = self.expr()?;
                        let end = self.expect(Tok::RParen, "')'")?.end;
                        Ok(Expr::at(
                            ExprKind::Unary(op, Box::new(arg)),
                            Span { start: span.start, end },
                        ))
                    }
                    "max" | "min" => {
                        let op = if name == "max" { CallOp::Max } else { CallOp::Min };
                        self.bump();
                        self.expect(Tok::LParen, "'('")?;
                        let mut args = vec![self.expr()?];
                        self.expect(Tok::Comma, "','")?;
                        args.push(self.expr()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                        let end = self.expect(Tok::RParen, "',' or ')'")?.end;
                        Ok(Expr::at(ExprKind::Call(op, args), Span { start: span.start, end }))
                    }
                    _ => Err(self.error("x, y, exp, abs, max or min")),
                }
            }
            _ => Err(self.error("number, variable, function or '('")),
        }
    }
}

fn join(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = Span {
        start: lhs.span.start,
        end: rhs.span.end,
    };
    Expr::at(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}

/// Wraps a parsed expression as an integrand. Evaluation errors keep the
/// byte offset of the failing subexpression.
pub fn to_fn(expr: Expr) -> Fn2D {
    let expr = Arc::new(expr);
    Fn2D::fallible(move |x, y| expr.eval(x, y).map_err(|e| e.to_string()))
}
