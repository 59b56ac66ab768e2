//! Scalar expressions in the phase-space variables `x` and `xi`.
//!
//! Grammar, loosest binding first: `+ -`, then `* /`, then unary `-`,
//! then right-associative `^`. Function calls: sin, cos, tan, tanh, exp,
//! log, sqrt, abs (one argument) and atan2 (two arguments).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> Result<f64> {
        match self {
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Tan => Ok(v.tan()),
            Func::Tanh => Ok(v.tanh()),
            Func::Exp => Ok(v.exp()),
            Func::Abs => Ok(v.abs()),
            Func::Sqrt if v < 0.0 => Err(Error::DomainError(format!("sqrt of negative value {v}"))),
            Func::Sqrt => Ok(v.sqrt()),
            Func::Log if v <= 0.0 => Err(Error::DomainError(format!("log of non-positive value {v}"))),
            Func::Log => Ok(v.ln()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Atan2(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Bin(_, a, b) | Expr::Atan2(a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    pub fn is_const(&self) -> bool {
        !self.depends_on(Var::X) && !self.depends_on(Var::Xi)
    }

    /// Tree-walking evaluation. For repeated evaluation use [`Expr::compile`].
    pub fn eval(&self, x: f64, xi: f64) -> Result<f64> {
        let v = self.eval_raw(x, xi)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainError(format!("non-finite value at ({x}, {xi})")))
        }
    }

    fn eval_raw(&self, x: f64, xi: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Xi) => xi,
            Expr::Neg(a) => -a.eval_raw(x, xi)?,
            Expr::Bin(op, a, b) => binop(*op, a.eval_raw(x, xi)?, b.eval_raw(x, xi)?)?,
            Expr::Call(f, a) => f.apply(a.eval_raw(x, xi)?)?,
            Expr::Atan2(a, b) => a.eval_raw(x, xi)?.atan2(b.eval_raw(x, xi)?),
        })
    }

    pub fn compile(&self) -> Program {
        let mut code = Vec::new();
        emit(self, &mut code);
        let mut depth = 0usize;
        let mut max_depth = 0usize;
        for ins in &code {
            match ins {
                Instr::Const(_) | Instr::X | Instr::Xi => depth += 1,
                Instr::Bin(_) | Instr::Atan2 => depth -= 1,
                Instr::Neg | Instr::PowI(_) | Instr::Func(_) => {}
            }
            max_depth = max_depth.max(depth);
        }
        Program { code, max_depth }
    }

    /// First-order partial derivatives by central differences with one
    /// Richardson level. The step for each variable is
    /// `scale * max(1, |v|) * eps^(1/3)`.
    pub fn grad(&self, x: f64, xi: f64, scale: f64) -> Result<(f64, f64)> {
        self.compile().grad(x, xi, scale)
    }
}

fn binop(op: BinOp, a: f64, b: f64) -> Result<f64> {
    Ok(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div if b == 0.0 => return Err(Error::DomainError("division by zero".into())),
        BinOp::Div => a / b,
        BinOp::Pow if b.fract() == 0.0 && b.abs() <= 64.0 => a.powi(b as i32),
        BinOp::Pow => {
            let v = a.powf(b);
            if v.is_nan() && !a.is_nan() && !b.is_nan() {
                return Err(Error::DomainError(format!("{a}^{b} is undefined")));
            }
            v
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Const(f64),
    X,
    Xi,
    Neg,
    Bin(BinOp),
    PowI(i32),
    Func(Func),
    Atan2,
}

fn emit(e: &Expr, code: &mut Vec<Instr>) {
    if e.is_const() {
        if let Ok(v) = e.eval_raw(0.0, 0.0) {
            code.push(Instr::Const(v));
            return;
        }
    }
    match e {
        Expr::Num(v) => code.push(Instr::Const(*v)),
        Expr::Pi => code.push(Instr::Const(std::f64::consts::PI)),
        Expr::Var(Var::X) => code.push(Instr::X),
        Expr::Var(Var::Xi) => code.push(Instr::Xi),
        Expr::Neg(a) => {
            emit(a, code);
            code.push(Instr::Neg);
        }
        Expr::Bin(BinOp::Pow, a, b) if b.is_const() => {
            let p = b.eval_raw(0.0, 0.0).unwrap_or(f64::NAN);
            emit(a, code);
            if p.fract() == 0.0 && p.abs() <= 64.0 {
                code.push(Instr::PowI(p as i32));
            } else {
                emit(b, code);
                code.push(Instr::Bin(BinOp::Pow));
            }
        }
        Expr::Bin(op, a, b) => {
            emit(a, code);
            emit(b, code);
            code.push(Instr::Bin(*op));
        }
        Expr::Call(f, a) => {
            emit(a, code);
            code.push(Instr::Func(*f));
        }
        Expr::Atan2(a, b) => {
            emit(a, code);
            emit(b, code);
            code.push(Instr::Atan2);
        }
    }
}

/// Flat stack program compiled from an [`Expr`].
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    max_depth: usize,
}

impl Program {
    pub fn constant(v: f64) -> Program {
        Program { code: vec![Instr::Const(v)], max_depth: 1 }
    }

    /// Value if the program is a single constant.
    pub fn as_const(&self) -> Option<f64> {
        match self.code.as_slice() {
            [Instr::Const(v)] => Some(*v),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64, xi: f64) -> Result<f64> {
        if let Some(v) = self.as_const() {
            return Ok(v);
        }
        let mut small = [0.0f64; 32];
        let mut big;
        let stack: &mut [f64] = if self.max_depth <= small.len() {
            &mut small
        } else {
            big = vec![0.0; self.max_depth];
            &mut big
        };
        let mut sp = 0usize;
        for ins in &self.code {
            match *ins {
                Instr::Const(v) => {
                    stack[sp] = v;
                    sp += 1;
                }
                Instr::X => {
                    stack[sp] = x;
                    sp += 1;
                }
                Instr::Xi => {
                    stack[sp] = xi;
                    sp += 1;
                }
                Instr::Neg => stack[sp - 1] = -stack[sp - 1],
                Instr::PowI(n) => stack[sp - 1] = stack[sp - 1].powi(n),
                Instr::Func(f) => stack[sp - 1] = f.apply(stack[sp - 1])?,
                Instr::Bin(op) => {
                    sp -= 1;
                    stack[sp - 1] = binop(op, stack[sp - 1], stack[sp])?;
                }
                Instr::Atan2 => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1].atan2(stack[sp]);
                }
            }
        }
        let v = stack[0];
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainError(format!("non-finite value at ({x}, {xi})")))
        }
    }

    pub fn grad(&self, x: f64, xi: f64, scale: f64) -> Result<(f64, f64)> {
        if self.as_const().is_some() {
            return Ok((0.0, 0.0));
        }
        let cbrt_eps = f64::EPSILON.cbrt();
        let dx = scale * x.abs().max(1.0) * cbrt_eps;
        let dxi = scale * xi.abs().max(1.0) * cbrt_eps;
        let gx = richardson(|d| Ok((self.eval(x + d, xi)? - self.eval(x - d, xi)?) / (2.0 * d)), dx)?;
        let gxi = richardson(|d| Ok((self.eval(x, xi + d)? - self.eval(x, xi - d)?) / (2.0 * d)), dxi)?;
        Ok((gx, gxi))
    }
}

fn richardson(central: impl Fn(f64) -> Result<f64>, d: f64) -> Result<f64> {
    let coarse = central(d)?;
    let fine = central(0.5 * d)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
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
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::SyntaxError {
                    offset: start,
                    message: format!("malformed number `{s}`"),
                })?;
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::SyntaxError {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::SyntaxError {
            offset: self.offset(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let (_, offset) = self.bump();
                match name.as_str() {
                    "x" => return Ok(Expr::Var(Var::X)),
                    "xi" => return Ok(Expr::Var(Var::Xi)),
                    "pi" => return Ok(Expr::Pi),
                    _ => {}
                }
                let is_atan2 = name == "atan2";
                let func = Func::from_name(&name);
                if func.is_none() && !is_atan2 {
                    return Err(Error::UnknownIdentifier { name, offset });
                }
                self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                let a = self.expr()?;
                if is_atan2 {
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Atan2(Box::new(a), Box::new(b)));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(func.unwrap(), Box::new(a)))
            }
            _ => self.fail("a number, variable, function call or `(`"),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("operator or end of input");
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// Printing

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if v.is_sign_negative() => PREC_NEG,
        Expr::Neg(_) => PREC_NEG,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Expr::Bin(BinOp::Pow, ..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "-{}", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Xi) => f.write_str("xi"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, PREC_NEG)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => (" + ", PREC_ADD),
                    BinOp::Sub => (" - ", PREC_ADD),
                    BinOp::Mul => (" * ", PREC_MUL),
                    BinOp::Div => (" / ", PREC_MUL),
                    BinOp::Pow => ("^", PREC_POW),
                };
                if *op == BinOp::Pow {
                    write_child(f, a, PREC_ATOM)?;
                    f.write_str(sym)?;
                    write_child(f, b, PREC_NEG)
                } else {
                    write_child(f, a, p)?;
                    f.write_str(sym)?;
                    write_child(f, b, p + 1)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Atan2(a, b) => write!(f, "atan2({a}, {b})"),
        }
    }
}
