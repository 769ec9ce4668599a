//! Scalar-field expressions `f(x1, .., xm)`: parsing, printing, and
//! jet evaluation.
//!
//! Grammar (EBNF, also documented in the README):
//!
//! ```text
//! expr   := term   { ("+" | "-") term }
//! term   := unary  { ("*" | "/") unary }
//! unary  := "-" unary | power
//! power  := atom [ "^" unary ]            (right-associative)
//! atom   := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")"
//! NUMBER := digits [ "." digits ] | "." digits
//! VAR    := "x" index            (index in 1..=m)
//! FUNC   := "exp" | "log" | "sin" | "cos" | "sqrt"
//! ```
//!
//! `^` binds tighter than unary minus and its exponent must be a constant
//! subexpression; it is folded to a number at parse time. Non-integer
//! exponents require a positive base at evaluation.

use std::fmt;

use crate::error::{GeomError, Result};
use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based variable index (`x1` is index 0).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

impl Expr {
    /// Evaluate with the given variable jets. `vars` must cover every
    /// variable index that survived parsing.
    pub fn eval(&self, vars: &[Jet]) -> Result<Jet> {
        match self {
            Expr::Num(c) => {
                let proto = vars.first().expect("eval requires at least one variable jet");
                Ok(Jet::constant(proto.nvars(), proto.order(), *c))
            }
            Expr::Var(i) => Ok(vars[*i].clone()),
            Expr::Neg(e) => Ok(e.eval(vars)?.neg()),
            Expr::Add(a, b) => Ok(a.eval(vars)?.add(&b.eval(vars)?)),
            Expr::Sub(a, b) => Ok(a.eval(vars)?.sub(&b.eval(vars)?)),
            Expr::Mul(a, b) => Ok(a.eval(vars)?.mul(&b.eval(vars)?)),
            Expr::Div(a, b) => a.eval(vars)?.div(&b.eval(vars)?),
            Expr::Pow(base, r) => base.eval(vars)?.powf(*r),
            Expr::Call(f, arg) => {
                let a = arg.eval(vars)?;
                match f {
                    Func::Exp => Ok(a.exp()),
                    Func::Log => a.ln(),
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Sqrt => a.sqrt(),
                }
            }
        }
    }

    /// Convenience: evaluate at a plain point with the requested jet order.
    pub fn eval_at(&self, x: &[f64], order: u8) -> Result<Jet> {
        let n = x.len();
        let vars: Vec<Jet> = (0..n).map(|i| Jet::variable(n, order, x[i], i)).collect();
        self.eval(&vars)
    }

    /// True when the expression references no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(e) => e.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Pow(b, _) => b.is_constant(),
            Expr::Call(_, a) => a.is_constant(),
        }
    }

    fn const_value(&self) -> Option<f64> {
        if !self.is_constant() {
            return None;
        }
        // One-variable dummy jet; constants ignore it.
        let dummy = [Jet::constant(1, 0, 0.0)];
        self.eval(&dummy).ok().map(|j| j.val())
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized canonical form; `parse(print(e)) == e`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => {
                if *c < 0.0 || c.is_sign_negative() {
                    write!(out, "({c})")
                } else {
                    write!(out, "{c}")
                }
            }
            Expr::Var(i) => write!(out, "x{}", i + 1),
            Expr::Neg(e) => write!(out, "(-{e})"),
            Expr::Add(a, b) => write!(out, "({a} + {b})"),
            Expr::Sub(a, b) => write!(out, "({a} - {b})"),
            Expr::Mul(a, b) => write!(out, "({a} * {b})"),
            Expr::Div(a, b) => write!(out, "({a} / {b})"),
            Expr::Pow(b, r) => {
                if *r < 0.0 {
                    write!(out, "({b}^-{})", -r)
                } else {
                    write!(out, "({b}^{r})")
                }
            }
            Expr::Call(f, a) => write!(out, "{}({a})", f.name()),
        }
    }
}

/// Parse `text` as an expression in variables `x1..x{m}`.
pub fn parse(text: &str, m: usize) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        m,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty expression"));
    }
    let e = p.parse_expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    m: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> GeomError {
        GeomError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            let exp_pos = self.pos;
            let exponent = self.parse_unary()?;
            let Some(r) = exponent.const_value() else {
                return Err(GeomError::Syntax {
                    pos: exp_pos,
                    msg: "exponent must be a constant expression".into(),
                });
            };
            return Ok(Expr::Pow(Box::new(base), r));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.bump();
                let e = self.parse_expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() => self.parse_ident(),
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some(b'.') {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if text == "." || text.is_empty() {
            self.pos = start;
            return Err(self.err("malformed number"));
        }
        let v: f64 = text
            .parse()
            .map_err(|_| GeomError::Syntax {
                pos: start,
                msg: format!("malformed number '{text}'"),
            })?;
        Ok(Expr::Num(v))
    }

    fn parse_ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.bump();
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(idx) = rest.parse::<usize>() {
                if idx == 0 || idx > self.m {
                    return Err(GeomError::UnknownSymbol(format!(
                        "{name} (dimension is {})",
                        self.m
                    )));
                }
                return Ok(Expr::Var(idx - 1));
            }
        }
        let func = match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return Err(GeomError::UnknownSymbol(name.to_string())),
        };
        if !self.eat(b'(') {
            return Err(self.err("expected '(' after function name"));
        }
        let arg = self.parse_expr()?;
        if !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_val(text: &str, m: usize, x: &[f64]) -> f64 {
        parse(text, m).unwrap().eval_at(x, 0).unwrap().val()
    }

    #[test]
    fn parse_constant() {
        assert_eq!(parse("1", 2).unwrap(), Expr::Num(1.0));
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval_val("1 + 0.5*x1^2", 2, &[2.0, 0.0]), 3.0);
        assert_eq!(eval_val("2^3^2", 1, &[0.0]), 512.0); // right-assoc
        assert_eq!(eval_val("-2^2", 1, &[0.0]), -4.0); // ^ binds tighter than unary minus
        assert_eq!(eval_val("2^-2", 1, &[0.0]), 0.25);
        assert_eq!(eval_val("6/3/2", 1, &[0.0]), 1.0); // left-assoc
        assert_eq!(eval_val("1 - 2 - 3", 1, &[0.0]), -4.0);
    }

    #[test]
    fn unbalanced_paren_reports_end_position() {
        match parse("exp(x1", 2) {
            Err(GeomError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_symbols_rejected() {
        assert!(matches!(parse("foo(x1)", 2), Err(GeomError::UnknownSymbol(_))));
        assert!(matches!(parse("x3", 2), Err(GeomError::UnknownSymbol(_))));
        assert!(matches!(parse("x0", 2), Err(GeomError::UnknownSymbol(_))));
    }

    #[test]
    fn variable_exponent_rejected() {
        assert!(parse("x1^x2", 2).is_err());
        assert!(parse("2^(1+1)", 2).is_ok());
    }

    #[test]
    fn jet_evaluation_examples() {
        let e = parse("1+0.5*x1^2", 2).unwrap();
        let j = e.eval_at(&[2.0, 0.0], 2).unwrap();
        assert_eq!(j.val(), 3.0);
        assert_eq!(j.grad(0), 2.0);
        assert_eq!(j.grad(1), 0.0);

        let e = parse("exp(x1)", 2).unwrap();
        let j = e.eval_at(&[0.0, 0.0], 2).unwrap();
        assert_eq!(j.val(), 1.0);
        assert_eq!(j.grad(0), 1.0);
        assert_eq!(j.grad(1), 0.0);
        assert_eq!(j.hess(0, 0), 1.0);
    }

    #[test]
    fn domain_errors_from_eval() {
        let e = parse("log(x1)", 1).unwrap();
        assert!(e.eval_at(&[-1.0], 1).is_err());
        let e = parse("1/x1", 1).unwrap();
        assert!(e.eval_at(&[0.0], 1).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "1 + 0.5*x1^2",
            "-x1*x2 - 3/(x1 + 2)",
            "exp(x1)*sin(x2) + sqrt(x1 + 3)",
            "x1^-2 + cos(x2)^2",
            "-(x1 - x2)^3",
        ] {
            let e = parse(text, 2).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed, 2).unwrap();
            assert_eq!(e, reparsed, "round trip failed for {text} -> {printed}");
            assert_eq!(printed, reparsed.to_string());
        }
    }
}
