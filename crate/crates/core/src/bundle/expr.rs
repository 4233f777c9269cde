//! Closed-form expressions for transition-matrix entries.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := rational | identifier | func "(" expr ")" | "(" expr ")"
//! func   := "sin" | "cos" | "exp"
//! ```
//!
//! `^` binds tighter than unary minus (`-t^2 = -(t^2)`) and associates to the
//! right. Exponents must evaluate to integers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent {0} is not an integer")]
    NonIntegerExponent(String),
    #[error("exponent {0} is too large")]
    ExponentTooLarge(String),
    #[error("{func}({arg}) is not rational; use float mode")]
    Domain { func: Func, arg: String },
    #[error("expected {expected} coordinate values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("value is not finite")]
    NotFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

const MAX_EXPONENT: i64 = 4096;

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: BigInt = self.src[start..self.pos].parse().expect("digits");
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek_raw(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                let func = match name {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                match func {
                    Some(f) => {
                        if !self.eat('(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => Ok(Expr::Var(name.to_string())),
                }
            }
            Some(_) => Err(self.error("expected a number, identifier or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    /// Checks that every identifier is one of `coords`.
    pub fn bind(&self, coords: &[String]) -> Result<(), ExprError> {
        match self {
            Expr::Num(_) => Ok(()),
            Expr::Var(v) => {
                if coords.iter().any(|c| c == v) {
                    Ok(())
                } else {
                    Err(ExprError::UnknownIdentifier(v.clone()))
                }
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.bind(coords),
            Expr::Bin(_, a, b) => {
                a.bind(coords)?;
                b.bind(coords)
            }
        }
    }

    pub fn eval_exact(&self, coords: &[String], point: &[Rational]) -> Result<Rational, ExprError> {
        check_arity(coords, point.len())?;
        self.exact(coords, point)
    }

    fn exact(&self, coords: &[String], point: &[Rational]) -> Result<Rational, ExprError> {
        Ok(match self {
            Expr::Num(q) => q.clone(),
            Expr::Var(v) => lookup(coords, v).map(|i| point[i].clone())?,
            Expr::Neg(e) => -e.exact(coords, point)?,
            Expr::Call(f, e) => {
                let x = e.exact(coords, point)?;
                if !x.is_zero() {
                    return Err(ExprError::Domain {
                        func: *f,
                        arg: x.to_string(),
                    });
                }
                match f {
                    Func::Sin => Rational::zero(),
                    Func::Cos | Func::Exp => Rational::one(),
                }
            }
            Expr::Bin(op, a, b) => {
                let x = a.exact(coords, point)?;
                let y = b.exact(coords, point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.is_zero() {
                            return Err(ExprError::DivisionByZero);
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        let n = integer_exponent(&y)?;
                        if n < 0 && x.is_zero() {
                            return Err(ExprError::DivisionByZero);
                        }
                        let p = num_traits::pow(x.clone(), n.unsigned_abs() as usize);
                        if n < 0 {
                            p.recip()
                        } else {
                            p
                        }
                    }
                }
            }
        })
    }

    pub fn eval_float(&self, coords: &[String], point: &[f64]) -> Result<f64, ExprError> {
        check_arity(coords, point.len())?;
        let v = self.float(coords, point)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NotFinite)
        }
    }

    fn float(&self, coords: &[String], point: &[f64]) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(q) => q.to_f64().unwrap_or(f64::NAN),
            Expr::Var(v) => point[lookup(coords, v)?],
            Expr::Neg(e) => -e.float(coords, point)?,
            Expr::Call(f, e) => {
                let x = e.float(coords, point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                }
            }
            Expr::Bin(op, a, b) => {
                let x = a.float(coords, point)?;
                let y = b.float(coords, point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(ExprError::DivisionByZero);
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if y.fract() != 0.0 {
                            return Err(ExprError::NonIntegerExponent(y.to_string()));
                        }
                        if y.abs() > MAX_EXPONENT as f64 {
                            return Err(ExprError::ExponentTooLarge(y.to_string()));
                        }
                        if y < 0.0 && x == 0.0 {
                            return Err(ExprError::DivisionByZero);
                        }
                        x.powi(y as i32)
                    }
                }
            }
        })
    }
}

fn check_arity(coords: &[String], got: usize) -> Result<(), ExprError> {
    if coords.len() != got {
        return Err(ExprError::Arity {
            expected: coords.len(),
            got,
        });
    }
    Ok(())
}

fn lookup(coords: &[String], v: &str) -> Result<usize, ExprError> {
    coords
        .iter()
        .position(|c| c == v)
        .ok_or_else(|| ExprError::UnknownIdentifier(v.to_string()))
}

fn integer_exponent(y: &Rational) -> Result<i64, ExprError> {
    if !y.is_integer() {
        return Err(ExprError::NonIntegerExponent(y.to_string()));
    }
    match y.to_integer().to_i64() {
        Some(n) if n.abs() <= MAX_EXPONENT => Ok(n),
        _ => Err(ExprError::ExponentTooLarge(y.abs().to_string())),
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(q) if !q.is_integer() => 2,
            Expr::Num(q) if q.is_negative() => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn write_min(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write!(f, "{q}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_min(f, 3)
            }
            Expr::Call(func, e) => write!(f, "{func}({e})"),
            Expr::Bin(op, a, b) => {
                let (sym, lmin, rmin) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                a.write_min(f, lmin)?;
                f.write_str(sym)?;
                b.write_min(f, rmin)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};

    fn t() -> Vec<String> {
        vec!["t".to_string()]
    }

    fn at(src: &str, x: Rational) -> Result<Rational, ExprError> {
        parse_expr(src)?.eval_exact(&t(), &[x])
    }

    #[test]
    fn arithmetic() {
        assert_eq!(at("1/2 + t^2", q(1)).unwrap(), qf(3, 2));
        assert_eq!(at("cos(t)", q(0)).unwrap(), q(1));
        assert_eq!(at("(1 - t^2)/(1 + t^2)", qf(1, 2)).unwrap(), qf(3, 5));
        assert_eq!(at("2*3 - 4/2 - 1", q(0)).unwrap(), q(3));
        assert_eq!(at("  7 - 2 - 1 ", q(0)).unwrap(), q(4));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("-t^2", q(3)).unwrap(), q(-9));
        assert_eq!(at("2^3^2", q(0)).unwrap(), q(512));
        assert_eq!(at("2^-1", q(0)).unwrap(), qf(1, 2));
        assert_eq!(at("-2*-3", q(0)).unwrap(), q(6));
        assert_eq!(at("12/3/2", q(0)).unwrap(), q(2));
        assert_eq!(at("(-t)^2", q(3)).unwrap(), q(9));
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(at("1/t", q(0)), Err(ExprError::DivisionByZero));
        assert_eq!(at("t^-1", q(0)), Err(ExprError::DivisionByZero));
        assert!(matches!(
            at("sin(t)", q(1)),
            Err(ExprError::Domain { func: Func::Sin, .. })
        ));
        assert!(matches!(at("t^(1/2)", q(4)), Err(ExprError::NonIntegerExponent(_))));
        assert!(matches!(at("2^100000", q(0)), Err(ExprError::ExponentTooLarge(_))));
        assert_eq!(at("exp(0) + sin(t - t)", q(5)).unwrap(), q(1));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(
            parse_expr("1 + * 2"),
            Err(ExprError::Syntax {
                offset: 4,
                message: "expected a number, identifier or `(`".into()
            })
        );
        assert!(matches!(parse_expr("(1 + t"), Err(ExprError::Syntax { offset: 6, .. })));
        assert!(matches!(parse_expr("1 2"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("sin t"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr(""), Err(ExprError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn binding() {
        let e = parse_expr("s + t").unwrap();
        assert_eq!(e.bind(&t()), Err(ExprError::UnknownIdentifier("s".into())));
        assert!(e.bind(&["s".to_string(), "t".to_string()]).is_ok());
        assert!(matches!(
            e.eval_exact(&t(), &[q(1), q(2)]),
            Err(ExprError::Arity { .. })
        ));
    }

    #[test]
    fn float_mode() {
        let e = parse_expr("cos(t)^2 + sin(t)^2").unwrap();
        assert!((e.eval_float(&t(), &[0.7]).unwrap() - 1.0).abs() < 1e-12);
        let e = parse_expr("exp(t)").unwrap();
        assert!((e.eval_float(&t(), &[1.0]).unwrap() - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(
            parse_expr("1/t").unwrap().eval_float(&t(), &[0.0]),
            Err(ExprError::DivisionByZero)
        );
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "-t^2 + 1/3",
            "2^3^2",
            "(2^3)^2",
            "cos(t*t) - (1 - t)/(1 + t)",
            "-(-t)",
            "1 - (2 - t)",
            "t/(2*t)",
            "(-t)^2",
            "s^2/(1 + s^2)",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
        assert_eq!(parse_expr("((1)) + (t^2)").unwrap().to_string(), "1 + t^2");
        assert_eq!(parse_expr("s^2/(1+s^2)").unwrap().to_string(), "s^2/(1 + s^2)");
        assert_eq!(parse_expr("-(-t)").unwrap().to_string(), "--t");
        let scaled = Expr::Bin(
            BinOp::Mul,
            Box::new(Expr::Var("t".into())),
            Box::new(Expr::Num(qf(-1, 2))),
        );
        assert_eq!(scaled.to_string(), "t*(-1/2)");
        assert_eq!(
            parse_expr(&scaled.to_string())
                .unwrap()
                .eval_exact(&t(), &[q(4)])
                .unwrap(),
            q(-2)
        );
    }
}
