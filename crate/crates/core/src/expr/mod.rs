//! Analytic expressions in one variable `x` and one optional parameter `c`.
//!
//! Used to describe inverse branches and their derivative magnitudes.
//! Every node kind has a derivative rule, so any parsed branch can be
//! differentiated symbolically.

mod parse;

use std::fmt;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::precision::{format_real, PrecisionContext, Real};

pub use parse::{parse_expr, parse_expr_at};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Abs,
    Exp,
    Log,
    /// Derivative of `abs`; undefined at 0.
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rational),
    X,
    Param,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a rational exponent.
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant<T>(value: T) -> Expr
    where
        Rational: From<T>,
    {
        Expr::Const(Rational::from(value))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Const(r) => Some(r),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(r) if *r == 0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(r) if *r == 1)
    }

    // Smart constructors fold constants and drop neutral elements.

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(r) => Expr::Const(-r),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => Expr::neg(b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (a, _) if a.is_zero() => Expr::constant(0),
            (_, b) if b.is_zero() => Expr::constant(0),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if y != 0 => Expr::Const(x / y),
            (a, b) if b.is_one() => a,
            (a, b) if a.is_zero() && !b.is_zero() => Expr::constant(0),
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: Rational) -> Expr {
        if exponent == 0 {
            return Expr::constant(1);
        }
        if exponent == 1 {
            return base;
        }
        match base {
            Expr::Const(r) if exponent.denom() == &1u32 && (r != 0 || exponent > 0) => {
                let e = exponent.numer().to_i32().unwrap_or(i32::MAX);
                if e.unsigned_abs() <= 64 {
                    let mut out = Rational::from(1);
                    for _ in 0..e.unsigned_abs() {
                        out *= &r;
                    }
                    if e < 0 {
                        out.recip_mut();
                    }
                    Expr::Const(out)
                } else {
                    Expr::Pow(Box::new(Expr::Const(r)), exponent)
                }
            }
            other => Expr::Pow(Box::new(other), exponent),
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param => Expr::constant(0),
            Expr::X => Expr::constant(1),
            Expr::Neg(u) => Expr::neg(u.derivative()),
            Expr::Add(u, v) => Expr::add(u.derivative(), v.derivative()),
            Expr::Sub(u, v) => Expr::sub(u.derivative(), v.derivative()),
            Expr::Mul(u, v) => Expr::add(
                Expr::mul(u.derivative(), (**v).clone()),
                Expr::mul((**u).clone(), v.derivative()),
            ),
            Expr::Div(u, v) => Expr::div(
                Expr::sub(
                    Expr::mul(u.derivative(), (**v).clone()),
                    Expr::mul((**u).clone(), v.derivative()),
                ),
                Expr::pow((**v).clone(), Rational::from(2)),
            ),
            Expr::Pow(u, r) => Expr::mul(
                Expr::mul(
                    Expr::Const(r.clone()),
                    Expr::pow((**u).clone(), Rational::from(r - 1u32)),
                ),
                u.derivative(),
            ),
            Expr::Call(f, u) => {
                let du = u.derivative();
                let outer = match f {
                    Func::Sqrt => Expr::div(
                        Expr::constant(1),
                        Expr::mul(Expr::constant(2), self.clone()),
                    ),
                    Func::Abs => Expr::call(Func::Sign, (**u).clone()),
                    Func::Exp => self.clone(),
                    Func::Log => Expr::div(Expr::constant(1), (**u).clone()),
                    Func::Sign => Expr::constant(0),
                };
                Expr::mul(outer, du)
            }
        }
    }

    /// Replaces every `x` with `value`.
    pub fn substitute(&self, value: &Expr) -> Expr {
        let sub = |e: &Expr| e.substitute(value);
        match self {
            Expr::X => value.clone(),
            Expr::Const(_) | Expr::Param => self.clone(),
            Expr::Neg(u) => Expr::neg(sub(u)),
            Expr::Add(u, v) => Expr::add(sub(u), sub(v)),
            Expr::Sub(u, v) => Expr::sub(sub(u), sub(v)),
            Expr::Mul(u, v) => Expr::mul(sub(u), sub(v)),
            Expr::Div(u, v) => Expr::div(sub(u), sub(v)),
            Expr::Pow(u, r) => Expr::pow(sub(u), r.clone()),
            Expr::Call(f, u) => Expr::call(*f, sub(u)),
        }
    }

    /// Replaces the parameter `c` with a constant.
    pub fn bind_param(&self, value: &Rational) -> Expr {
        let bind = |e: &Expr| e.bind_param(value);
        match self {
            Expr::Param => Expr::Const(value.clone()),
            Expr::Const(_) | Expr::X => self.clone(),
            Expr::Neg(u) => Expr::neg(bind(u)),
            Expr::Add(u, v) => Expr::add(bind(u), bind(v)),
            Expr::Sub(u, v) => Expr::sub(bind(u), bind(v)),
            Expr::Mul(u, v) => Expr::mul(bind(u), bind(v)),
            Expr::Div(u, v) => Expr::div(bind(u), bind(v)),
            Expr::Pow(u, r) => Expr::pow(bind(u), r.clone()),
            Expr::Call(f, u) => Expr::call(*f, bind(u)),
        }
    }

    pub fn uses_param(&self) -> bool {
        match self {
            Expr::Param => true,
            Expr::Const(_) | Expr::X => false,
            Expr::Neg(u) | Expr::Pow(u, _) | Expr::Call(_, u) => u.uses_param(),
            Expr::Add(u, v) | Expr::Sub(u, v) | Expr::Mul(u, v) | Expr::Div(u, v) => {
                u.uses_param() || v.uses_param()
            }
        }
    }

    /// Evaluates at `x` with parameter value `c`.
    pub fn eval(&self, x: &Real, c: Option<&Real>, ctx: &PrecisionContext) -> Result<Real> {
        let value = self.eval_inner(x, c, ctx)?;
        if !value.is_finite() {
            return Err(self.domain("result is not finite"));
        }
        Ok(value)
    }

    fn domain(&self, reason: &str) -> Error {
        Error::Domain {
            expr: self.to_string(),
            reason: reason.to_string(),
        }
    }

    fn eval_inner(&self, x: &Real, c: Option<&Real>, ctx: &PrecisionContext) -> Result<Real> {
        let ev = |e: &Expr| e.eval_inner(x, c, ctx);
        Ok(match self {
            Expr::Const(r) => ctx.real(r),
            Expr::X => ctx.real(x),
            Expr::Param => match c {
                Some(c) => ctx.real(c),
                None => return Err(self.domain("parameter `c` has no value")),
            },
            Expr::Neg(u) => -ev(u)?,
            Expr::Add(u, v) => ev(u)? + ev(v)?,
            Expr::Sub(u, v) => ev(u)? - ev(v)?,
            Expr::Mul(u, v) => ev(u)? * ev(v)?,
            Expr::Div(u, v) => {
                let den = ev(v)?;
                if den.is_zero() {
                    return Err(self.domain("division by zero"));
                }
                ev(u)? / den
            }
            Expr::Pow(u, r) => {
                let base = ev(u)?;
                self.eval_pow(base, r, ctx)?
            }
            Expr::Call(f, u) => {
                let arg = ev(u)?;
                match f {
                    Func::Sqrt => {
                        if arg < 0u32 {
                            return Err(self.domain(&format!(
                                "negative square root argument {}",
                                format_real(&arg, 12)
                            )));
                        }
                        arg.sqrt()
                    }
                    Func::Abs => arg.abs(),
                    Func::Exp => arg.exp(),
                    Func::Log => {
                        if arg <= 0u32 {
                            return Err(self.domain(&format!(
                                "logarithm of non-positive value {}",
                                format_real(&arg, 12)
                            )));
                        }
                        arg.ln()
                    }
                    Func::Sign => {
                        if arg.is_zero() {
                            return Err(self.domain("evaluated exactly at a kink of abs"));
                        }
                        if arg.is_sign_negative() {
                            ctx.real(-1)
                        } else {
                            ctx.one()
                        }
                    }
                }
            }
        })
    }

    fn eval_pow(&self, base: Real, r: &Rational, ctx: &PrecisionContext) -> Result<Real> {
        let numer = r
            .numer()
            .to_i32()
            .ok_or_else(|| self.domain("exponent numerator too large"))?;
        let denom = r
            .denom()
            .to_u32()
            .ok_or_else(|| self.domain("exponent denominator too large"))?;
        if base.is_zero() {
            if numer < 0 {
                return Err(self.domain("zero raised to a negative power"));
            }
            return Ok(ctx.zero());
        }
        let rooted = if denom == 1 {
            base
        } else {
            if base.is_sign_negative() && denom % 2 == 0 {
                return Err(self.domain("even root of a negative value"));
            }
            base.root(denom)
        };
        Ok(Float::with_val(
            ctx.bits(),
            rug::ops::Pow::pow(&rooted, numer),
        ))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(r) if *r.denom() != 1u32 => 2,
            Expr::Const(r) if *r < 0 => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(r) => write!(f, "{r}"),
            Expr::X => f.write_str("x"),
            Expr::Param => f.write_str("c"),
            Expr::Neg(u) => {
                f.write_str("-")?;
                write_operand(f, u, 3)
            }
            Expr::Add(u, v) => {
                write_operand(f, u, 1)?;
                f.write_str(" + ")?;
                write_operand(f, v, 2)
            }
            Expr::Sub(u, v) => {
                write_operand(f, u, 1)?;
                f.write_str(" - ")?;
                write_operand(f, v, 2)
            }
            Expr::Mul(u, v) => {
                write_operand(f, u, 2)?;
                f.write_str("*")?;
                write_operand(f, v, 3)
            }
            Expr::Div(u, v) => {
                write_operand(f, u, 2)?;
                f.write_str("/")?;
                write_operand(f, v, 3)
            }
            Expr::Pow(u, r) => {
                write_operand(f, u, 5)?;
                if *r.denom() == 1u32 && *r > 0 {
                    write!(f, "^{r}")
                } else {
                    write!(f, "^({r})")
                }
            }
            Expr::Call(func, u) => write!(f, "{}({u})", func.name()),
        }
    }
}
