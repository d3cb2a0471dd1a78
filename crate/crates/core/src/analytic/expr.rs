//! Expression tree, constant-folding constructors, canonical printer and
//! symbolic differentiation.

use std::fmt;

use num_complex::Complex64;

use super::eval::{cpowi, is_finite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    /// Principal branches throughout.
    pub fn apply(self, x: Complex64) -> Complex64 {
        match self {
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

fn c(re: f64) -> Expr {
    Expr::Const(Complex64::new(re, 0.0))
}

impl Expr {
    pub fn constant(value: Complex64) -> Expr {
        Expr::Const(value)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    fn is_value(&self, v: f64) -> bool {
        matches!(self, Expr::Const(x) if *x == Complex64::new(v, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.is_value(0.0)
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
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
            (a, b) if a.is_zero() || b.is_zero() => c(0.0),
            (a, b) if a.is_value(1.0) => b,
            (a, b) if b.is_value(1.0) => a,
            // constants gather on the left: k1 * (k2 * x) -> (k1 k2) * x
            (Expr::Const(x), Expr::Mul(l, r)) if l.as_const().is_some() => {
                Expr::mul(Expr::Const(x * l.as_const().unwrap()), *r)
            }
            (a, Expr::Const(y)) => Expr::mul(Expr::Const(y), a),
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if y != Complex64::new(0.0, 0.0) => {
                Expr::Const(x / y)
            }
            (a, _) if a.is_zero() => c(0.0),
            (a, b) if b.is_value(1.0) => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (a, n) {
            (_, 0) => c(1.0),
            (a, 1) => a,
            (Expr::Const(x), n) if n > 0 || x != Complex64::new(0.0, 0.0) => {
                Expr::Const(cpowi(x, n))
            }
            (a, n) => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        if let Expr::Const(x) = a {
            let y = f.apply(x);
            if is_finite(y) {
                return Expr::Const(y);
            }
        }
        Expr::Call(f, Box::new(a))
    }

    /// Exact symbolic derivative with respect to `z`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => c(0.0),
            Expr::Var => c(1.0),
            Expr::Neg(a) => Expr::neg(a.derivative()),
            Expr::Add(a, b) => Expr::add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => Expr::sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative();
                let db = b.derivative();
                if db.is_zero() {
                    Expr::div(da, (**b).clone())
                } else {
                    Expr::div(
                        Expr::sub(
                            Expr::mul(da, (**b).clone()),
                            Expr::mul((**a).clone(), db),
                        ),
                        Expr::pow((**b).clone(), 2),
                    )
                }
            }
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(c(*n as f64), Expr::pow((**a).clone(), n - 1)),
                a.derivative(),
            ),
            Expr::Call(f, a) => {
                let inner = (**a).clone();
                let da = a.derivative();
                let outer = match f {
                    Func::Exp => Expr::call(Func::Exp, inner),
                    Func::Log => return Expr::div(da, inner),
                    Func::Sqrt => {
                        return Expr::div(da, Expr::mul(c(2.0), Expr::call(Func::Sqrt, inner)))
                    }
                    Func::Sin => Expr::call(Func::Cos, inner),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, inner)),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Replaces every occurrence of `z` by `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Var => inner.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(inner)),
            Expr::Add(a, b) => Expr::add(a.substitute(inner), b.substitute(inner)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(inner), b.substitute(inner)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(inner), b.substitute(inner)),
            Expr::Div(a, b) => Expr::div(a.substitute(inner), b.substitute(inner)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(inner), *n),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(inner)),
        }
    }

    /// Visits every node in pre-order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(v) if v.im != 0.0 && v.re != 0.0 => 1,
            Expr::Const(v) if v.re.is_sign_negative() || v.im.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn starts_with_minus(&self) -> bool {
        match self {
            Expr::Neg(_) => true,
            Expr::Const(v) => {
                if v.re != 0.0 || v.im == 0.0 {
                    v.re.is_sign_negative()
                } else {
                    v.im.is_sign_negative()
                }
            }
            _ => false,
        }
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // Debug formatting is the shortest representation that round-trips.
    write!(f, "{x:?}")
}

fn write_const(f: &mut fmt::Formatter<'_>, v: Complex64) -> fmt::Result {
    if v.im == 0.0 {
        return write_real(f, v.re);
    }
    if v.re != 0.0 {
        write_real(f, v.re)?;
        f.write_str(if v.im.is_sign_negative() { " - " } else { " + " })?;
        write_real(f, v.im.abs())?;
        return f.write_str("i");
    }
    if v.im.is_sign_negative() {
        f.write_str("-")?;
    }
    write_real(f, v.im.abs())?;
    f.write_str("i")
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_rhs(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec || e.starts_with_minus() {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write_const(f, *v),
            Expr::Var => f.write_str("z"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_rhs(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_rhs(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_rhs(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_rhs(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_rhs(f, b, 4)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
