//! Analytic expressions in one complex variable `z` on the unit disk.

mod eval;
mod expr;
mod parse;
mod symbols;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

pub use eval::Tape;
pub use expr::{Expr, Func};
pub use parse::{ParseError, ParseErrorKind};
pub use symbols::{validate_self_map, SelfMapCheck, SymbolPair};

use crate::error::{Error, Result};

/// Immutable expression with a lazily compiled evaluation tape.
#[derive(Clone)]
pub struct AnalyticExpr {
    expr: Arc<Expr>,
    tape: Arc<OnceLock<Tape>>,
}

impl fmt::Debug for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticExpr({})", self.expr)
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl PartialEq for AnalyticExpr {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl From<Expr> for AnalyticExpr {
    fn from(expr: Expr) -> Self {
        AnalyticExpr {
            expr: Arc::new(expr),
            tape: Arc::new(OnceLock::new()),
        }
    }
}

impl std::str::FromStr for AnalyticExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse::parse_expr(s).map(AnalyticExpr::from)
    }
}

impl AnalyticExpr {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        text.parse()
    }

    pub fn constant(value: Complex64) -> Self {
        Expr::Const(value).into()
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    pub fn z() -> Self {
        Expr::Var.into()
    }

    /// The monomial `z^n`, with `g_0 = 1`.
    pub fn monomial(n: u32) -> Self {
        Expr::pow(Expr::Var, n as i32).into()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn as_const(&self) -> Option<Complex64> {
        self.expr.as_const()
    }

    /// True when the expression folded to the constant zero.
    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    pub fn tape(&self) -> &Tape {
        self.tape.get_or_init(|| Tape::compile(&self.expr))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.tape().eval(z)
    }

    pub fn eval_batch(&self, zs: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.tape().eval_batch(zs, out)
    }

    pub fn derivative(&self) -> Self {
        self.expr.derivative().into()
    }

    /// `f^n`, evaluated as a value power (never expanded).
    pub fn power(&self, n: u32) -> Self {
        Expr::pow((*self.expr).clone(), n as i32).into()
    }

    /// `z -> f(r z)` for `0 < r < 1`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "dilation radius must lie in (0, 1), got {r}"
            )));
        }
        let inner = Expr::mul(Expr::Const(Complex64::new(r, 0.0)), Expr::Var);
        Ok(self.expr.substitute(&inner).into())
    }

    /// `z -> self(inner(z))`.
    pub fn compose(&self, inner: &AnalyticExpr) -> Self {
        self.expr.substitute(&inner.expr).into()
    }

    pub fn mul(&self, other: &AnalyticExpr) -> Self {
        Expr::mul((*self.expr).clone(), (*other.expr).clone()).into()
    }

    pub fn add(&self, other: &AnalyticExpr) -> Self {
        Expr::add((*self.expr).clone(), (*other.expr).clone()).into()
    }

    pub fn sub(&self, other: &AnalyticExpr) -> Self {
        Expr::sub((*self.expr).clone(), (*other.expr).clone()).into()
    }

    pub fn div(&self, other: &AnalyticExpr) -> Self {
        Expr::div((*self.expr).clone(), (*other.expr).clone()).into()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Expr::mul(Expr::Const(c), (*self.expr).clone()).into()
    }

    pub fn apply(&self, f: Func) -> Self {
        Expr::call(f, (*self.expr).clone()).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> AnalyticExpr {
        AnalyticExpr::parse(s).unwrap()
    }

    #[test]
    fn monomial_parses() {
        assert_eq!(p("z^2"), AnalyticExpr::monomial(2));
        assert_eq!(AnalyticExpr::monomial(0).as_const(), Some(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn power_rule() {
        assert_eq!(p("z^3").derivative(), p("3*z^2"));
        assert_eq!(p("z").derivative(), p("1"));
        for n in 2..40u32 {
            let want = Expr::mul(
                Expr::Const(Complex64::new(n as f64, 0.0)),
                Expr::pow(Expr::Var, n as i32 - 1),
            );
            assert_eq!(AnalyticExpr::monomial(n).derivative().expr(), &want);
        }
    }

    #[test]
    fn chain_rule_through_log() {
        assert_eq!(p("log(1 - 0.5*z)").derivative(), p("-0.5/(1 - 0.5*z)"));
    }

    #[test]
    fn power_evaluates_by_value() {
        let v = p("z").power(5).eval(Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(0.03125, 0.0));
        let f = p("exp(z) + 1/(2 - z)");
        assert_eq!(f.power(0).eval(Complex64::new(0.3, 0.4)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn derivative_of_power_is_chain_rule() {
        let phi = p("(z + 0.5)/(1 + 0.5*z)");
        let dphi = phi.derivative();
        for n in [1u32, 2, 7, 40] {
            let lhs = phi.power(n).derivative();
            for z in [Complex64::new(0.3, -0.2), Complex64::new(-0.7, 0.5)] {
                let got = lhs.eval(z).unwrap();
                let want = (n as f64)
                    * phi.eval(z).unwrap().powu(n - 1)
                    * dphi.eval(z).unwrap();
                assert!((got - want).norm() <= 1e-10 * (1.0 + want.norm()), "{n} {z}");
            }
        }
    }

    #[test]
    fn dilation() {
        let g2 = AnalyticExpr::monomial(2);
        let d = g2.dilate(0.5).unwrap();
        let v = d.eval(Complex64::new(1.0 - 1e-9, 0.0)).unwrap();
        assert!((v.re - 0.25).abs() < 1e-8);
        let one = AnalyticExpr::monomial(0);
        assert_eq!(one.dilate(0.3).unwrap(), one);
        assert!(g2.dilate(1.0).is_err());
        assert!(g2.dilate(0.0).is_err());
        assert!(g2.dilate(-0.5).is_err());
    }

    #[test]
    fn dilation_converges_on_compacta() {
        let f = p("exp(z)");
        let fr = f.dilate(1.0 - 1e-4).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=30 {
            for j in 0..64 {
                let r = 0.9 * k as f64 / 30.0;
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0);
                worst = worst.max((fr.eval(z).unwrap() - f.eval(z).unwrap()).norm());
            }
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn printer_round_trips() {
        for s in [
            "z^2",
            "(z + 0.5)/(1 + 0.5*z)",
            "-z^2 + 3*z - (1 + 2i)",
            "exp(-z)*log(4/(1 - (0.25 - 0.5i)*z))^3",
            "sqrt(2 + z)/(z - 2)^-2",
            "sin(z)*cos(z/3) - 1e-20*z",
            "-(z*z)",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
    }
}
