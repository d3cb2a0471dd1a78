//! Register tape compiled from an expression tree. Identical subtrees share a
//! register, and evaluation runs one instruction at a time over a whole batch
//! of points so the dispatch cost is paid once per row of a grid.

use std::collections::HashMap;

use num_complex::Complex64;

use super::expr::{Expr, Func};
use crate::error::{Error, Result};

pub(crate) fn is_finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Integer power by repeated squaring.
pub(crate) fn cpowi(x: Complex64, n: i32) -> Complex64 {
    let mut e = n.unsigned_abs();
    let mut base = x;
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base = base * base;
        }
    }
    if n < 0 {
        acc.inv()
    } else {
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Instr {
    Const(u64, u64),
    Var,
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, i32),
    Call(Func, usize),
}

#[derive(Debug, Clone)]
pub struct Tape {
    instrs: Vec<Instr>,
}

impl Tape {
    pub fn compile(expr: &Expr) -> Tape {
        let mut builder = Builder::default();
        builder.emit(expr);
        Tape {
            instrs: builder.instrs,
        }
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Evaluates at every point of `zs`, writing into `out`. Non-finite
    /// results are reported as a singularity at the first offending point.
    pub fn eval_batch(&self, zs: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let m = zs.len();
        debug_assert_eq!(out.len(), m);
        let mut regs = vec![Complex64::new(0.0, 0.0); self.instrs.len() * m];
        for (k, instr) in self.instrs.iter().enumerate() {
            let (done, rest) = regs.split_at_mut(k * m);
            let dst = &mut rest[..m];
            let reg = |i: usize| &done[i * m..(i + 1) * m];
            match *instr {
                Instr::Const(re, im) => {
                    dst.fill(Complex64::new(f64::from_bits(re), f64::from_bits(im)))
                }
                Instr::Var => dst.copy_from_slice(zs),
                Instr::Neg(a) => {
                    for (d, x) in dst.iter_mut().zip(reg(a)) {
                        *d = -x;
                    }
                }
                Instr::Add(a, b) => {
                    for ((d, x), y) in dst.iter_mut().zip(reg(a)).zip(reg(b)) {
                        *d = x + y;
                    }
                }
                Instr::Sub(a, b) => {
                    for ((d, x), y) in dst.iter_mut().zip(reg(a)).zip(reg(b)) {
                        *d = x - y;
                    }
                }
                Instr::Mul(a, b) => {
                    for ((d, x), y) in dst.iter_mut().zip(reg(a)).zip(reg(b)) {
                        *d = x * y;
                    }
                }
                Instr::Div(a, b) => {
                    for ((d, x), y) in dst.iter_mut().zip(reg(a)).zip(reg(b)) {
                        *d = x / y;
                    }
                }
                Instr::Pow(a, n) => {
                    for (d, x) in dst.iter_mut().zip(reg(a)) {
                        *d = cpowi(*x, n);
                    }
                }
                Instr::Call(f, a) => {
                    for (d, x) in dst.iter_mut().zip(reg(a)) {
                        *d = f.apply(*x);
                    }
                }
            }
        }
        let last = &regs[(self.instrs.len() - 1) * m..];
        for (i, v) in last.iter().enumerate() {
            if !is_finite(*v) {
                return Err(Error::Singularity {
                    z: zs[i],
                    detail: format!("non-finite value {v}"),
                });
            }
        }
        out.copy_from_slice(last);
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut out = [Complex64::new(0.0, 0.0)];
        self.eval_batch(&[z], &mut out)?;
        Ok(out[0])
    }
}

#[derive(Default)]
struct Builder {
    instrs: Vec<Instr>,
    index: HashMap<Instr, usize>,
}

impl Builder {
    fn push(&mut self, instr: Instr) -> usize {
        if let Some(&slot) = self.index.get(&instr) {
            return slot;
        }
        self.instrs.push(instr);
        let slot = self.instrs.len() - 1;
        self.index.insert(instr, slot);
        slot
    }

    fn emit(&mut self, e: &Expr) -> usize {
        let instr = match e {
            Expr::Const(v) => Instr::Const(v.re.to_bits(), v.im.to_bits()),
            Expr::Var => Instr::Var,
            Expr::Neg(a) => Instr::Neg(self.emit(a)),
            Expr::Add(a, b) => Instr::Add(self.emit(a), self.emit(b)),
            Expr::Sub(a, b) => Instr::Sub(self.emit(a), self.emit(b)),
            Expr::Mul(a, b) => Instr::Mul(self.emit(a), self.emit(b)),
            Expr::Div(a, b) => Instr::Div(self.emit(a), self.emit(b)),
            Expr::Pow(a, n) => Instr::Pow(self.emit(a), *n),
            Expr::Call(f, a) => Instr::Call(*f, self.emit(a)),
        };
        self.push(instr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpowi_matches_repeated_multiplication() {
        let x = Complex64::new(0.3, -0.7);
        let mut acc = Complex64::new(1.0, 0.0);
        for n in 0..20 {
            assert!((cpowi(x, n) - acc).norm() <= 1e-15);
            acc *= x;
        }
        assert!((cpowi(x, -2) * x * x - 1.0).norm() < 1e-14);
    }

    #[test]
    fn shared_subtrees_compile_once() {
        let phi = Expr::div(
            Expr::add(Expr::Var, Expr::constant(Complex64::new(0.5, 0.0))),
            Expr::add(
                Expr::constant(Complex64::new(1.0, 0.0)),
                Expr::mul(Expr::constant(Complex64::new(0.5, 0.0)), Expr::Var),
            ),
        );
        let e = Expr::mul(phi.clone(), phi.clone());
        let solo = Tape::compile(&phi).len();
        assert_eq!(Tape::compile(&e).len(), solo + 1);
    }

    #[test]
    fn pole_is_reported_with_location() {
        let e = Expr::div(
            Expr::constant(Complex64::new(1.0, 0.0)),
            Expr::sub(Expr::Var, Expr::constant(Complex64::new(0.5, 0.0))),
        );
        let err = Tape::compile(&e).eval(Complex64::new(0.5, 0.0)).unwrap_err();
        match err {
            Error::Singularity { z, .. } => assert_eq!(z, Complex64::new(0.5, 0.0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
