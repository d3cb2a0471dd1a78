//! Validated symbol pairs `(u, phi)` with `phi` a holomorphic self-map.

use num_complex::Complex64;

use super::{AnalyticExpr, Expr, Func};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::norms::{RowObjective, SupSolver};

/// Accepted excess of `sup |phi|` over 1.
pub const SELF_MAP_SLACK: f64 = 1e-9;
/// Distance to a pole or branch cut below which a symbol is refused.
pub const SINGULAR_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfMapCheck {
    pub phi_sup: f64,
    pub witness: Complex64,
    pub on_clamp: bool,
}

/// Estimates `sup |phi|` over the clamped disk and accepts iff it is at most
/// `1 + 1e-9`. A unimodular constant is refused too.
pub fn validate_self_map(phi: &AnalyticExpr, grid: GridSpec) -> Result<SelfMapCheck> {
    if let Some(c) = phi.as_const() {
        if c.norm() >= 1.0 {
            return Err(Error::NotSelfMap {
                witness: Complex64::new(0.0, 0.0),
                modulus: c.norm(),
            });
        }
    }
    let res = SupSolver::new(grid).sup_modulus(phi)?;
    if res.value > 1.0 + SELF_MAP_SLACK {
        return Err(Error::NotSelfMap {
            witness: res.argmax,
            modulus: res.value,
        });
    }
    Ok(SelfMapCheck {
        phi_sup: res.value,
        witness: res.argmax,
        on_clamp: res.on_clamp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hazard {
    Pole,
    BranchCut,
}

/// Negated distance of a sub-expression to its forbidden set.
struct HazardDistance<'a> {
    arg: &'a AnalyticExpr,
    hazard: Hazard,
}

impl RowObjective for HazardDistance<'_> {
    fn eval_row(&self, _gap: f64, zs: &[Complex64], out: &mut [f64]) -> Result<()> {
        let mut vals = vec![Complex64::new(0.0, 0.0); zs.len()];
        self.arg.eval_batch(zs, &mut vals)?;
        for (o, w) in out.iter_mut().zip(&vals) {
            *o = -match self.hazard {
                Hazard::Pole => w.norm(),
                Hazard::BranchCut if w.re >= 0.0 => w.norm(),
                Hazard::BranchCut => w.im.abs(),
            };
        }
        Ok(())
    }
}

fn hazards(expr: &Expr) -> Vec<(Expr, Hazard)> {
    let mut found: Vec<(Expr, Hazard)> = Vec::new();
    expr.visit(&mut |e| {
        let item = match e {
            Expr::Div(_, den) => Some(((**den).clone(), Hazard::Pole)),
            Expr::Pow(base, n) if *n < 0 => Some(((**base).clone(), Hazard::Pole)),
            Expr::Call(Func::Log | Func::Sqrt, arg) => Some(((**arg).clone(), Hazard::BranchCut)),
            _ => None,
        };
        if let Some(item) = item {
            if item.0.as_const().is_none() && !found.contains(&item) {
                found.push(item);
            }
        }
    });
    found
}

/// Refuses `f` when a denominator vanishes or a log/sqrt argument meets
/// `(-inf, 0]` inside the clamped disk.
pub(crate) fn check_holomorphic(name: &str, f: &AnalyticExpr, grid: GridSpec) -> Result<()> {
    let refuse = |detail: String, witness| Error::NotHolomorphic {
        symbol: name.to_owned(),
        detail,
        witness,
    };
    let solver = SupSolver::new(grid);
    let as_refusal = |e: Error| match e {
        Error::Singularity { z, detail } => refuse(detail, z),
        other => other,
    };
    for (arg, hazard) in hazards(f.expr()) {
        let arg = AnalyticExpr::from(arg);
        let res = solver
            .maximize(&HazardDistance { arg: &arg, hazard })
            .map_err(as_refusal)?;
        let distance = -res.value;
        if distance <= SINGULAR_DISTANCE {
            let what = match hazard {
                Hazard::Pole => format!("denominator `{arg}` vanishes"),
                Hazard::BranchCut => format!("argument `{arg}` meets the branch cut"),
            };
            return Err(refuse(what, res.argmax));
        }
    }
    // a final sweep catches overflow and anything the scans could not name
    solver.sup_modulus(f).map_err(as_refusal)?;
    solver.sup_modulus(&f.derivative()).map_err(as_refusal)?;
    Ok(())
}

/// A validated pair: `u` holomorphic, `phi` a holomorphic self-map.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPair {
    pub u: AnalyticExpr,
    pub phi: AnalyticExpr,
    pub du: AnalyticExpr,
    pub dphi: AnalyticExpr,
    pub phi_sup: f64,
}

impl SymbolPair {
    pub fn new(u: AnalyticExpr, phi: AnalyticExpr, grid: GridSpec) -> Result<SymbolPair> {
        check_holomorphic("u", &u, grid)?;
        check_holomorphic("phi", &phi, grid)?;
        let check = validate_self_map(&phi, grid)?;
        Ok(SymbolPair {
            du: u.derivative(),
            dphi: phi.derivative(),
            u,
            phi,
            phi_sup: check.phi_sup,
        })
    }

    pub fn parse(u: &str, phi: &str, grid: GridSpec) -> Result<SymbolPair> {
        SymbolPair::new(AnalyticExpr::parse(u)?, AnalyticExpr::parse(phi)?, grid)
    }
}
