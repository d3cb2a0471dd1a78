//! Zygmund-type norms and the reduction of `C_phi` on the logarithmic Zygmund
//! space to `W_{phi', phi}` on the logarithmic Bloch space.
//!
//! The primed functionals satisfy `(J'_u f)'' = f u'` and `(I'_u f)'' = f' u`
//! and vanish to first order at 0, so their Zygmund norms are single weighted
//! sups of closed-form expressions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticExpr, SymbolPair};
use crate::error::{Error, Result};
use crate::norms::{NormParts, NormValue, Space, SupSolver};
use crate::operators::{analyze, n_schedule, AnalysisReport, OperatorConfig, SeriesPair};
use crate::weights::{weight_vlog, weight_wlog, Weight};

/// `|f(0)| + |f'(0)| + sup v |f''|`.
pub fn zygmund_norm(solver: &SupSolver, v: &Weight, f: &AnalyticExpr) -> Result<NormValue> {
    let zero = Complex64::new(0.0, 0.0);
    let d1 = f.derivative();
    let sup = solver.weighted_sup(v, &d1.derivative())?.value;
    Ok(NormValue::from_parts(
        Space::Zygmund,
        v,
        NormParts {
            at_zero: Some(f.eval(zero)?.norm()),
            derivative_at_zero: Some(d1.eval(zero)?.norm()),
            sup,
        },
    ))
}

/// `sup v |f''|`.
pub fn zygmund_seminorm(solver: &SupSolver, v: &Weight, f: &AnalyticExpr) -> Result<NormValue> {
    let sup = solver.weighted_sup(v, &f.derivative().derivative())?.value;
    Ok(NormValue::from_parts(
        Space::ZygmundSeminorm,
        v,
        NormParts {
            at_zero: None,
            derivative_at_zero: None,
            sup,
        },
    ))
}

/// `(n+1) ||J'_{phi'}(phi^n)||_{Z^{v_log}} / (||g_{n+2}||_{Z^{w_log}} / (n+2))`.
pub fn primed_j_ratio(solver: &SupSolver, phi: &AnalyticExpr, n: u32) -> Result<f64> {
    let second = phi.power(n).mul(&phi.derivative().derivative());
    if second.is_zero() {
        return Ok(0.0);
    }
    let num = solver.weighted_sup(&weight_vlog(), &second)?.value;
    let den = solver.monomial_zygmund_norm(&weight_wlog(), n + 2)? / (n + 2) as f64;
    Ok((n + 1) as f64 * num / den)
}

/// `||I'_{phi'}(phi^n)||_{Z^{v_log}} / (||g_{n+1}||_{Z^{v_log}} / (n+1))`, `n >= 1`.
pub fn primed_i_ratio(solver: &SupSolver, phi: &AnalyticExpr, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("the primed I functional needs n >= 1".into()));
    }
    let second = phi.power(n).derivative().mul(&phi.derivative());
    if second.is_zero() {
        return Ok(0.0);
    }
    let num = solver.weighted_sup(&weight_vlog(), &second)?.value;
    let den = solver.monomial_zygmund_norm(&weight_vlog(), n + 1)? / (n + 1) as f64;
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimedSeries {
    pub n_values: Vec<u32>,
    pub j: Vec<f64>,
    /// Starts at `n = 1`.
    pub i: Vec<f64>,
    /// Largest relative gap to the unprimed J-ratios of `(phi', phi)`.
    pub max_dev_j: f64,
    pub max_dev_i: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CphiReport {
    pub report: AnalysisReport,
    pub primed: PrimedSeries,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Primed ratios over the schedule, compared against `series`.
pub fn primed_series(
    solver: &SupSolver,
    phi: &AnalyticExpr,
    series: &SeriesPair,
    nmax: u32,
    tol: f64,
) -> Result<PrimedSeries> {
    let ns = n_schedule(nmax);
    let mut j = Vec::with_capacity(ns.len());
    let mut i = Vec::with_capacity(ns.len());
    for &n in &ns {
        j.push(primed_j_ratio(solver, phi, n)?);
        if n >= 1 {
            i.push(primed_i_ratio(solver, phi, n)?);
        }
    }
    let max_dev_j = j
        .iter()
        .zip(&series.j.ratios)
        .map(|(&a, &b)| rel_dev(a, b))
        .fold(0.0, f64::max);
    let max_dev_i = i
        .iter()
        .zip(&series.i.ratios)
        .map(|(&a, &b)| rel_dev(a, b))
        .fold(0.0, f64::max);
    Ok(PrimedSeries {
        n_values: ns,
        agree: max_dev_j <= tol && max_dev_i <= tol,
        j,
        i,
        max_dev_j,
        max_dev_i,
    })
}

/// Analysis of `C_phi` on the logarithmic Zygmund space through `W_{phi', phi}`.
pub fn cphi_analysis(phi: &AnalyticExpr, cfg: &OperatorConfig) -> Result<CphiReport> {
    cfg.validate()?;
    let pair = SymbolPair::new(phi.derivative(), phi.clone(), cfg.grid)?;
    let report = analyze(&pair, cfg)?;
    let primed = primed_series(&cfg.solver(), phi, &report.series, cfg.nmax, cfg.tol)?;
    Ok(CphiReport { report, primed })
}
