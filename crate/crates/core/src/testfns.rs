//! Anchored log-log test functions used for lower bounds on the logarithmic
//! Bloch space, with their closed-form derivatives.
//!
//! For an anchor `a` in the disk put `L(z) = log log(4 / (1 - conj(a) z))` and
//! `a_n = log log(4 / (1 - |a|^2))`, so that `L(a) = a_n`. The families are
//!
//! * `f = (3/a_n) L^2 - (2/a_n^2) L^3`, with `f(a) = a_n` and `f'(a) = 0`;
//! * `h = L^3 / (conj(a) a_n^2) - L^2 / (conj(a) a_n)`, with `h(a) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticExpr, Expr, Func};
use crate::error::{Error, Result};
use crate::norms::SupSolver;
use crate::weights::weight_vlog;

/// Largest per-anchor slope of `ln ||member||` still read as "no growth".
/// Power growth `k^p` in the ladder index with `p >= 0.15` exceeds it.
pub const FLAT_LOG_SLOPE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    F,
    H,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionFamily {
    pub kind: FamilyKind,
    pub anchor: Complex64,
    pub a_n: f64,
    pub expr: AnalyticExpr,
    /// Closed-form derivative, assembled independently of symbolic differentiation.
    pub expr_deriv: AnalyticExpr,
}

/// `log log(4 / (1 - |a|^2))`.
pub fn anchor_level(anchor: Complex64) -> f64 {
    (4.0 / (1.0 - anchor.norm_sqr())).ln().ln()
}

fn k(c: Complex64) -> Expr {
    Expr::Const(c)
}

fn kr(x: f64) -> Expr {
    k(Complex64::new(x, 0.0))
}

/// `(1 - conj(a) z, log(4 / (1 - conj(a) z)), L(z))`.
fn building_blocks(anchor: Complex64) -> (Expr, Expr, Expr) {
    let one_minus = Expr::sub(kr(1.0), Expr::mul(k(anchor.conj()), Expr::Var));
    let inner_log = Expr::call(Func::Log, Expr::div(kr(4.0), one_minus.clone()));
    let big_l = Expr::call(Func::Log, inner_log.clone());
    (one_minus, inner_log, big_l)
}

fn check_anchor(anchor: Complex64) -> Result<()> {
    if !(anchor.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "anchor must lie in the open unit disk, got {anchor}"
        )));
    }
    Ok(())
}

pub fn build_f(anchor: Complex64) -> Result<TestFunctionFamily> {
    check_anchor(anchor)?;
    let a_n = anchor_level(anchor);
    let (one_minus, inner_log, big_l) = building_blocks(anchor);
    let expr = Expr::sub(
        Expr::mul(kr(3.0 / a_n), Expr::pow(big_l.clone(), 2)),
        Expr::mul(kr(2.0 / (a_n * a_n)), Expr::pow(big_l.clone(), 3)),
    );
    let den = Expr::mul(one_minus, inner_log);
    let ab = anchor.conj();
    let expr_deriv = Expr::sub(
        Expr::div(Expr::mul(k(6.0 * ab / a_n), big_l.clone()), den.clone()),
        Expr::div(Expr::mul(k(6.0 * ab / (a_n * a_n)), Expr::pow(big_l, 2)), den),
    );
    Ok(TestFunctionFamily {
        kind: FamilyKind::F,
        anchor,
        a_n,
        expr: expr.into(),
        expr_deriv: expr_deriv.into(),
    })
}

pub fn build_h(anchor: Complex64) -> Result<TestFunctionFamily> {
    check_anchor(anchor)?;
    if anchor.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "the h family divides by the anchor, which must be nonzero".into(),
        ));
    }
    let a_n = anchor_level(anchor);
    let (one_minus, inner_log, big_l) = building_blocks(anchor);
    let ab = anchor.conj();
    let expr = Expr::sub(
        Expr::mul(k(1.0 / (ab * a_n * a_n)), Expr::pow(big_l.clone(), 3)),
        Expr::mul(k(1.0 / (ab * a_n)), Expr::pow(big_l.clone(), 2)),
    );
    let den = Expr::mul(one_minus, inner_log);
    let expr_deriv = Expr::sub(
        Expr::div(Expr::mul(kr(3.0 / (a_n * a_n)), Expr::pow(big_l.clone(), 2)), den.clone()),
        Expr::div(Expr::mul(kr(2.0 / a_n), big_l), den),
    );
    Ok(TestFunctionFamily {
        kind: FamilyKind::H,
        anchor,
        a_n,
        expr: expr.into(),
        expr_deriv: expr_deriv.into(),
    })
}

pub fn build(kind: FamilyKind, anchor: Complex64) -> Result<TestFunctionFamily> {
    match kind {
        FamilyKind::F => build_f(anchor),
        FamilyKind::H => build_h(anchor),
    }
}

/// `[(1 - |a|^2) log(4 / (1 - |a|^2))]^{-1}`, the value of `h'` at the anchor.
pub fn h_derivative_at_anchor(anchor: Complex64) -> f64 {
    let s = 1.0 - anchor.norm_sqr();
    1.0 / (s * (4.0 / s).ln())
}

/// Real anchors `1 - 2^-k`, `k = 1..=count`.
pub fn geometric_anchors(count: u32) -> Vec<Complex64> {
    (1..=count)
        .map(|k| Complex64::new(1.0 - (-(k as f64)).exp2(), 0.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBoundScan {
    pub kind: FamilyKind,
    pub anchors: Vec<Complex64>,
    pub norms: Vec<f64>,
    pub max: f64,
    /// Least-squares slope of `ln norm` against the anchor index.
    pub log_slope: f64,
    /// `log_slope <= FLAT_LOG_SLOPE` and every norm finite.
    pub no_growth: bool,
    /// Limit `M` of a least-squares fit `M + c / a_n` over the second half of
    /// the ladder; the family level `a_n` grows like a double logarithm, so
    /// the norms approach their bound very slowly.
    pub fitted_limit: Option<f64>,
}

/// Bloch norms (weight `v_log`) of a family along an anchor list.
pub fn uniform_bound_scan(
    solver: &SupSolver,
    kind: FamilyKind,
    anchors: &[Complex64],
) -> Result<UniformBoundScan> {
    let vlog = weight_vlog();
    let norms = anchors
        .iter()
        .map(|&a| Ok(solver.bloch_norm(&vlog, &build(kind, a)?.expr)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let max = norms.iter().copied().fold(0.0, f64::max);
    let log_slope = index_slope(&norms);
    let levels: Vec<f64> = anchors.iter().map(|&a| anchor_level(a)).collect();
    Ok(UniformBoundScan {
        kind,
        anchors: anchors.to_vec(),
        no_growth: log_slope <= FLAT_LOG_SLOPE && norms.iter().all(|v| v.is_finite()),
        fitted_limit: level_fit(&levels, &norms),
        log_slope,
        norms,
        max,
    })
}

fn level_fit(levels: &[f64], norms: &[f64]) -> Option<f64> {
    let start = levels.len() / 2;
    let xs: Vec<f64> = levels[start..].iter().map(|a| 1.0 / a).collect();
    let ys = &norms[start..];
    if xs.len() < 2 {
        return None;
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| my - sxy / sxx * mx)
}

fn index_slope(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = (m - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// `sqrt(log^2(sqrt(log^2(4/x) + 4 pi^2)) + 4 pi^2) / log log(2/x)`, which tends to 1 as `x -> 0+`.
pub fn branch_limit_quotient(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("x must lie in (0, 1), got {x}")));
    }
    let four_pi2 = 4.0 * PI * PI;
    let inner = ((4.0 / x).ln().powi(2) + four_pi2).sqrt();
    let num = (inner.ln().powi(2) + four_pi2).sqrt();
    Ok(num / (2.0 / x).ln().ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchLimitOutcome {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// `|q - 1|` strictly decreases along `xs`.
    pub monotone_approach: bool,
    pub all_at_least_one: bool,
}

/// Evaluates the quotient along decreasing `xs`.
pub fn branch_limit_check(xs: &[f64]) -> Result<BranchLimitOutcome> {
    let values = xs
        .iter()
        .map(|&x| branch_limit_quotient(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(BranchLimitOutcome {
        xs: xs.to_vec(),
        monotone_approach: values.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()),
        all_at_least_one: values.iter().all(|&q| q >= 1.0),
        values,
    })
}

/// `t log(2/t)`.
pub fn h2(t: f64) -> f64 {
    t * (2.0 / t).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Check {
    pub monotone: bool,
    /// First consecutive pair `(t1, t2)` with `h2(t1) >= h2(t2)`.
    pub witness: Option<(f64, f64)>,
}

/// Checks `h2` is strictly increasing on a 10^4-point grid over `(1e-6, 2/e - 1e-6)`.
pub fn h2_monotonicity_check() -> H2Check {
    let lo = 1e-6;
    let hi = 2.0 / std::f64::consts::E - 1e-6;
    let count = 10_000;
    let ts: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    let witness = ts
        .windows(2)
        .find(|w| h2(w[0]) >= h2(w[1]))
        .map(|w| (w[0], w[1]));
    H2Check {
        monotone: witness.is_none(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn anchor_identities_for_f() {
        for a in [re(0.5), re(0.9), re(0.99), Complex64::new(0.0, 0.9), re(-0.95)] {
            let fam = build_f(a).unwrap();
            let fa = fam.expr.eval(a).unwrap();
            assert!((fa - fam.a_n).norm() <= 1e-8, "{a}: {fa} vs {}", fam.a_n);
            assert!(fam.expr.derivative().eval(a).unwrap().norm() <= 1e-8);
            assert!(fam.expr_deriv.eval(a).unwrap().norm() <= 1e-8);
        }
    }

    #[test]
    fn level_at_point_nine() {
        // log log(4 / 0.19), evaluated in extended precision
        assert!((anchor_level(re(0.9)) - 1.114_165_891_153_644).abs() < 1e-12);
    }

    #[test]
    fn anchor_identities_for_h() {
        let a = re(0.9);
        let fam = build_h(a).unwrap();
        assert!(fam.expr.eval(a).unwrap().norm() <= 1e-12);
        let want = h_derivative_at_anchor(a);
        assert!((want - 1.727_310_052_8).abs() < 1e-9);
        assert!((fam.expr.derivative().eval(a).unwrap() - want).norm() <= 1e-8);
        assert!((fam.expr_deriv.eval(a).unwrap() - want).norm() <= 1e-8);
    }

    #[test]
    fn bad_anchors_are_refused() {
        assert!(build_f(re(1.0)).is_err());
        assert!(build_h(re(0.0)).is_err());
        assert!(build_h(Complex64::new(0.6, 0.8)).is_err());
        assert!(build_f(re(0.0)).is_ok());
    }

    #[test]
    fn branch_quotient_approaches_one_from_above() {
        let out = branch_limit_check(&[1e-3, 1e-6, 1e-9, 1e-12]).unwrap();
        assert!(out.monotone_approach);
        assert!(out.all_at_least_one);
        assert!((out.values[0] - 3.306_07).abs() < 1e-4);
        assert!((out.values[3] - 2.135_27).abs() < 1e-4);
        assert!(branch_limit_quotient(0.0).is_err());
    }

    #[test]
    fn h2_shape() {
        assert!(h2_monotonicity_check().monotone);
        let two_over_e = 2.0 / std::f64::consts::E;
        assert!((h2(two_over_e) - two_over_e).abs() < 1e-15);
        assert!(h2(two_over_e) > h2(two_over_e * 0.999));
        assert!(h2(two_over_e) > h2(two_over_e * 1.001));
    }

    #[test]
    fn geometric_anchor_list() {
        let a = geometric_anchors(3);
        assert_eq!(a, vec![re(0.5), re(0.75), re(0.875)]);
    }
}
