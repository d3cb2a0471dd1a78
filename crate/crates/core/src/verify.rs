//! Built-in verification suites: weights, test functions and the norm
//! identities, each reported as a list of named pass/fail checks.

use std::f64::consts::{E, LN_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::analytic::{AnalyticExpr, SymbolPair};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::norms::{monomial_growth_norm, SupSolver};
use crate::operators::{i_ratio, i_ratio_reduced, j_ratio, j_ratio_reduced};
use crate::optimize::golden_section_max;
use crate::testfns::{
    branch_limit_check, build_f, build_h, geometric_anchors, h2, h2_monotonicity_check,
    h_derivative_at_anchor, uniform_bound_scan, FamilyKind,
};
use crate::weights::{
    associated_weight, weight_equivalence_band, weight_v3, weight_vlog, weight_wlog, Weight, WeightId,
};
use crate::zygmund::{primed_i_ratio, primed_j_ratio, zygmund_seminorm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Weights,
    Testfns,
    Identities,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "all" => Ok(Suite::All),
            "weights" => Ok(Suite::Weights),
            "testfns" => Ok(Suite::Testfns),
            "identities" => Ok(Suite::Identities),
            _ => Err(Error::InvalidArgument(format!(
                "unknown suite `{s}`, expected all, weights, testfns or identities"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:<10} {:<44} {}", self.suite, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub grid: GridSpec,
    pub anchors: Vec<Complex64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: GridSpec::default(),
            anchors: geometric_anchors(20),
            seed: 7,
        }
    }
}

/// Parses `geometric:K` (anchors `1 - 2^-k`, `k = 1..=K`) or `list:a,b,...`
/// with entries in the expression grammar, e.g. `list:0.5,0.9i`.
pub fn parse_anchor_spec(spec: &str) -> Result<Vec<Complex64>> {
    let bad = || Error::InvalidArgument(format!("anchors must look like geometric:20 or list:0.5,0.9i, got `{spec}`"));
    let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "geometric" => {
            let k: u32 = rest.trim().parse().map_err(|_| bad())?;
            if k == 0 || k > 40 {
                return Err(Error::InvalidArgument("geometric anchor count must be in 1..=40".into()));
            }
            Ok(geometric_anchors(k))
        }
        "list" => rest
            .split(',')
            .map(|item| AnalyticExpr::parse(item.trim())?.as_const().ok_or_else(bad))
            .collect(),
        _ => Err(bad()),
    }
}

/// `count` points uniform in the disk of radius `rmax`.
pub fn random_interior_points(rng: &mut impl Rng, count: usize, rmax: f64) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let r = rmax * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, TAU * rng.gen::<f64>())
        })
        .collect()
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Weights) {
        out.extend(weights_suite(opts)?);
    }
    if matches!(suite, Suite::All | Suite::Testfns) {
        out.extend(testfns_suite(opts)?);
    }
    if matches!(suite, Suite::All | Suite::Identities) {
        out.extend(identities_suite(opts)?);
    }
    Ok(out)
}

fn check(suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        suite,
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn weights_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    const S: &str = "weights";
    let mut out = Vec::new();
    for id in WeightId::ALL {
        let w = id.weight();
        let res = w.self_test();
        out.push(check(
            S,
            format!("{id} flags and positivity"),
            res.is_ok(),
            res.err().unwrap_or_else(|| {
                format!("typical={} decreasing={}", w.typical, w.decreasing)
            }),
        ));
    }
    let vlog = weight_vlog();
    let (t, peak) = golden_section_max(|t| Ok::<f64, Error>(vlog.eval_gap(t)), 1e-12, 1.0, 1e-13)?;
    out.push(check(
        S,
        "v_log peak 2/e at r = 1 - 2/e",
        (peak - 2.0 / E).abs() < 1e-12 && (t - 2.0 / E).abs() < 1e-6,
        format!("peak {peak:.12} at gap {t:.9}"),
    ));
    let m0 = monomial_growth_norm(&vlog, 0);
    out.push(check(S, "||g_0|| in H_{v_log} = 2/e", (m0 - 2.0 / E).abs() < 1e-6, format!("{m0:.12}")));

    let radii = opts.grid.radii();
    let (lo, hi) = weight_equivalence_band(&vlog, &weight_v3(), &radii)?;
    let want_lo = LN_2 / 3f64.ln();
    out.push(check(
        S,
        "v_log / v_3 band",
        lo >= want_lo - 1e-3 && hi <= 1.0 + 1e-3,
        format!("[{lo:.6}, {hi:.6}], expected within [{:.6}, 1]", want_lo),
    ));

    let wlog = weight_wlog();
    let (bands, fine_band) = associated_band_study(&wlog, opts.grid)?;
    let stable = |a: (f64, f64), b: (f64, f64)| {
        agree_to_digits(a.0, b.0, 3) && agree_to_digits(a.1, b.1, 3)
    };
    out.push(check(
        S,
        "associated w_log band stable",
        bands[0].0 >= 1.0 - 1e-12 && stable(bands[0], bands[1]) && stable(bands[1], fine_band),
        format!(
            "nmax 200 [{:.6}, {:.6}], nmax 400 [{:.6}, {:.6}], refined grid [{:.6}, {:.6}]",
            bands[0].0, bands[0].1, bands[1].0, bands[1].1, fine_band.0, fine_band.1
        ),
    ));
    Ok(out)
}

/// Smallest family size in the stability study; radii closer to the boundary
/// than `1 / ASSOC_NMAX_SMALL` lie beyond what the estimate can represent.
pub const ASSOC_NMAX_SMALL: usize = 200;

/// Bands of the associated-weight estimate against `base` for nmax 200 and
/// 400 on the grid radii, and for nmax 400 on the refined grid. Radii are
/// restricted to `1 - r >= 1/200`.
pub fn associated_band_study(base: &Weight, grid: GridSpec) -> Result<([(f64, f64); 2], (f64, f64))> {
    let within = |g: GridSpec| -> Vec<f64> {
        g.radii()
            .into_iter()
            .filter(|r| (1.0 - r) * ASSOC_NMAX_SMALL as f64 >= 1.0)
            .collect()
    };
    let radii = within(grid);
    let small = associated_weight(base, ASSOC_NMAX_SMALL)?.as_weight();
    let large = associated_weight(base, 2 * ASSOC_NMAX_SMALL)?.as_weight();
    Ok((
        [
            weight_equivalence_band(&small, base, &radii)?,
            weight_equivalence_band(&large, base, &radii)?,
        ],
        weight_equivalence_band(&large, base, &within(grid.doubled()))?,
    ))
}

/// `a` and `b` agree to within half a unit in the `digits`-th significant digit of `b`.
pub fn agree_to_digits(a: f64, b: f64, digits: i32) -> bool {
    let unit = 10f64.powi(b.abs().log10().floor() as i32 - (digits - 1));
    (a - b).abs() <= 0.5 * unit
}

pub fn testfns_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    const S: &str = "testfns";
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut worst_f = (0.0f64, 0.0f64);
    let mut worst_h = (0.0f64, 0.0f64);
    let mut worst_closed = 0.0f64;
    for &a in &opts.anchors {
        let f = build_f(a)?;
        worst_f.0 = worst_f.0.max((f.expr.eval(a)? - f.a_n).norm());
        worst_f.1 = worst_f.1.max(f.expr.derivative().eval(a)?.norm());
        let h = build_h(a)?;
        worst_h.0 = worst_h.0.max(h.expr.eval(a)?.norm());
        let want = h_derivative_at_anchor(a);
        worst_h.1 = worst_h.1.max((h.expr.derivative().eval(a)? - want).norm() / want);
        for fam in [&f, &h] {
            let sym = fam.expr.derivative();
            for z in random_interior_points(&mut rng, 100, 0.999) {
                let closed = fam.expr_deriv.eval(z)?;
                let d = (sym.eval(z)? - closed).norm() / closed.norm().max(f64::MIN_POSITIVE);
                worst_closed = worst_closed.max(d);
            }
        }
    }
    out.push(check(S, "f(a) = a_n", worst_f.0 <= 1e-8, format!("max error {:.3e}", worst_f.0)));
    out.push(check(S, "f'(a) = 0", worst_f.1 <= 1e-8, format!("max |f'(a)| {:.3e}", worst_f.1)));
    out.push(check(S, "h(a) = 0", worst_h.0 <= 1e-8, format!("max |h(a)| {:.3e}", worst_h.0)));
    out.push(check(
        S,
        "h'(a) closed form",
        worst_h.1 <= 1e-8,
        format!("max relative error {:.3e}", worst_h.1),
    ));
    out.push(check(
        S,
        "displayed derivatives match symbolic",
        worst_closed <= 1e-8,
        format!("max relative error {:.3e} over 100 points per anchor", worst_closed),
    ));

    let solver = SupSolver::new(opts.grid);
    for kind in [FamilyKind::F, FamilyKind::H] {
        let anchors: Vec<Complex64> = opts.anchors.iter().copied().filter(|a| a.norm() > 0.0).collect();
        let scan = uniform_bound_scan(&solver, kind, &anchors)?;
        out.push(check(
            S,
            format!("{kind:?} family Bloch norms bounded"),
            scan.no_growth,
            format!(
                "max {:.6}, log-slope per anchor {:.4}, fitted limit {}",
                scan.max,
                scan.log_slope,
                scan.fitted_limit.map_or("n/a".into(), |m| format!("{m:.4}"))
            ),
        ));
    }

    let branch = branch_limit_check(&[1e-3, 1e-6, 1e-9, 1e-12])?;
    out.push(check(
        S,
        "branch quotient approaches 1 from above",
        branch.monotone_approach && branch.all_at_least_one,
        format!("values {:?}", branch.values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()),
    ));

    let mono = h2_monotonicity_check();
    out.push(check(
        S,
        "t log(2/t) increasing on (0, 2/e)",
        mono.monotone,
        mono.witness.map_or("no violation".into(), |w| format!("violation at {w:?}")),
    ));
    let (t, _) = golden_section_max(|t| Ok::<f64, Error>(h2(t)), 1e-9, 1.0, 1e-13)?;
    let sup = solver.weighted_sup(&weight_vlog(), &AnalyticExpr::real(1.0))?;
    let gap = 1.0 - sup.argmax.norm();
    out.push(check(
        S,
        "t log(2/t) maximizer matches v_log sup",
        (t - 2.0 / E).abs() < 1e-6 && (gap - t).abs() < 1e-4,
        format!("maximizer {t:.9}, sup-solver gap {gap:.9}"),
    ));
    Ok(out)
}

pub fn identities_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    const S: &str = "identities";
    let mut out = Vec::new();
    let solver = SupSolver::new(opts.grid);

    let mut worst = 0.0f64;
    for v in [weight_vlog(), weight_wlog()] {
        for n in 1..=200u32 {
            let got = solver.monomial_bloch_norm(&v, n)?;
            let want = n as f64 * monomial_growth_norm(&v, n - 1);
            worst = worst.max((got - want).abs() / (1.0 + want));
        }
    }
    out.push(check(
        S,
        "||g_n||_B = n ||g_{n-1}||_H, n <= 200",
        worst <= 1e-9,
        format!("max error {worst:.3e}"),
    ));

    let battery = [
        ("1 + z^2", "(z + 0.3)/(1 + 0.3*z)"),
        ("exp(z)", "z^2"),
        ("z - 0.5*z^3", "(0.5 + 0.5i)*z"),
    ];
    let ns = [1u32, 2, 5, 17, 64, 200];
    let (mut wj, mut wi) = (0.0f64, 0.0f64);
    for (u, phi) in battery {
        let pair = SymbolPair::parse(u, phi, opts.grid)?;
        for &n in &ns {
            wj = wj.max(rel_or_zero(j_ratio(&solver, &pair, n)?, j_ratio_reduced(&solver, &pair, n)?));
            wi = wi.max(rel_or_zero(i_ratio(&solver, &pair, n)?, i_ratio_reduced(&solver, &pair, n)?));
        }
    }
    out.push(check(S, "J-ratio reduction", wj <= 1e-6, format!("max relative error {wj:.3e}")));
    out.push(check(S, "I-ratio reduction", wi <= 1e-6, format!("max relative error {wi:.3e}")));

    let mut wz = 0.0f64;
    for v in [weight_vlog(), weight_wlog()] {
        for n in [0u32, 1, 5, 40, 198] {
            let got = zygmund_seminorm(&solver, &v, &AnalyticExpr::monomial(n + 2))?.value;
            let want = ((n + 2) * (n + 1)) as f64 * monomial_growth_norm(&v, n);
            wz = wz.max(rel(got, want));
        }
    }
    out.push(check(S, "Zygmund monomial identity", wz <= 1e-9, format!("max relative error {wz:.3e}")));

    let phi = AnalyticExpr::parse("(z + 0.3)/(1 + 0.3*z)")?;
    let pair = SymbolPair::new(phi.derivative(), phi.clone(), opts.grid)?;
    let (mut pj, mut pi) = (0.0f64, 0.0f64);
    for &n in &ns {
        pj = pj.max(rel_or_zero(primed_j_ratio(&solver, &phi, n)?, j_ratio(&solver, &pair, n)?));
        pi = pi.max(rel_or_zero(primed_i_ratio(&solver, &phi, n)?, i_ratio(&solver, &pair, n)?));
    }
    out.push(check(
        S,
        "primed ratios equal (phi', phi) ratios",
        pj <= 1e-6 && pi <= 1e-6,
        format!("max relative error J {pj:.3e}, I {pi:.3e}"),
    ));

    let mut rng = StdRng::seed_from_u64(opts.seed);
    let vlog = weight_vlog();
    let mut violations = 0usize;
    for f in ["z", "z^5", "exp(z)", "(z + 0.3)/(1 + 0.3*z)"] {
        let sample = random_interior_points(&mut rng, 1000, 1.0 - 1e-9);
        let res = solver.growth_bound_check(&vlog, &AnalyticExpr::parse(f)?, &sample, 1e-9)?;
        if !res.holds {
            violations += 1;
        }
    }
    out.push(check(
        S,
        "pointwise growth bound",
        violations == 0,
        format!("{violations} functions with violations over 1000 points each"),
    ));
    Ok(out)
}

fn rel_or_zero(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
