//! Weighted composition operators `W_{u,phi} f = u (f o phi)` on the
//! logarithmic Bloch space.
//!
//! The norms of the functionals `J_u f = int_0^z f u'` and `I_u f = int_0^z f' u`
//! are obtained from their derivatives, `(J_u f)' = f u'` and `(I_u f)' = f' u`,
//! with both functionals vanishing at 0. No quadrature is performed.

use serde::{Deserialize, Serialize};

use crate::analytic::SymbolPair;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::norms::{monomial_growth_norm, RestrictedSup, SupSolver, DEFAULT_TOL};
use crate::weights::{associated_weight, weight_v3, weight_vlog, weight_wlog, DEFAULT_ASSOC_NMAX};

/// Symbol-pair quantities are zero below this distance of `sup |phi|` from 1.
pub const BOUNDARY_REACH: f64 = 1e-9;
/// Tail slope separating bounded from growing or decaying sequences.
pub const SLOPE_THRESHOLD: f64 = 0.05;
/// Allowed relative change of the running max when the schedule is doubled.
pub const STABILITY_CHANGE: f64 = 0.05;
/// Radius ladder `1 - 2^-k` depth.
pub const LADDER_DEPTH: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub nmax: u32,
    pub grid: GridSpec,
    pub tol: f64,
    pub assoc_nmax: usize,
    pub ladder_depth: u32,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig {
            nmax: 400,
            grid: GridSpec::default(),
            tol: DEFAULT_TOL,
            assoc_nmax: DEFAULT_ASSOC_NMAX,
            ladder_depth: LADDER_DEPTH,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nmax < 8 {
            return Err(Error::InvalidArgument(format!("nmax must be at least 8, got {}", self.nmax)));
        }
        GridSpec::new(self.grid.radial, self.grid.angular)?;
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!("tol must lie in (0, 1e-2], got {}", self.tol)));
        }
        if self.assoc_nmax == 0 || self.ladder_depth == 0 {
            return Err(Error::InvalidArgument("assoc_nmax and ladder_depth must be positive".into()));
        }
        Ok(())
    }

    pub fn solver(&self) -> SupSolver {
        SupSolver::new(self.grid)
    }
}

/// All `n <= 64`, then `{64, 80, 100} * 2^j` up to `nmax`, always ending at `nmax`.
pub fn n_schedule(nmax: u32) -> Vec<u32> {
    let mut ns: Vec<u32> = (0..=nmax.min(64)).collect();
    let mut scale = 1u32;
    while 64 * scale <= nmax {
        for base in [64, 80, 100] {
            let n = base * scale;
            if n > 64 && n <= nmax {
                ns.push(n);
            }
        }
        scale *= 2;
    }
    ns.push(nmax);
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// `||J_u(phi^n)||_{B^{v_log}} = sup v_log |u' phi^n|`.
pub fn j_functional_bloch_norm(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    let integrand = pair.phi.power(n).mul(&pair.du);
    Ok(solver.weighted_sup(&weight_vlog(), &integrand)?.value)
}

/// `||I_u(phi^n)||_{B^{v_log}} = sup v_log |(phi^n)' u|`, `n >= 1`.
pub fn i_functional_bloch_norm(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("the I functional needs n >= 1".into()));
    }
    let integrand = pair.phi.power(n).derivative().mul(&pair.u);
    Ok(solver.weighted_sup(&weight_vlog(), &integrand)?.value)
}

/// `(n+1) ||J_u(phi^n)||_{B^{v_log}} / ||g_{n+1}||_{B^{w_log}}`.
pub fn j_ratio(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    let num = j_functional_bloch_norm(solver, pair, n)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok((n + 1) as f64 * num / solver.monomial_bloch_norm(&weight_wlog(), n + 1)?)
}

/// `||I_u(phi^n)||_{B^{v_log}} / ||g_n||_{B^{v_log}}`, `n >= 1`.
pub fn i_ratio(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    let num = i_functional_bloch_norm(solver, pair, n)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / solver.monomial_bloch_norm(&weight_vlog(), n)?)
}

/// Reduced J-ratio `||u' phi^n||_{H_{v_log}} / ||g_n||_{H_{w_log}}`.
pub fn j_ratio_reduced(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    let f = pair.du.mul(&pair.phi.power(n));
    let num = solver.weighted_sup(&weight_vlog(), &f)?.value;
    Ok(num / monomial_growth_norm(&weight_wlog(), n))
}

/// Reduced I-ratio `||u phi' phi^{n-1}||_{H_{v_log}} / ||g_{n-1}||_{H_{v_log}}`, `n >= 1`.
pub fn i_ratio_reduced(solver: &SupSolver, pair: &SymbolPair, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("the I functional needs n >= 1".into()));
    }
    let f = pair.u.mul(&pair.dphi).mul(&pair.phi.power(n - 1));
    let num = solver.weighted_sup(&weight_vlog(), &f)?.value;
    Ok(num / monomial_growth_norm(&weight_vlog(), n - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    J,
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    DecayingToZero,
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub kind: SeriesKind,
    pub n_values: Vec<u32>,
    pub ratios: Vec<f64>,
    pub tail_estimate: f64,
    pub trend: Trend,
    /// Tail log-log regression slope, when defined.
    pub slope: Option<f64>,
}

impl RatioSeries {
    /// Classifies `ratios` (indexed by `n_values`) up to `nmax`, relative to `scale`.
    pub fn new(kind: SeriesKind, n_values: Vec<u32>, ratios: Vec<f64>, nmax: u32, scale: f64, tol: f64) -> RatioSeries {
        let (tail_estimate, trend, slope) = classify_trend(&n_values, &ratios, nmax, scale, tol);
        RatioSeries {
            kind,
            n_values,
            ratios,
            tail_estimate,
            trend,
            slope,
        }
    }

    /// The entries with `n <= nmax`, reclassified.
    pub fn truncated(&self, nmax: u32, scale: f64, tol: f64) -> RatioSeries {
        let keep = self.n_values.iter().take_while(|&&n| n <= nmax).count();
        RatioSeries::new(
            self.kind,
            self.n_values[..keep].to_vec(),
            self.ratios[..keep].to_vec(),
            nmax,
            scale,
            tol,
        )
    }

    pub fn running_max(&self, nmax: u32) -> f64 {
        self.n_values
            .iter()
            .zip(&self.ratios)
            .filter(|(&n, _)| n <= nmax)
            .map(|(_, &r)| r)
            .fold(0.0, f64::max)
    }
}

/// Tail window `[ceil(nmax/2), nmax]`.
pub fn tail_start(nmax: u32) -> u32 {
    nmax.div_ceil(2)
}

/// Returns `(tail max, trend, slope)`. A tail at most `tol * scale` decays to
/// zero; otherwise the slope of `ln ratio` against `ln n` over the tail
/// decides: above `+0.05` with `slope / stderr > 3` grows, below `-0.05`
/// decays, within `0.05` of zero is bounded.
pub fn classify_trend(ns: &[u32], ratios: &[f64], nmax: u32, scale: f64, tol: f64) -> (f64, Trend, Option<f64>) {
    let lo = tail_start(nmax);
    let tail: Vec<(f64, f64)> = ns
        .iter()
        .zip(ratios)
        .filter(|(&n, _)| n >= lo && n <= nmax && n > 0)
        .map(|(&n, &r)| (n as f64, r))
        .collect();
    let tail_max = tail.iter().map(|p| p.1).fold(0.0, f64::max);
    if tail.is_empty() {
        return (tail_max, Trend::Inconclusive, None);
    }
    if tail_max <= tol * scale {
        return (tail_max, Trend::DecayingToZero, None);
    }
    if tail.iter().any(|p| !(p.1 > 0.0) || !p.1.is_finite()) || tail.len() < 3 {
        return (tail_max, Trend::Inconclusive, None);
    }
    let xs: Vec<f64> = tail.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let stderr = (resid / (m - 2.0) / sxx).sqrt();
    let trend = if slope > SLOPE_THRESHOLD {
        if slope > 3.0 * stderr {
            Trend::Growing
        } else {
            Trend::Inconclusive
        }
    } else if slope < -SLOPE_THRESHOLD {
        Trend::DecayingToZero
    } else {
        Trend::Bounded
    };
    (tail_max, trend, Some(slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Divergent,
    Inconclusive,
}

/// Continuity verdict from series computed up to `2 * nmax`: divergent if a
/// tail grows; bounded if both tails are flat or decaying and the running max
/// moves at most 5% from `nmax` to `2 * nmax`; inconclusive otherwise.
pub fn verdict_from_series(j: &RatioSeries, i: &RatioSeries, nmax: u32) -> Verdict {
    if j.trend == Trend::Growing || i.trend == Trend::Growing {
        return Verdict::Divergent;
    }
    let calm = |t: Trend| matches!(t, Trend::Bounded | Trend::DecayingToZero);
    if !(calm(j.trend) && calm(i.trend)) {
        return Verdict::Inconclusive;
    }
    let (short, long) = (
        j.running_max(nmax).max(i.running_max(nmax)),
        j.running_max(2 * nmax).max(i.running_max(2 * nmax)),
    );
    if !long.is_finite() {
        return Verdict::Inconclusive;
    }
    if long - short <= STABILITY_CHANGE * short || long == 0.0 {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

/// Largest J or I ratio over `n <= 10`, the scale for zero tests.
pub fn small_n_scale(j: &RatioSeries, i: &RatioSeries) -> f64 {
    j.running_max(10).max(i.running_max(10))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPair {
    pub j: RatioSeries,
    pub i: RatioSeries,
    pub scale: f64,
}

/// J-ratios for `n` in the schedule (from 0) and I-ratios (from 1), up to `nmax`.
pub fn ratio_series(pair: &SymbolPair, cfg: &OperatorConfig, nmax: u32) -> Result<SeriesPair> {
    let solver = cfg.solver();
    let ns = n_schedule(nmax);
    let mut jr = Vec::with_capacity(ns.len());
    let mut ir = Vec::with_capacity(ns.len());
    for &n in &ns {
        jr.push(j_ratio(&solver, pair, n)?);
        if n >= 1 {
            ir.push(i_ratio(&solver, pair, n)?);
        }
    }
    let i_ns: Vec<u32> = ns.iter().copied().filter(|&n| n >= 1).collect();
    let scale = ns
        .iter()
        .zip(&jr)
        .chain(i_ns.iter().zip(&ir))
        .filter(|(&n, _)| n <= 10)
        .map(|(_, &r)| r)
        .fold(0.0, f64::max);
    Ok(SeriesPair {
        j: RatioSeries::new(SeriesKind::J, ns, jr, nmax, scale, cfg.tol),
        i: RatioSeries::new(SeriesKind::I, i_ns, ir, nmax, scale, cfg.tol),
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialNormBand {
    /// Essential norm lies in `[Q/K, K Q]` for an unknown constant `K`.
    #[serde(rename = "Q")]
    pub q: f64,
    pub compact: bool,
    pub scale: f64,
    pub threshold: f64,
}

pub fn band_from_series(series: &SeriesPair, tol: f64) -> EssentialNormBand {
    let q = series.j.tail_estimate.max(series.i.tail_estimate);
    EssentialNormBand {
        q,
        compact: q <= tol * series.scale,
        scale: series.scale,
        threshold: tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityOutcome {
    pub verdict: Verdict,
    /// Series up to `2 * nmax`.
    pub extended: SeriesPair,
    pub running_max: f64,
    pub running_max_doubled: f64,
}

pub fn continuity_verdict(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<ContinuityOutcome> {
    let extended = ratio_series(pair, cfg, 2 * cfg.nmax)?;
    let verdict = verdict_from_series(&extended.j, &extended.i, cfg.nmax);
    Ok(ContinuityOutcome {
        verdict,
        running_max: extended.j.running_max(cfg.nmax).max(extended.i.running_max(cfg.nmax)),
        running_max_doubled: extended
            .j
            .running_max(2 * cfg.nmax)
            .max(extended.i.running_max(2 * cfg.nmax)),
        extended,
    })
}

/// Band for a pair, refused when the operator is not continuous.
pub fn essential_norm_band(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<EssentialNormBand> {
    let outcome = continuity_verdict(pair, cfg)?;
    if outcome.verdict == Verdict::Divergent {
        return Err(Error::Divergent(format!(
            "ratio tails grow for u = {}, phi = {}",
            pair.u, pair.phi
        )));
    }
    let series = restrict(&outcome.extended, cfg.nmax, cfg.tol);
    Ok(band_from_series(&series, cfg.tol))
}

fn restrict(series: &SeriesPair, nmax: u32, tol: f64) -> SeriesPair {
    SeriesPair {
        j: series.j.truncated(nmax, series.scale, tol),
        i: series.i.truncated(nmax, series.scale, tol),
        scale: series.scale,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub k: u32,
    pub threshold: f64,
    pub value: f64,
    /// No grid point had `|phi| > threshold`.
    pub unresolved: bool,
    /// Radius outside the range where the associated-weight estimate is
    /// reliable (`1 - r < 1 / assoc_nmax`).
    pub beyond_horizon: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimsup {
    /// Value at the deepest resolvable rung, 0 when `phi` stays away from the boundary.
    pub value: f64,
    pub short_circuit: bool,
    /// Some rungs could not be resolved by the grid.
    pub truncated: bool,
    pub ladder: Vec<LadderRung>,
}

impl BoundaryLimsup {
    fn zero() -> BoundaryLimsup {
        BoundaryLimsup {
            value: 0.0,
            short_circuit: true,
            truncated: false,
            ladder: Vec::new(),
        }
    }

    fn from_rungs(ladder: Vec<LadderRung>) -> BoundaryLimsup {
        let last = ladder.iter().rev().find(|r| !r.unresolved);
        BoundaryLimsup {
            value: last.map_or(0.0, |r| r.value),
            short_circuit: false,
            truncated: ladder.iter().any(|r| r.unresolved),
            ladder,
        }
    }
}

pub fn ladder_thresholds(depth: u32) -> Vec<f64> {
    (1..=depth).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

fn reaches_boundary(pair: &SymbolPair) -> bool {
    pair.phi_sup >= 1.0 - BOUNDARY_REACH
}

fn rungs(sups: Vec<RestrictedSup>, horizon: Option<usize>) -> Vec<LadderRung> {
    sups.into_iter()
        .enumerate()
        .map(|(idx, s)| LadderRung {
            k: idx as u32 + 1,
            threshold: s.threshold,
            value: s.value,
            unresolved: s.empty,
            beyond_horizon: horizon.is_some_and(|m| (1.0 - s.threshold) * (m as f64) < 1.0),
        })
        .collect()
}

/// Ladder of `sup_{|phi| > r} v_log(z) |u(z)| / w_log(phi(z))` over `r = 1 - 2^-k`.
pub fn boundary_limsup_upper(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<BoundaryLimsup> {
    if !reaches_boundary(pair) || pair.u.is_zero() {
        return Ok(BoundaryLimsup::zero());
    }
    let sups = cfg.solver().restricted_ladder(
        &weight_vlog(),
        &weight_wlog(),
        &pair.phi,
        &pair.u,
        &ladder_thresholds(cfg.ladder_depth),
    )?;
    Ok(BoundaryLimsup::from_rungs(rungs(sups, None)))
}

/// Ladder of `v_log(z) |u'(z)| / w~_log(phi(z))` with the associated-weight estimate.
pub fn boundary_limsup_lower_j(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<BoundaryLimsup> {
    if !reaches_boundary(pair) || pair.du.is_zero() {
        return Ok(BoundaryLimsup::zero());
    }
    let assoc = associated_weight(&weight_wlog(), cfg.assoc_nmax)?.as_weight();
    let sups = cfg.solver().restricted_ladder(
        &weight_vlog(),
        &assoc,
        &pair.phi,
        &pair.du,
        &ladder_thresholds(cfg.ladder_depth),
    )?;
    Ok(BoundaryLimsup::from_rungs(rungs(sups, Some(cfg.assoc_nmax))))
}

/// Ladder of `v_3(z) |u(z) phi'(z)| / v~_3(phi(z))` with the associated-weight estimate.
pub fn boundary_limsup_lower_i(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<BoundaryLimsup> {
    let g = pair.u.mul(&pair.dphi);
    if !reaches_boundary(pair) || g.is_zero() {
        return Ok(BoundaryLimsup::zero());
    }
    let assoc = associated_weight(&weight_v3(), cfg.assoc_nmax)?.as_weight();
    let sups = cfg.solver().restricted_ladder(
        &weight_v3(),
        &assoc,
        &pair.phi,
        &g,
        &ladder_thresholds(cfg.ladder_depth),
    )?;
    Ok(BoundaryLimsup::from_rungs(rungs(sups, Some(cfg.assoc_nmax))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTarget {
    pub n_values: Vec<u32>,
    pub ratios: Vec<f64>,
    pub tail_estimate: f64,
}

/// Tail estimate of `||u phi^n||_{H_{v_log}} / ||g_n||_{H_{w_log}}`.
pub fn growth_target_essential_norm(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<GrowthTarget> {
    let solver = cfg.solver();
    let ns = n_schedule(cfg.nmax);
    let mut ratios = Vec::with_capacity(ns.len());
    for &n in &ns {
        let f = pair.u.mul(&pair.phi.power(n));
        let num = solver.weighted_sup(&weight_vlog(), &f)?.value;
        ratios.push(if num == 0.0 { 0.0 } else { num / monomial_growth_norm(&weight_wlog(), n) });
    }
    let lo = tail_start(cfg.nmax);
    let tail_estimate = ns
        .iter()
        .zip(&ratios)
        .filter(|(&n, _)| n >= lo)
        .map(|(_, &r)| r)
        .fold(0.0, f64::max);
    Ok(GrowthTarget {
        n_values: ns,
        ratios,
        tail_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectQuantities {
    pub upper: BoundaryLimsup,
    pub lower_j: BoundaryLimsup,
    pub lower_i: BoundaryLimsup,
    pub growth_target: GrowthTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub u: String,
    pub phi: String,
    pub phi_sup: f64,
    pub verdict: Verdict,
    /// Absent when the verdict is divergent.
    pub band: Option<EssentialNormBand>,
    pub series: SeriesPair,
    pub direct: DirectQuantities,
    pub running_max: f64,
    pub running_max_doubled: f64,
    pub config: OperatorConfig,
}

pub fn analyze(pair: &SymbolPair, cfg: &OperatorConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let outcome = continuity_verdict(pair, cfg)?;
    let series = restrict(&outcome.extended, cfg.nmax, cfg.tol);
    let band = (outcome.verdict != Verdict::Divergent).then(|| band_from_series(&series, cfg.tol));
    let direct = DirectQuantities {
        upper: boundary_limsup_upper(pair, cfg)?,
        lower_j: boundary_limsup_lower_j(pair, cfg)?,
        lower_i: boundary_limsup_lower_i(pair, cfg)?,
        growth_target: growth_target_essential_norm(pair, cfg)?,
    };
    Ok(AnalysisReport {
        u: pair.u.to_string(),
        phi: pair.phi.to_string(),
        phi_sup: pair.phi_sup,
        verdict: outcome.verdict,
        band,
        series,
        direct,
        running_max: outcome.running_max,
        running_max_doubled: outcome.running_max_doubled,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OperatorConfig {
        OperatorConfig {
            nmax: 40,
            grid: GridSpec::new(128, 64).unwrap(),
            ..OperatorConfig::default()
        }
    }

    fn pair(u: &str, phi: &str) -> SymbolPair {
        SymbolPair::parse(u, phi, cfg().grid).unwrap()
    }

    #[test]
    fn schedule_shape() {
        let s = n_schedule(400);
        assert_eq!(&s[..3], &[0, 1, 2]);
        assert_eq!(&s[64..], &[64, 80, 100, 128, 160, 200, 256, 320, 400]);
        assert_eq!(*n_schedule(800).last().unwrap(), 800);
        assert!(n_schedule(800).contains(&640));
        assert_eq!(n_schedule(10), (0..=10).collect::<Vec<_>>());
        assert_eq!(*n_schedule(150).last().unwrap(), 150);
    }

    #[test]
    fn constant_u_kills_j() {
        let p = pair("1", "(z + 0.3)/(1 + 0.3*z)");
        let s = cfg().solver();
        for n in [0, 3, 17] {
            assert_eq!(j_functional_bloch_norm(&s, &p, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn j_of_z_identity_at_zero_is_two_over_e() {
        let p = pair("z", "z");
        let v = j_functional_bloch_norm(&cfg().solver(), &p, 0).unwrap();
        assert!((v - 2.0 / std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn i_requires_positive_n() {
        let p = pair("1", "z");
        assert!(i_functional_bloch_norm(&cfg().solver(), &p, 0).is_err());
    }

    #[test]
    fn identity_operator_ratios() {
        let p = pair("1", "z");
        let s = ratio_series(&p, &cfg(), 40).unwrap();
        assert!(s.j.ratios.iter().all(|&r| r == 0.0));
        for &r in &s.i.ratios {
            assert!((r - 1.0).abs() < 1e-6, "{r}");
        }
        let band = band_from_series(&s, 1e-6);
        assert!((band.q - 1.0).abs() < 1e-6);
        assert!(!band.compact);
    }

    #[test]
    fn zero_symbol_is_compact_and_bounded() {
        let p = pair("0", "z");
        let c = cfg();
        let out = continuity_verdict(&p, &c).unwrap();
        assert_eq!(out.verdict, Verdict::Bounded);
        let band = essential_norm_band(&p, &c).unwrap();
        assert_eq!(band.q, 0.0);
        assert!(band.compact);
        assert_eq!(boundary_limsup_upper(&p, &c).unwrap().value, 0.0);
        assert_eq!(growth_target_essential_norm(&p, &c).unwrap().tail_estimate, 0.0);
    }

    #[test]
    fn contraction_short_circuits() {
        let p = pair("1", "z/2");
        let c = cfg();
        for f in [boundary_limsup_upper, boundary_limsup_lower_j, boundary_limsup_lower_i] {
            let b = f(&p, &c).unwrap();
            assert_eq!(b.value, 0.0);
            assert!(b.short_circuit);
        }
    }

    fn synthetic(kind: SeriesKind, f: impl Fn(f64) -> f64, nmax: u32) -> RatioSeries {
        let ns = n_schedule(2 * nmax);
        let rs = ns.iter().map(|&n| f(n as f64)).collect();
        RatioSeries::new(kind, ns, rs, 2 * nmax, 1.0, 1e-6)
    }

    #[test]
    fn verdict_machinery_on_synthetic_series() {
        let flat = synthetic(SeriesKind::I, |_| 1.0, 100);
        let zero = synthetic(SeriesKind::J, |_| 0.0, 100);
        let grow = synthetic(SeriesKind::J, |n| (1.0 + n).sqrt(), 100);
        let decay = synthetic(SeriesKind::J, |n| 1.0 / (1.0 + n), 100);
        let wobble = synthetic(SeriesKind::J, |n| if n == 160.0 { 1.3 } else { 1.0 }, 100);
        assert_eq!(zero.trend, Trend::DecayingToZero);
        assert_eq!(flat.trend, Trend::Bounded);
        assert_eq!(grow.trend, Trend::Growing);
        assert_eq!(decay.trend, Trend::DecayingToZero);
        assert_eq!(verdict_from_series(&zero, &flat, 100), Verdict::Bounded);
        assert_eq!(verdict_from_series(&grow, &flat, 100), Verdict::Divergent);
        assert_eq!(verdict_from_series(&decay, &flat, 100), Verdict::Bounded);
        assert_ne!(wobble.trend, Trend::Growing);
        assert_eq!(verdict_from_series(&wobble, &zero, 100), Verdict::Inconclusive);
    }

    #[test]
    fn trend_needs_confidence() {
        let ns: Vec<u32> = vec![50, 60, 70, 80, 90, 100];
        let noisy = vec![1.0, 3.0, 0.5, 4.0, 0.6, 2.5];
        let (_, t, _) = classify_trend(&ns, &noisy, 100, 1.0, 1e-6);
        assert_eq!(t, Trend::Inconclusive);
    }

    #[test]
    fn config_validation() {
        assert!(OperatorConfig::default().validate().is_ok());
        assert!(OperatorConfig { nmax: 7, ..Default::default() }.validate().is_err());
        assert!(OperatorConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(OperatorConfig { tol: 0.1, ..Default::default() }.validate().is_err());
    }
}
