//! Weighted sup-norm optimization over the disk and the space norms built on it.
//!
//! The two-dimensional solver evaluates the objective on a boundary-clustered
//! polar grid, then polishes the best local maxima by alternating
//! golden-section searches in the radial gap and in the angle. Monomial norms
//! use an independent one-dimensional solver on `r^n v(r)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticExpr, SymbolPair};
use crate::error::Result;
use crate::grid::{clustered_radii, GridSpec, CLAMP_GAP, RADIUS_CLAMP};
use crate::optimize::golden_section_max;
use crate::weights::{weight_unit, Weight};

/// Declared relative tolerance of every reported norm.
pub const DEFAULT_TOL: f64 = 1e-6;

const POLISH_CANDIDATES: usize = 4;
/// Upper bound on alternating rounds; polishing stops earlier once a round
/// gains less than `POLISH_STALL` relative.
const POLISH_ROUNDS: usize = 12;
const POLISH_STALL: f64 = 1e-15;
const POLISH_XTOL: f64 = 1e-8;
const RADIAL_NODES_1D: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub argmax: Complex64,
    pub grid: GridSpec,
    pub refined: bool,
    /// The maximizer sits on the clamp ring `|z| = 1 - 1e-12`; the true sup
    /// may only be approached in the limit.
    pub on_clamp: bool,
}

/// Objective sampled one grid row (fixed radius) at a time. Rows are
/// addressed by the gap `t = 1 - r` so weights see an exact argument.
pub(crate) trait RowObjective: Sync {
    fn eval_row(&self, gap: f64, zs: &[Complex64], out: &mut [f64]) -> Result<()>;
}

struct WeightedModulus<'a> {
    weight: &'a Weight,
    f: &'a AnalyticExpr,
}

impl RowObjective for WeightedModulus<'_> {
    fn eval_row(&self, gap: f64, zs: &[Complex64], out: &mut [f64]) -> Result<()> {
        let mut vals = vec![Complex64::new(0.0, 0.0); zs.len()];
        self.f.eval_batch(zs, &mut vals)?;
        let w = self.weight.eval_gap(gap);
        for (o, v) in out.iter_mut().zip(&vals) {
            *o = w * v.norm();
        }
        Ok(())
    }
}

/// `v(|z|) |g(z)| / w(|phi(z)|)` on `{|phi(z)| > threshold}`, `-inf` elsewhere.
struct Restricted<'a> {
    v: &'a Weight,
    w: &'a Weight,
    phi: &'a AnalyticExpr,
    g: &'a AnalyticExpr,
    threshold: f64,
}

impl Restricted<'_> {
    fn raw_row(&self, gap: f64, zs: &[Complex64]) -> Result<Vec<(f64, f64)>> {
        let m = zs.len();
        let mut gv = vec![Complex64::new(0.0, 0.0); m];
        let mut pv = vec![Complex64::new(0.0, 0.0); m];
        self.g.eval_batch(zs, &mut gv)?;
        self.phi.eval_batch(zs, &mut pv)?;
        let vz = self.v.eval_gap(gap);
        Ok(gv
            .iter()
            .zip(&pv)
            .map(|(g, p)| {
                let modulus = p.norm();
                (vz * g.norm() / self.w.eval(modulus), modulus)
            })
            .collect())
    }
}

impl RowObjective for Restricted<'_> {
    fn eval_row(&self, gap: f64, zs: &[Complex64], out: &mut [f64]) -> Result<()> {
        for (o, (val, modulus)) in out.iter_mut().zip(self.raw_row(gap, zs)?) {
            *o = if modulus > self.threshold {
                val
            } else {
                f64::NEG_INFINITY
            };
        }
        Ok(())
    }
}

/// Boundary-clustered node gaps `1 - r_k`, from 1 down to the clamp gap.
fn node_gaps(count: usize) -> Vec<f64> {
    let span = (1.0 / CLAMP_GAP).log2();
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k == count - 1 {
                CLAMP_GAP
            } else {
                (-(k as f64) * span / last).exp2()
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
struct GridPass {
    gaps: Vec<f64>,
    angles: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridPass {
    fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v.is_finite() && best.is_none_or(|b| v > b.2) {
                    best = Some((k, j, v));
                }
            }
        }
        best
    }

    /// Grid local maxima, best first, at most `limit` of them.
    fn candidates(&self, limit: usize) -> Vec<(usize, usize, f64)> {
        let rows = self.values.len();
        let cols = self.angles.len();
        let mut found = Vec::new();
        for k in 0..rows {
            let js: Vec<usize> = if k == 0 { vec![0] } else { (0..cols).collect() };
            for j in js {
                let v = self.values[k][j];
                if !v.is_finite() {
                    continue;
                }
                let mut is_max = true;
                'nb: for dk in [-1i64, 0, 1] {
                    let kk = k as i64 + dk;
                    if kk < 0 || kk >= rows as i64 {
                        continue;
                    }
                    let kk = kk as usize;
                    let neighbours: Vec<usize> = if kk == 0 {
                        vec![0]
                    } else if k == 0 {
                        (0..cols).collect()
                    } else {
                        vec![(j + cols - 1) % cols, j, (j + 1) % cols]
                    };
                    for jj in neighbours {
                        if (kk, jj) != (k, j) && self.values[kk][jj] > v {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    found.push((k, j, v));
                }
            }
        }
        found.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        found.truncate(limit);
        found
    }
}

/// Weighted sup solver over the clamped disk with a fixed polar grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SupSolver {
    pub grid: GridSpec,
}

impl SupSolver {
    pub fn new(grid: GridSpec) -> SupSolver {
        SupSolver { grid }
    }

    fn grid_pass(&self, obj: &dyn RowObjective) -> Result<GridPass> {
        let gaps = node_gaps(self.grid.radial);
        let angles = self.grid.angles();
        let unit: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let values = gaps
            .par_iter()
            .map(|&t| {
                let r = 1.0 - t;
                let zs: Vec<Complex64> = unit.iter().map(|u| u * r).collect();
                let mut out = vec![0.0; zs.len()];
                obj.eval_row(t, &zs, &mut out)?;
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridPass {
            gaps,
            angles,
            values,
        })
    }

    fn point_value(obj: &dyn RowObjective, gap: f64, theta: f64) -> Result<f64> {
        let z = Complex64::from_polar(1.0 - gap, theta);
        let mut out = [0.0];
        obj.eval_row(gap, &[z], &mut out)?;
        Ok(out[0])
    }

    /// Alternating gap/angle golden-section polish around grid node `(k, j)`.
    fn polish(
        &self,
        obj: &dyn RowObjective,
        pass: &GridPass,
        k: usize,
        j: usize,
    ) -> Result<(f64, f64, f64)> {
        let rows = pass.gaps.len();
        let t_hi = if k == 0 { 1.0 } else { pass.gaps[k - 1] };
        let t_lo = if k + 1 == rows { CLAMP_GAP } else { pass.gaps[k + 1] };
        let step = self.grid.angle_step();
        let mut gap = pass.gaps[k];
        let mut theta = pass.angles[j];
        let mut best = pass.values[k][j];
        for _ in 0..POLISH_ROUNDS {
            let start = best;
            let (t, v) = golden_section_max(
                |t| Self::point_value(obj, t, theta),
                t_lo,
                t_hi,
                POLISH_XTOL * (t_hi - t_lo),
            )?;
            if v > best {
                best = v;
                gap = t;
            }
            if k == 0 && gap >= 1.0 {
                break;
            }
            let (a, v) = golden_section_max(
                |a| Self::point_value(obj, gap, a),
                theta - step,
                theta + step,
                POLISH_XTOL * 2.0 * step,
            )?;
            if v > best {
                best = v;
                theta = a;
            }
            if best - start <= POLISH_STALL * best.abs() {
                break;
            }
        }
        Ok((best, gap, theta))
    }

    pub(crate) fn maximize(&self, obj: &dyn RowObjective) -> Result<SupResult> {
        let pass = self.grid_pass(obj)?;
        let Some((k0, j0, v0)) = pass.argmax() else {
            return Ok(SupResult {
                value: f64::NEG_INFINITY,
                argmax: Complex64::new(0.0, 0.0),
                grid: self.grid,
                refined: false,
                on_clamp: false,
            });
        };
        let mut best = (v0, pass.gaps[k0], pass.angles[j0]);
        for (k, j, _) in pass.candidates(POLISH_CANDIDATES) {
            let cand = self.polish(obj, &pass, k, j)?;
            if cand.0 > best.0 {
                best = cand;
            }
        }
        let (value, gap, theta) = best;
        Ok(SupResult {
            value,
            argmax: Complex64::from_polar(1.0 - gap, theta),
            grid: self.grid,
            refined: true,
            on_clamp: gap <= 2.0 * CLAMP_GAP,
        })
    }

    /// `sup_{|z|<1} v(|z|) |f(z)|` over the clamped disk.
    pub fn weighted_sup(&self, v: &Weight, f: &AnalyticExpr) -> Result<SupResult> {
        if f.is_zero() {
            return Ok(SupResult {
                value: 0.0,
                argmax: Complex64::new(0.0, 0.0),
                grid: self.grid,
                refined: false,
                on_clamp: false,
            });
        }
        self.maximize(&WeightedModulus { weight: v, f })
    }

    /// `sup |f|` over the clamped disk.
    pub fn sup_modulus(&self, f: &AnalyticExpr) -> Result<SupResult> {
        self.weighted_sup(&weight_unit(), f)
    }

    pub fn growth_norm(&self, v: &Weight, f: &AnalyticExpr) -> Result<NormValue> {
        let sup = self.weighted_sup(v, f)?.value;
        Ok(NormValue::new(Space::Growth, v, None, sup))
    }

    pub fn bloch_seminorm(&self, v: &Weight, f: &AnalyticExpr) -> Result<NormValue> {
        let sup = self.weighted_sup(v, &f.derivative())?.value;
        Ok(NormValue::new(Space::BlochSeminorm, v, None, sup))
    }

    pub fn bloch_norm(&self, v: &Weight, f: &AnalyticExpr) -> Result<NormValue> {
        let at_zero = f.eval(Complex64::new(0.0, 0.0))?.norm();
        let sup = self.weighted_sup(v, &f.derivative())?.value;
        Ok(NormValue::new(Space::Bloch, v, Some(at_zero), sup))
    }

    /// `||g_n||_{B^v}` through the two-dimensional solver on the symbolic
    /// derivative `n z^{n-1}`; memoized per (weight, n, grid).
    pub fn monomial_bloch_norm(&self, v: &Weight, n: u32) -> Result<f64> {
        self.cached_monomial(MonomialNorm::Bloch, v, n, || {
            Ok(self.bloch_norm(v, &AnalyticExpr::monomial(n))?.value)
        })
    }

    /// `||g_n||_{Z^v}` through the two-dimensional solver on the second
    /// derivative; memoized per (weight, n, grid).
    pub fn monomial_zygmund_norm(&self, v: &Weight, n: u32) -> Result<f64> {
        self.cached_monomial(MonomialNorm::Zygmund, v, n, || {
            let g = AnalyticExpr::monomial(n);
            let zero = Complex64::new(0.0, 0.0);
            let d1 = g.derivative();
            let d2 = d1.derivative();
            Ok(g.eval(zero)?.norm() + d1.eval(zero)?.norm() + self.weighted_sup(v, &d2)?.value)
        })
    }

    fn cached_monomial(
        &self,
        kind: MonomialNorm,
        v: &Weight,
        n: u32,
        compute: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        let key = (kind, v.id().to_owned(), n, self.grid);
        if let Some(&hit) = grid_cache().read().unwrap().get(&key) {
            return Ok(hit);
        }
        let value = compute()?;
        grid_cache().write().unwrap().insert(key, value);
        Ok(value)
    }

    /// `sup v(|z|) |g(z)| / w(|phi(z)|)` over grid points with `|phi(z)| > r`.
    pub fn restricted_sup(
        &self,
        v: &Weight,
        w: &Weight,
        pair: &SymbolPair,
        g: &AnalyticExpr,
        r: f64,
    ) -> Result<RestrictedSup> {
        Ok(self
            .restricted_ladder(v, w, &pair.phi, g, &[r])?
            .pop()
            .expect("one threshold in, one value out"))
    }

    /// Restricted sups for a list of thresholds from a single grid pass.
    /// Values are made non-increasing in the threshold: a witness for a
    /// larger threshold is admissible for every smaller one.
    pub fn restricted_ladder(
        &self,
        v: &Weight,
        w: &Weight,
        phi: &AnalyticExpr,
        g: &AnalyticExpr,
        thresholds: &[f64],
    ) -> Result<Vec<RestrictedSup>> {
        let empty = |threshold| RestrictedSup {
            threshold,
            value: 0.0,
            argmax: None,
            empty: true,
        };
        if g.is_zero() {
            return Ok(thresholds.iter().map(|&t| RestrictedSup { empty: false, ..empty(t) }).collect());
        }
        let gaps = node_gaps(self.grid.radial);
        let angles = self.grid.angles();
        let base = Restricted {
            v,
            w,
            phi,
            g,
            threshold: 0.0,
        };
        let unit: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let raw: Vec<Vec<(f64, f64)>> = gaps
            .par_iter()
            .map(|&t| {
                let zs: Vec<Complex64> = unit.iter().map(|u| u * (1.0 - t)).collect();
                base.raw_row(t, &zs)
            })
            .collect::<Result<_>>()?;

        let mut out = Vec::with_capacity(thresholds.len());
        for &threshold in thresholds {
            let values: Vec<Vec<f64>> = raw
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&(val, m)| if m > threshold { val } else { f64::NEG_INFINITY })
                        .collect()
                })
                .collect();
            let pass = GridPass {
                gaps: gaps.clone(),
                angles: angles.clone(),
                values,
            };
            let Some((k0, j0, v0)) = pass.argmax() else {
                out.push(empty(threshold));
                continue;
            };
            let obj = Restricted {
                threshold,
                ..base
            };
            let mut best = (v0, pass.gaps[k0], pass.angles[j0]);
            for (k, j, _) in pass.candidates(POLISH_CANDIDATES) {
                let cand = self.polish(&obj, &pass, k, j)?;
                if cand.0 > best.0 {
                    best = cand;
                }
            }
            out.push(RestrictedSup {
                threshold,
                value: best.0,
                argmax: Some(Complex64::from_polar(1.0 - best.1, best.2)),
                empty: false,
            });
        }
        // enforce monotonicity over nested constraint sets
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by(|&a, &b| thresholds[b].total_cmp(&thresholds[a]));
        let mut running: Option<(f64, Option<Complex64>)> = None;
        for idx in order {
            if let Some((val, arg)) = running {
                if val > out[idx].value {
                    out[idx].value = val;
                    out[idx].argmax = arg;
                    out[idx].empty = false;
                }
            }
            if !out[idx].empty {
                running = Some((out[idx].value, out[idx].argmax));
            }
        }
        Ok(out)
    }

    /// Checks `|f(z)| <= [1 + loglog(2/(1-|z|)) - loglog 2] ||f||_{B^{v_log}}`
    /// at every sample point.
    pub fn growth_bound_check(
        &self,
        vlog: &Weight,
        f: &AnalyticExpr,
        sample: &[Complex64],
        tol: f64,
    ) -> Result<GrowthBoundOutcome> {
        let norm = self.bloch_norm(vlog, f)?.value;
        let mut worst_ratio: f64 = 0.0;
        let mut witness = None;
        for &z in sample {
            let r = z.norm().min(RADIUS_CLAMP);
            let factor = 1.0 + (2.0 / (1.0 - r)).ln().ln() - std::f64::consts::LN_2.ln();
            let lhs = f.eval(z)?.norm();
            let rhs = factor * norm;
            let ratio = if rhs > 0.0 {
                lhs / rhs
            } else if lhs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst_ratio = worst_ratio.max(ratio);
            if lhs > rhs * (1.0 + tol) && witness.is_none() {
                witness = Some(GrowthBoundViolation { z, lhs, rhs });
            }
        }
        Ok(GrowthBoundOutcome {
            bloch_norm: norm,
            holds: witness.is_none(),
            worst_ratio,
            witness,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum MonomialNorm {
    Bloch,
    Zygmund,
}

type GridCacheKey = (MonomialNorm, String, u32, GridSpec);

fn grid_cache() -> &'static RwLock<HashMap<GridCacheKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<GridCacheKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSup {
    pub threshold: f64,
    pub value: f64,
    pub argmax: Option<Complex64>,
    /// No grid point satisfied the constraint; `value` is 0 by convention.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBoundViolation {
    pub z: Complex64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthBoundOutcome {
    pub bloch_norm: f64,
    pub holds: bool,
    /// Largest `|f(z)| / bound` over the sample.
    pub worst_ratio: f64,
    pub witness: Option<GrowthBoundViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Growth,
    Bloch,
    BlochSeminorm,
    Zygmund,
    ZygmundSeminorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParts {
    pub at_zero: Option<f64>,
    pub derivative_at_zero: Option<f64>,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub space: Space,
    pub weight: String,
    pub value: f64,
    pub parts: NormParts,
    pub tol: f64,
}

impl NormValue {
    fn new(space: Space, v: &Weight, at_zero: Option<f64>, sup: f64) -> NormValue {
        NormValue::from_parts(
            space,
            v,
            NormParts {
                at_zero,
                derivative_at_zero: None,
                sup,
            },
        )
    }

    pub(crate) fn from_parts(space: Space, v: &Weight, parts: NormParts) -> NormValue {
        NormValue {
            space,
            weight: v.id().to_owned(),
            value: parts.at_zero.unwrap_or(0.0) + parts.derivative_at_zero.unwrap_or(0.0) + parts.sup,
            parts,
            tol: DEFAULT_TOL,
        }
    }
}

/// Maximizes `log_objective(t)` over gaps `t = 1 - r` in `[1e-12, 1]` with a
/// clustered scan plus golden-section polish of every local maximum.
pub fn radial_log_sup(log_objective: impl Fn(f64) -> f64) -> (f64, f64) {
    let gaps = node_gaps(RADIAL_NODES_1D);
    let vals: Vec<f64> = gaps.iter().map(|&t| log_objective(t)).collect();
    let mut best = (f64::NEG_INFINITY, 1.0);
    for k in 0..gaps.len() {
        let v = vals[k];
        if v.is_nan() {
            continue;
        }
        let left = if k == 0 { f64::NEG_INFINITY } else { vals[k - 1] };
        let right = if k + 1 == gaps.len() { f64::NEG_INFINITY } else { vals[k + 1] };
        if v < left || v < right {
            continue;
        }
        let t_hi = if k == 0 { 1.0 } else { gaps[k - 1] };
        let t_lo = if k + 1 == gaps.len() { CLAMP_GAP } else { gaps[k + 1] };
        let (t, lv) = golden_section_max(
            |t| Ok::<f64, std::convert::Infallible>(log_objective(t)),
            t_lo,
            t_hi,
            1e-10 * (t_hi - t_lo),
        )
        .unwrap_or_else(|e| match e {});
        let (t, lv) = if lv >= v { (t, lv) } else { (gaps[k], v) };
        if lv > best.0 {
            best = (lv, t);
        }
    }
    best
}

/// `||g_n||_{H_v^inf} = sup_r r^n v(r)` by the one-dimensional solver;
/// memoized per (weight id, n).
pub fn monomial_growth_norm(v: &Weight, n: u32) -> f64 {
    let key = (v.id().to_owned(), n);
    if let Some(&hit) = mgn_cache().read().unwrap().get(&key) {
        return hit;
    }
    let nf = n as f64;
    let (log_value, _) = radial_log_sup(|t| {
        let lr = if n == 0 { 0.0 } else { nf * (-t).ln_1p() };
        lr + v.eval_gap(t).ln()
    });
    let value = log_value.exp();
    mgn_cache().write().unwrap().insert(key, value);
    value
}

fn mgn_cache() -> &'static RwLock<HashMap<(String, u32), f64>> {
    static CACHE: OnceLock<RwLock<HashMap<(String, u32), f64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Radii of the one-dimensional solver's scan, exposed for diagnostics.
pub fn radial_scan_nodes() -> Vec<f64> {
    clustered_radii(RADIAL_NODES_1D)
}
