//! Radial weights on the disk and their monomial-based associated weights.
//!
//! Weights are stored as functions of the gap `t = 1 - r` so that evaluations
//! close to the boundary do not lose precision to `1 - r` cancellation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{clamp_radius, clustered_radii, CLAMP_GAP};
use crate::norms::monomial_growth_norm;

/// Default truncation of the monomial family for associated weights.
pub const DEFAULT_ASSOC_NMAX: usize = 400;

type GapFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A positive radial weight `v(|z|)`.
#[derive(Clone)]
pub struct Weight {
    id: Arc<str>,
    of_gap: Arc<GapFn>,
    pub radial: bool,
    pub typical: bool,
    pub decreasing: bool,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("id", &self.id)
            .field("typical", &self.typical)
            .field("decreasing", &self.decreasing)
            .finish()
    }
}

impl Weight {
    /// A radial weight given as a function of the gap `1 - r`. The id keys the
    /// monomial-norm cache, so it must be unique per formula.
    pub fn from_gap(
        id: impl Into<Arc<str>>,
        typical: bool,
        decreasing: bool,
        of_gap: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Weight {
        Weight {
            id: id.into(),
            of_gap: Arc::new(of_gap),
            radial: true,
            typical,
            decreasing,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Value at radius `r`, clamped to `[0, 1 - 1e-12]`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = clamp_radius(r);
        (self.of_gap)((1.0 - r).max(CLAMP_GAP))
    }

    /// Value at gap `t = 1 - r`, with `t` clamped to `[1e-12, 1]`.
    pub fn eval_gap(&self, t: f64) -> f64 {
        (self.of_gap)(t.clamp(CLAMP_GAP, 1.0))
    }

    /// Checks the declared flags and positivity on a fixed 2048-point grid.
    pub fn self_test(&self) -> std::result::Result<(), String> {
        let radii = clustered_radii(2048);
        let vals: Vec<f64> = radii.iter().map(|&r| self.eval(r)).collect();
        if let Some((r, v)) = radii
            .iter()
            .zip(&vals)
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(format!("{}: non-positive value {v} at r = {r}", self.id));
        }
        let rising = radii
            .windows(2)
            .zip(vals.windows(2))
            .find(|(_, v)| v[1] > v[0]);
        match (self.decreasing, rising) {
            (true, Some((r, v))) => {
                return Err(format!(
                    "{}: declared decreasing but v({}) = {} < v({}) = {}",
                    self.id, r[0], v[0], r[1], v[1]
                ))
            }
            (false, None) => {
                return Err(format!(
                    "{}: declared not decreasing but is decreasing on the grid",
                    self.id
                ))
            }
            _ => {}
        }
        let tail: Vec<f64> = (4..=12)
            .map(|k| self.eval_gap(10f64.powi(-k)))
            .collect();
        let vanishing = tail.windows(2).all(|w| w[1] < w[0]) && tail[8] < 0.5 * self.eval(0.0);
        if self.typical != vanishing {
            return Err(format!(
                "{}: typical flag {} disagrees with boundary values {:?}",
                self.id, self.typical, tail
            ));
        }
        Ok(())
    }
}

/// `v_log(z) = (1 - |z|) log(2 / (1 - |z|))`.
pub fn weight_vlog() -> Weight {
    Weight::from_gap("vlog", true, false, |t| t * (2.0 / t).ln())
}

/// `w_log(z) = 1 / log log(4 / (1 - |z|^2))`.
pub fn weight_wlog() -> Weight {
    Weight::from_gap("wlog", true, true, |t| {
        let one_minus_r2 = t * (2.0 - t);
        1.0 / (4.0 / one_minus_r2).ln().ln()
    })
}

/// `v_3(z) = (1 - |z|) log(3 / (1 - |z|))`.
pub fn weight_v3() -> Weight {
    Weight::from_gap("v3", true, true, |t| t * (3.0 / t).ln())
}

/// `v_e(z) = (1 - |z|) log(2e / (1 - |z|))`.
pub fn weight_ve() -> Weight {
    Weight::from_gap("ve", true, true, |t| {
        t * (2.0 * std::f64::consts::E / t).ln()
    })
}

/// The constant weight 1, used for plain sup-modulus problems.
pub fn weight_unit() -> Weight {
    Weight::from_gap("unit", false, true, |_| 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightId {
    Vlog,
    Wlog,
    V3,
    Ve,
}

impl WeightId {
    pub const ALL: [WeightId; 4] = [WeightId::Vlog, WeightId::Wlog, WeightId::V3, WeightId::Ve];

    pub fn weight(self) -> Weight {
        match self {
            WeightId::Vlog => weight_vlog(),
            WeightId::Wlog => weight_wlog(),
            WeightId::V3 => weight_v3(),
            WeightId::Ve => weight_ve(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WeightId::Vlog => "vlog",
            WeightId::Wlog => "wlog",
            WeightId::V3 => "v3",
            WeightId::Ve => "ve",
        }
    }
}

impl FromStr for WeightId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightId::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown weight `{s}` (vlog|wlog|v3|ve)")))
    }
}

impl fmt::Display for WeightId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upper estimate of the associated weight built from the normalized
/// monomials `g_n / ||g_n||`, `0 <= n <= nmax`:
/// `eval(r) = (max_n r^n / ||g_n||_{H_v})^{-1}`.
///
/// A sup over a sub-family under-estimates `1 / v~`, so `eval >= v~ >= v`
/// pointwise, and the estimate can only decrease as `nmax` grows.
#[derive(Debug, Clone)]
pub struct AssociatedWeightEstimate {
    pub base: Weight,
    pub nmax: usize,
    log_norms: Arc<[f64]>,
}

impl AssociatedWeightEstimate {
    pub fn eval(&self, r: f64) -> f64 {
        let r = clamp_radius(r);
        if r == 0.0 {
            return self.log_norms[0].exp();
        }
        let lr = r.ln();
        let best = self
            .log_norms
            .iter()
            .enumerate()
            .map(|(n, lm)| n as f64 * lr - lm)
            .fold(f64::NEG_INFINITY, f64::max);
        (-best).exp()
    }

    /// The estimate as a radial weight usable by the sup solvers.
    pub fn as_weight(&self) -> Weight {
        let this = self.clone();
        Weight {
            id: format!("assoc({},{})", self.base.id(), self.nmax).into(),
            of_gap: Arc::new(move |t| this.eval(1.0 - t)),
            radial: true,
            typical: self.base.typical,
            decreasing: self.base.decreasing,
        }
    }
}

pub fn associated_weight(base: &Weight, nmax: usize) -> Result<AssociatedWeightEstimate> {
    if !base.radial {
        return Err(Error::InvalidArgument(format!(
            "associated weight needs a radial base weight, `{}` is not",
            base.id()
        )));
    }
    if nmax == 0 {
        return Err(Error::InvalidArgument(
            "associated weight needs nmax >= 1".into(),
        ));
    }
    let log_norms: Vec<f64> = (0..=nmax)
        .map(|n| monomial_growth_norm(base, n as u32).ln())
        .collect();
    Ok(AssociatedWeightEstimate {
        base: base.clone(),
        nmax,
        log_norms: log_norms.into(),
    })
}

/// Min and max of `a(r) / b(r)` over `grid`.
pub fn weight_equivalence_band(a: &Weight, b: &Weight, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &r in grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "radius grid must lie in [0, 1), found {r}"
            )));
        }
        let (va, vb) = (a.eval(r), b.eval(r));
        if !(va > 0.0 && vb > 0.0 && va.is_finite() && vb.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weights must be positive on the grid: {}({r}) = {va}, {}({r}) = {vb}",
                a.id(),
                b.id()
            )));
        }
        let q = va / vb;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn closed_forms_at_center() {
        assert!((weight_vlog().eval(0.0) - LN_2).abs() < 1e-15);
        assert!((weight_v3().eval(0.0) - 3f64.ln()).abs() < 1e-15);
        assert!((weight_ve().eval(0.0) - (1.0 + LN_2)).abs() < 1e-15);
        // 1 / log(log 4), high-precision value
        assert!((weight_wlog().eval(0.0) - 3.061_528_206_093_547_5).abs() < 1e-12);
    }

    #[test]
    fn vlog_peak_and_boundary() {
        let v = weight_vlog();
        assert!((v.eval(1.0 - 2.0 / E) - 2.0 / E).abs() < 1e-15);
        // 1e-8 * log(2e8)
        let got = v.eval_gap(1e-8);
        assert!((got - 1.911_382_792_451_231e-7).abs() < 1e-18, "{got}");
    }

    #[test]
    fn wlog_near_boundary_matches_direct_evaluation() {
        // mpmath: 1/log(log(4/(1-(1-1e-6)^2)))
        let got = weight_wlog().eval_gap(1e-6);
        assert!((got - 0.373_867_332_773_661_9).abs() < 1e-12, "{got}");
    }

    #[test]
    fn flags_pass_self_test() {
        for w in WeightId::ALL.map(WeightId::weight) {
            w.self_test().unwrap();
        }
        weight_unit().self_test().unwrap();
        let lying = Weight::from_gap("lying", true, true, |t| t * (2.0 / t).ln());
        assert!(lying.self_test().is_err());
    }

    #[test]
    fn finite_and_positive_at_center_and_clamp() {
        for w in WeightId::ALL.map(WeightId::weight) {
            for r in [0.0, 1.0 - 1e-12, 1.0, 2.0] {
                let v = w.eval(r);
                assert!(v.is_finite() && v > 0.0, "{} at {r}", w.id());
            }
        }
    }

    #[test]
    fn typical_weights_vanish_fast() {
        for w in [weight_vlog(), weight_v3(), weight_ve()] {
            for k in 4..=12 {
                let t = 10f64.powi(-k);
                assert!(w.eval_gap(t) < 10f64.powi(-k + 2), "{} k={k}", w.id());
            }
        }
    }

    #[test]
    fn wlog_strictly_decreasing() {
        let w = weight_wlog();
        let radii = clustered_radii(4096);
        let vals: Vec<f64> = radii.iter().map(|&r| w.eval(r)).collect();
        assert!(vals.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn band_identity_and_validation() {
        let v = weight_vlog();
        let grid = clustered_radii(100);
        assert_eq!(weight_equivalence_band(&v, &v, &grid).unwrap(), (1.0, 1.0));
        assert!(weight_equivalence_band(&v, &v, &[0.5, 1.0]).is_err());
        assert!(weight_equivalence_band(&v, &v, &[]).is_err());
    }

    #[test]
    fn ve_over_vlog_band() {
        let (lo, hi) =
            weight_equivalence_band(&weight_ve(), &weight_vlog(), &clustered_radii(10_000)).unwrap();
        assert!(lo >= 1.0);
        assert!((hi - (1.0 + 1.0 / LN_2)).abs() < 1e-12);
    }

    #[test]
    fn associated_weight_rejects_zero_nmax() {
        assert!(associated_weight(&weight_wlog(), 0).is_err());
    }
}
