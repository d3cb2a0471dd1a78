//! JSON reports and CSV ratio tables.
//!
//! Objects are emitted with sorted keys and shortest round-trip floats, so a
//! fixed configuration always produces the same bytes.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::operators::{AnalysisReport, RatioSeries, Verdict};
use crate::zygmund::CphiReport;

pub const SCHEMA_VERSION: u32 = 1;

fn pairs(series: &RatioSeries) -> Value {
    Value::Array(
        series
            .n_values
            .iter()
            .zip(&series.ratios)
            .map(|(&n, &r)| json!([n, r]))
            .collect(),
    )
}

fn base(report: &AnalysisReport, space: &str) -> serde_json::Map<String, Value> {
    let cfg = &report.config;
    let band = report.band.as_ref();
    let direct = &report.direct;
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "space": space,
        "pair": {
            "u": report.u,
            "phi": report.phi,
            "phi_sup": report.phi_sup,
        },
        "verdict": report.verdict,
        "Q": band.map(|b| b.q),
        "compact": band.map(|b| b.compact),
        "band": band.map(|b| json!({
            "Q": b.q,
            "compact": b.compact,
            "scale": b.scale,
            "threshold": b.threshold,
            "interpretation": "essential norm lies in [Q/K, K*Q] for an unknown constant K",
        })),
        "series": {
            "J": pairs(&report.series.j),
            "I": pairs(&report.series.i),
        },
        "direct": {
            "upper": direct.upper,
            "lowerJ": direct.lower_j,
            "lowerI": direct.lower_i,
            "growth_target": direct.growth_target.tail_estimate,
        },
        "diagnostics": {
            "trend": {
                "J": report.series.j.trend,
                "I": report.series.i.trend,
            },
            "slope": {
                "J": report.series.j.slope,
                "I": report.series.i.slope,
            },
            "tail_estimate": {
                "J": report.series.j.tail_estimate,
                "I": report.series.i.tail_estimate,
            },
            "scale": report.series.scale,
            "running_max": report.running_max,
            "running_max_doubled": report.running_max_doubled,
            "verdict_nmax": 2 * cfg.nmax,
            "growth_target_series": direct
                .growth_target
                .n_values
                .iter()
                .zip(&direct.growth_target.ratios)
                .map(|(&n, &r)| json!([n, r]))
                .collect::<Vec<_>>(),
            "assoc_nmax": cfg.assoc_nmax,
            "ladder_depth": cfg.ladder_depth,
            "notes": notes(report),
        },
        "nmax": cfg.nmax,
        "grid": cfg.grid.to_string(),
        "tol": cfg.tol,
    });
    match value {
        Value::Object(map) => map,
        _ => unreachable!("json! object literal"),
    }
}

fn notes(report: &AnalysisReport) -> Vec<String> {
    let mut out = Vec::new();
    if report.verdict == Verdict::Divergent {
        out.push("band omitted: ratio tails grow, the operator is not continuous".to_owned());
    }
    if report.verdict == Verdict::Inconclusive {
        out.push("verdict inconclusive at this nmax; rerun with a larger --nmax".to_owned());
    }
    for (name, b) in [
        ("upper", &report.direct.upper),
        ("lowerJ", &report.direct.lower_j),
        ("lowerI", &report.direct.lower_i),
    ] {
        if b.truncated {
            out.push(format!("{name}: some ladder rungs are not resolved by the grid"));
        }
        if b.ladder.iter().any(|r| r.beyond_horizon) {
            out.push(format!(
                "{name}: deep rungs lie beyond the associated-weight horizon 1 - 1/assoc_nmax"
            ));
        }
    }
    out
}

/// Report for `W_{u,phi}` on the logarithmic Bloch space.
pub fn analysis_json(report: &AnalysisReport) -> Value {
    Value::Object(base(report, "bloch-log"))
}

/// Report for `C_phi` on the logarithmic Zygmund space.
pub fn cphi_json(report: &CphiReport) -> Value {
    let mut map = base(&report.report, "zygmund-log");
    let p = &report.primed;
    let i_ns: Vec<u32> = p.n_values.iter().copied().filter(|&n| n >= 1).collect();
    map.insert(
        "primed".to_owned(),
        json!({
            "J": p.n_values.iter().zip(&p.j).map(|(&n, &r)| json!([n, r])).collect::<Vec<_>>(),
            "I": i_ns.iter().zip(&p.i).map(|(&n, &r)| json!([n, r])).collect::<Vec<_>>(),
            "max_dev_J": p.max_dev_j,
            "max_dev_I": p.max_dev_i,
            "agree": p.agree,
        }),
    );
    Value::Object(map)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Number with 17 significant digits.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `n, j_ratio, i_ratio`; `i_ratio` is empty at `n = 0`.
pub fn ratio_csv(j: &RatioSeries, i: &RatioSeries) -> String {
    let mut out = String::from("n,j_ratio,i_ratio\n");
    for (&n, &jr) in j.n_values.iter().zip(&j.ratios) {
        let ir = i
            .n_values
            .iter()
            .position(|&m| m == n)
            .map(|k| full_precision(i.ratios[k]))
            .unwrap_or_default();
        writeln!(out, "{n},{},{ir}", full_precision(jr)).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{SeriesKind, Trend};

    fn series(kind: SeriesKind, ns: Vec<u32>, rs: Vec<f64>) -> RatioSeries {
        RatioSeries {
            kind,
            n_values: ns,
            ratios: rs,
            tail_estimate: 0.0,
            trend: Trend::Bounded,
            slope: None,
        }
    }

    #[test]
    fn csv_layout() {
        let j = series(SeriesKind::J, vec![0, 1, 2], vec![0.0, 0.5, 1.0 / 3.0]);
        let i = series(SeriesKind::I, vec![1, 2], vec![1.0, 2.0]);
        let csv = ratio_csv(&j, &i);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,j_ratio,i_ratio");
        assert_eq!(lines[1], "0,0.0000000000000000e0,");
        assert_eq!(lines[3], "2,3.3333333333333331e-1,2.0000000000000000e0");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, 0.1 + 0.2, 123456.789] {
            assert_eq!(full_precision(x).parse::<f64>().unwrap(), x);
        }
    }
}
