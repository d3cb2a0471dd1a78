use blochlab::operators::{
    analyze, band_from_series, boundary_limsup_upper, i_ratio, j_ratio, ratio_series, OperatorConfig, Trend, Verdict,
};
use blochlab::testfns::{build_f, geometric_anchors};
use blochlab::{AnalyticExpr, Error, GridSpec, SymbolPair};
use num_complex::Complex64;
use proptest::prelude::*;

fn small() -> OperatorConfig {
    OperatorConfig {
        nmax: 64,
        grid: GridSpec::new(128, 64).unwrap(),
        ..OperatorConfig::default()
    }
}

#[test]
fn zero_symbol_annihilates_everything() {
    let cfg = small();
    let pair = SymbolPair::parse("0", "(z + 0.5)/(1 + 0.5*z)", cfg.grid).unwrap();
    let report = analyze(&pair, &cfg).unwrap();
    assert!(report.series.j.ratios.iter().chain(&report.series.i.ratios).all(|&r| r == 0.0));
    let band = report.band.unwrap();
    assert_eq!(band.q, 0.0);
    assert!(band.compact);
    assert_eq!(report.direct.upper.value, 0.0);
    assert_eq!(report.direct.lower_j.value, 0.0);
    assert_eq!(report.direct.lower_i.value, 0.0);
}

#[test]
fn upper_ladder_is_non_increasing() {
    let cfg = small();
    for (u, phi) in [("1", "z"), ("1 + z", "(z - 0.3i)/(1 + 0.3i*z)"), ("z^2", "(1 + z)/2"), ("exp(z)", "z^2")] {
        let pair = SymbolPair::parse(u, phi, cfg.grid).unwrap();
        let ladder = boundary_limsup_upper(&pair, &cfg).unwrap().ladder;
        assert!(!ladder.is_empty(), "{u}, {phi}");
        for w in ladder.windows(2) {
            assert!(w[1].value <= w[0].value, "{u}, {phi}: {} then {}", w[0].value, w[1].value);
        }
    }
}

#[test]
fn multiplication_by_z_is_bounded_and_not_compact() {
    let cfg = small();
    let pair = SymbolPair::parse("z", "z", cfg.grid).unwrap();
    let report = analyze(&pair, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Bounded);
    let band = report.band.unwrap();
    assert!(!band.compact);
    assert!(band.q > 0.5, "{}", band.q);
}

#[test]
fn steep_multiplier_reads_as_divergent_below_its_horizon() {
    // u' is about 1/n on the scales n <= 2 nmax can see, so the J tail grows
    let cfg = small();
    let pair = SymbolPair::parse("log(4/(1.0001 - z))", "z", cfg.grid).unwrap();
    let report = analyze(&pair, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Divergent);
    assert!(report.band.is_none());
    assert!(report.series.i.trend == Trend::Growing || report.series.j.trend == Trend::Growing);
}

#[test]
fn refusals_are_classified() {
    let grid = GridSpec::new(64, 32).unwrap();
    let err = SymbolPair::parse("1", "1.5*z", grid).unwrap_err();
    assert!(matches!(err, Error::NotSelfMap { .. }) && err.is_refusal());
    let err = SymbolPair::parse("1/(z - 0.5)", "z", grid).unwrap_err();
    assert!(matches!(err, Error::NotHolomorphic { .. }) && err.is_refusal());
    let err = SymbolPair::parse("1", "z +", grid).unwrap_err();
    assert!(matches!(err, Error::Parse(_)) && !err.is_refusal());
}

#[test]
fn family_members_vanish_on_compacta_like_one_over_level() {
    // |f| <= 3 |L|^2 / a_n + 2 |L|^3 / a_n^2 with L bounded on |z| <= 1/2
    let small_disk: Vec<Complex64> = (0..64)
        .flat_map(|j| [0.25, 0.5].map(|r| Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0)))
        .collect();
    let mut maxima = Vec::new();
    for a in geometric_anchors(20).into_iter().skip(4) {
        let fam = build_f(a).unwrap();
        let l_max = small_disk
            .iter()
            .map(|&z| (4.0 / (1.0 - a.conj() * z)).ln().ln().norm())
            .fold(0.0, f64::max);
        let f_max = small_disk.iter().map(|&z| fam.expr.eval(z).unwrap().norm()).fold(0.0, f64::max);
        let bound = 3.0 * l_max.powi(2) / fam.a_n + 2.0 * l_max.powi(3) / fam.a_n.powi(2);
        assert!(f_max <= bound, "anchor {a}: {f_max} > {bound}");
        maxima.push(f_max);
    }
    for w in maxima.windows(2) {
        assert!(w[1] < w[0], "{maxima:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ratios_scale_with_the_multiplier(re in -2.0f64..2.0, im in -2.0f64..2.0, b in 0.0f64..0.8) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-2);
        let cfg = OperatorConfig { nmax: 16, ..small() };
        let u = AnalyticExpr::parse("1 + z - z^3/3").unwrap();
        let phi = AnalyticExpr::parse(&format!("(z + {b})/(1 + {b}*z)")).unwrap();
        let base = SymbolPair::new(u.clone(), phi.clone(), cfg.grid).unwrap();
        let scaled = SymbolPair::new(u.scale(c), phi, cfg.grid).unwrap();
        let solver = cfg.solver();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        for n in [0u32, 1, 5, 16] {
            prop_assert!(close(j_ratio(&solver, &scaled, n).unwrap(), c.norm() * j_ratio(&solver, &base, n).unwrap()));
            if n > 0 {
                prop_assert!(close(i_ratio(&solver, &scaled, n).unwrap(), c.norm() * i_ratio(&solver, &base, n).unwrap()));
            }
        }
        let q0 = band_from_series(&ratio_series(&base, &cfg, cfg.nmax).unwrap(), cfg.tol).q;
        let q1 = band_from_series(&ratio_series(&scaled, &cfg, cfg.nmax).unwrap(), cfg.tol).q;
        prop_assert!(close(q1, c.norm() * q0), "{q1} vs {}", c.norm() * q0);
    }
}
