use istanbul_core::model::{joint_law_gt, LawMode};
use istanbul_core::report::format_sig6;
use istanbul_core::{gic_approx, gic_quadrature, uoc_price, IstanbulContract, MarketParams};
use proptest::prelude::*;

fn black_scholes_call(m: &MarketParams, strike: f64) -> f64 {
    let phi = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
    let sd = m.vol * m.maturity.sqrt();
    let d1 = ((m.spot / strike).ln() + (m.rate + 0.5 * m.vol * m.vol) * m.maturity) / sd;
    m.spot * phi(d1) - strike * (-m.rate * m.maturity).exp() * phi(d1 - sd)
}

prop_compose! {
    fn market_and_levels()(
        spot in 40.0..100.0f64,
        rate in 0.0..0.08f64,
        vol in 0.15..0.5f64,
        maturity in 0.25..2.0f64,
        barrier_gap in 0.01..0.25f64,
        strike_ratio in 0.85..1.2f64,
    ) -> (MarketParams, IstanbulContract) {
        let barrier = spot * (1.0 + barrier_gap);
        (
            MarketParams::new(spot, rate, vol, maturity).unwrap(),
            IstanbulContract::new(barrier * strike_ratio, barrier).unwrap(),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn approximation_tracks_quadrature((m, c) in market_and_levels()) {
        let approx = gic_approx(&m, &c).unwrap().value;
        let exact = gic_quadrature(&m, &c, 1e-8).unwrap().value;
        prop_assert!(approx >= 0.0);
        prop_assert!((approx - exact).abs() <= 1e-3 * exact.max(1e-3 * m.spot), "{} vs {}", approx, exact);
    }

    #[test]
    fn approximation_falls_with_strike((m, c) in market_and_levels(), step in 0.01..3.0f64) {
        let higher = IstanbulContract::new(c.strike + step, c.barrier).unwrap();
        let lo = gic_approx(&m, &c).unwrap().value;
        let hi = gic_approx(&m, &higher).unwrap().value;
        prop_assert!(hi <= lo + 1e-9 * m.spot);
    }

    #[test]
    fn knock_out_is_cheaper_than_vanilla((m, c) in market_and_levels()) {
        let uoc = uoc_price(&m, c.strike, c.barrier).unwrap();
        prop_assert!(uoc >= 0.0);
        prop_assert!(uoc <= black_scholes_call(&m, c.strike) + 1e-12);
    }

    #[test]
    fn joint_cdf_is_nondecreasing((m, c) in market_and_levels(), a in 0.7..1.5f64, b in 0.7..1.5f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = joint_law_gt(lo * c.barrier, &m, &c, LawMode::Cdf).unwrap();
        let f_hi = joint_law_gt(hi * c.barrier, &m, &c, LawMode::Cdf).unwrap();
        prop_assert!(f_lo <= f_hi + 1e-9);
        prop_assert!((0.0..=1.0).contains(&f_lo));
    }

    #[test]
    fn csv_numbers_keep_six_digits(v in prop_oneof![1e-6..1e6f64, -1e6..-1e-6f64]) {
        let s = format_sig6(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-6 * v.abs(), "{} -> {}", v, s);
        let digits = s.trim_start_matches('-').chars().filter(char::is_ascii_digit).skip_while(|&d| d == '0').count();
        prop_assert_eq!(digits, 6, "{}", s);
    }
}
