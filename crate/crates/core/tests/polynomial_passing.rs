use mye_core::analysis::{apply_to_trend, trend_estimates, TrendPolynomial};
use mye_core::{design_filters, DesignSpec, MyeSeries, ObservedValue, RationalPoly};
use proptest::prelude::*;

/// `Y^(k)_t = Θ^(k)(B) p(t)` for k in 1,3,5 over `years`.
fn synthetic(p: &TrendPolynomial, years: std::ops::RangeInclusive<i32>) -> MyeSeries {
    let mut s = MyeSeries::new("synthetic", "index");
    for k in [1u32, 3, 5] {
        for t in years.clone() {
            let v = (0..k as i32).map(|i| p.eval(f64::from(t - i))).sum::<f64>() / f64::from(k);
            s.insert(k, t, ObservedValue::published(v)).unwrap();
        }
    }
    s
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn filters_pass_polynomials(
        d in 0usize..=4,
        coeffs in prop::collection::vec(-3.0f64..3.0, 5),
        t0 in 1990i32..2030,
    ) {
        let fs = design_filters(&DesignSpec::new([1, 3, 5], d).unwrap()).unwrap();
        // centre time to keep high powers well conditioned
        let p = TrendPolynomial::new(coeffs[..=d].to_vec());
        let shift = 2000.0;
        let shifted = |t: f64| p.eval(t - shift);
        let mut s = MyeSeries::new("synthetic", "index");
        for k in [1u32, 3, 5] {
            for t in (t0 - 20)..=t0 {
                let v = (0..k as i32).map(|i| shifted(f64::from(t - i))).sum::<f64>() / f64::from(k);
                s.insert(k, t, ObservedValue::published(v)).unwrap();
            }
        }
        let te = trend_estimates(&s, &fs, t0).unwrap();
        let truth = shifted(f64::from(t0));
        for (&k, &v) in &te.values {
            prop_assert!(close(v, truth), "k={} d={} got {} want {}", k, d, v, truth);
        }
        prop_assert!(close(te.values[&1], te.values[&3]) && close(te.values[&3], te.values[&5]));
    }
}

#[test]
fn delay_law_for_lines() {
    let line = TrendPolynomial::new(vec![0.0, 1.0]);
    for t0 in [-7, 0, 12, 2007] {
        let t = f64::from(t0);
        assert_eq!(
            apply_to_trend(&RationalPoly::sma(3).unwrap(), &line, t0),
            t - 1.0
        );
        assert_eq!(
            apply_to_trend(&RationalPoly::sma(5).unwrap(), &line, t0),
            t - 2.0
        );
    }
}

#[test]
fn quadratic_not_passed_by_linear_design() {
    let fs = design_filters(&DesignSpec::new([1, 3, 5], 1).unwrap()).unwrap();
    let quad = TrendPolynomial::new(vec![0.0, 0.0, 1.0]);
    let s = synthetic(&quad, 100..=120);
    let te = trend_estimates(&s, &fs, 120).unwrap();
    assert!((te.values[&3] - 14400.0).abs() > 1.0);
}
