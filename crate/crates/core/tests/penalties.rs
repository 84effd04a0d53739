mod common;

use cdfreg::penalties::{Concavity, Family, PenaltyError, PenaltyModel};
use common::{cdf_by_quadrature, random_model, rng, sampleable_families, trapezoid};
use proptest::prelude::*;
use rand::Rng;

fn weibull(k: f64, sigma: f64) -> PenaltyModel {
    PenaltyModel::weibull(k, sigma).unwrap()
}

#[test]
fn pdf_examples() {
    assert_eq!(
        PenaltyModel::exponential(1.0).unwrap().pdf(0.0).unwrap(),
        1.0
    );
    assert_eq!(PenaltyModel::uniform(2.0).unwrap().pdf(3.0).unwrap(), 0.0);

    // unimodal with an interior maximum
    let m = weibull(1.5, 1.0);
    let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.01).collect();
    let f: Vec<f64> = grid.iter().map(|&t| m.pdf(t).unwrap()).collect();
    let peak = (0..f.len()).max_by(|&i, &j| f[i].total_cmp(&f[j])).unwrap();
    assert!(peak > 0 && peak < f.len() - 1);
    assert!(f[..=peak].windows(2).all(|w| w[0] <= w[1]));
    assert!(f[peak..].windows(2).all(|w| w[0] >= w[1]));
    assert!(matches!(m.pdf(-1.0), Err(PenaltyError::Domain(_))));
}

#[test]
fn cdf_examples() {
    assert!((weibull(1.0, 1.0).cdf(2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
    assert!((PenaltyModel::folded_cauchy().cdf(1.0).unwrap() - 0.5).abs() < 1e-15);

    let gg = PenaltyModel::generalized_gamma(1.0, 2.0, 2.0).unwrap();
    let oracle = trapezoid(|t| gg.pdf(t).unwrap(), 0.0, 1.0, 1_000_000);
    assert!((gg.cdf(1.0).unwrap() - oracle).abs() < 1e-10);
    let rayleigh = PenaltyModel::rayleigh(0.5f64.sqrt()).unwrap();
    assert!((gg.cdf(1.0).unwrap() - rayleigh.cdf(1.0).unwrap()).abs() < 1e-12);
    assert!(gg.cdf(-0.1).is_err());
}

#[test]
fn quantile_examples() {
    for (k, sigma, n) in [(0.5, 1.0, 256.0), (1.0, 2.0, 100.0), (2.0, 0.3, 10.0)] {
        let t = weibull(k, sigma).inverse_cdf(1.0 - 1.0 / n).unwrap();
        let expected = sigma * f64::ln(n).powf(1.0 / k);
        assert!(
            (t - expected).abs() <= 1e-12 * expected.max(1.0),
            "{t} vs {expected}"
        );
    }
    assert_eq!(
        PenaltyModel::exponential(1.0)
            .unwrap()
            .inverse_cdf(0.0)
            .unwrap(),
        0.0
    );
    assert!(
        (PenaltyModel::uniform(2.0)
            .unwrap()
            .inverse_cdf(0.25)
            .unwrap()
            - 0.5)
            .abs()
            < 1e-15
    );
    assert!(weibull(1.0, 1.0).inverse_cdf(1.0).is_err());
    assert!(weibull(1.0, 1.0).inverse_cdf(-0.1).is_err());
}

#[test]
fn penalty_examples() {
    for f in Family::ALL {
        let m = if f == Family::DiracDelta {
            PenaltyModel::dirac()
        } else {
            random_model(f, &mut rng(1))
        };
        assert_eq!(m.penalty(&[0.0; 7]).unwrap(), 0.0);
    }
    let ln2 = 2f64.ln();
    assert!((weibull(1.0, 1.0).penalty(&[ln2, ln2]).unwrap() - 1.0).abs() < 1e-15);
    assert!(weibull(1.0, 1.0).penalty(&[1.0, f64::NAN]).is_err());
    assert_eq!(
        PenaltyModel::dirac().penalty(&[0.0, -2.0, 1e-300]).unwrap(),
        2.0
    );
}

#[test]
fn compressible_signal_measures_stay_below_l0() {
    let x: Vec<f64> = (1..=50).map(|j| (j as f64).powi(-2)).collect();
    let values: Vec<f64> = [0.001, 0.01, 0.1, 1.0, 10.0]
        .iter()
        .map(|&sigma| weibull(1.5, sigma).penalty(&x).unwrap())
        .collect();
    assert!(values.iter().all(|&v| v < 50.0));
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn weight_examples() {
    assert_eq!(weibull(1.0, 1.0).irl1_weight(0.0, 0.0).unwrap(), 1.0);
    assert!(matches!(
        weibull(0.5, 1.0).irl1_weight(0.0, 0.0),
        Err(PenaltyError::Singularity { .. })
    ));
    let w = weibull(1.0, 2.0).irl1_weight(2.0, 0.0).unwrap();
    // k/σ^k |x|^(k-1) e^(-|x/σ|^k) at k = 1
    let oracle = 1.0 / 2.0 * (-(2.0f64 / 2.0)).exp();
    assert!((w - oracle).abs() < 1e-15);
    assert!((w - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
    let w = weibull(0.5, 1.0).irl1_weight(0.0, 1e-8).unwrap();
    assert!(w.is_finite() && w > 0.0);
}

#[test]
fn scaled_curve_examples() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    for f in sampleable_families() {
        let m = random_model(f, &mut rng(4));
        let c = m.scaled_penalty_curve(&[1.0]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15, "{m}");
    }
    let lin = weibull(1.0, 100.0).scaled_penalty_curve(&grid).unwrap();
    for (t, c) in grid.iter().zip(&lin) {
        assert!((c - t).abs() <= 0.01, "t={t}: {c}");
    }
    let step = weibull(1.0, 1e-3).scaled_penalty_curve(&[0.5]).unwrap();
    assert!((step[0] - 1.0).abs() <= 1e-3);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(PenaltyModel::weibull(0.0, 1.0).is_err());
    assert!(PenaltyModel::weibull(1.0, -1.0).is_err());
    assert!(PenaltyModel::scad(1.0, 1.0).is_err());
    assert!(PenaltyModel::exponential(f64::INFINITY).is_err());
    assert!(PenaltyModel::new(Family::Weibull, &[1.0]).is_err());
}

/// For every family and 10³ random parameterizations: F non-decreasing on a
/// 10³-point grid, F(0) = 0, F at the 0.999999 quantile ≥ 1 − 10⁻⁵.
#[test]
fn cdf_shape_over_random_parameters() {
    let mut r = rng(11);
    for f in sampleable_families() {
        for _ in 0..1000 {
            let m = random_model(f, &mut r);
            assert_eq!(m.cdf(0.0).unwrap(), 0.0, "{m}");
            let top = m.inverse_cdf(0.999_999).unwrap();
            assert!(m.cdf(top).unwrap() >= 1.0 - 1e-5, "{m}");
            let mut prev = 0.0;
            for i in 0..1000 {
                let v = m.cdf(top * i as f64 / 999.0).unwrap();
                assert!(v >= prev, "{m} not monotone at step {i}");
                assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }
}

#[test]
fn cdf_matches_integrated_density() {
    let mut r = rng(12);
    for f in sampleable_families() {
        for _ in 0..40 {
            let m = random_model(f, &mut r);
            let t = m.inverse_cdf(r.random_range(0.02..0.98)).unwrap();
            let q = cdf_by_quadrature(&m, t);
            let c = m.cdf(t).unwrap();
            assert!(
                (c - q).abs() <= 1e-8,
                "{m} at t={t}: cdf {c}, quadrature {q}"
            );
        }
    }
}

#[test]
fn quantile_round_trip() {
    let mut r = rng(13);
    for f in sampleable_families() {
        for _ in 0..200 {
            let m = random_model(f, &mut r);
            for i in 1..=99 {
                let p = i as f64 / 100.0;
                let t = m.inverse_cdf(p).unwrap();
                assert!((m.cdf(t).unwrap() - p).abs() <= 1e-8, "{m} at p={p}");
            }
        }
    }
}

#[test]
fn concavity_matches_density_slope() {
    let mut r = rng(14);
    for f in sampleable_families() {
        for _ in 0..100 {
            let m = random_model(f, &mut r);
            let end = m
                .support_end()
                .unwrap_or_else(|| m.inverse_cdf(0.999).unwrap());
            // geometric grid, so that a mode close to zero is not stepped over
            let lo = 1e-9 * end.min(1.0);
            let f_vals: Vec<f64> = (0..=2000)
                .map(|i| m.pdf(lo * (end / lo).powf(i as f64 / 2001.0)).unwrap())
                .collect();
            let nonincreasing = f_vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
            assert_eq!(m.concavity() == Concavity::Concave, nonincreasing, "{m}");
        }
    }
}

fn any_model() -> impl Strategy<Value = PenaltyModel> {
    (0..Family::ALL.len(), any::<u64>()).prop_map(|(i, seed)| {
        let f = Family::ALL[i];
        if f == Family::DiracDelta {
            PenaltyModel::dirac()
        } else {
            random_model(f, &mut rng(seed))
        }
    })
}

fn concave_model() -> impl Strategy<Value = PenaltyModel> {
    any_model().prop_filter("concave", |m| m.concavity() == Concavity::Concave)
}

fn sparse_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], 1..24)
}

proptest! {
    #[test]
    fn penalty_is_monotone_in_magnitudes(m in any_model(), x in sparse_vec(), grow in prop::collection::vec(0.0..3.0f64, 24)) {
        let y: Vec<f64> = x.iter().zip(&grow).map(|(v, g)| v.signum() * (v.abs() + g)).collect();
        prop_assert!(m.penalty(&x).unwrap() <= m.penalty(&y).unwrap() + 1e-12);
    }

    #[test]
    fn penalty_is_sign_symmetric(m in any_model(), x in sparse_vec()) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(m.penalty(&x).unwrap(), m.penalty(&neg).unwrap());
    }

    #[test]
    fn penalty_is_bounded_by_support_size(m in any_model(), x in sparse_vec()) {
        let j = m.penalty(&x).unwrap();
        let l0 = x.iter().filter(|v| **v != 0.0).count() as f64;
        prop_assert!(j >= 0.0 && j <= l0 + 1e-12, "J = {} > {}", j, l0);
    }

    #[test]
    fn concave_penalties_are_subadditive(m in concave_model(), x in sparse_vec(), y in sparse_vec()) {
        let n = x.len().min(y.len());
        let sum: Vec<f64> = x[..n].iter().zip(&y[..n]).map(|(a, b)| a + b).collect();
        let lhs = m.penalty(&sum).unwrap();
        prop_assert!(lhs <= m.penalty(&x[..n]).unwrap() + m.penalty(&y[..n]).unwrap() + 1e-12);
    }

    #[test]
    fn weibull_large_scale_tends_to_lk(x in prop::collection::vec(-2.0..2.0f64, 20), k in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
        let max = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assume!(max > 0.0);
        let sigma = 1e3 * max;
        let lk: f64 = x.iter().map(|v| v.abs().powf(k)).sum();
        let scaled = sigma.powf(k) * weibull(k, sigma).penalty(&x).unwrap();
        // 1 - (1 - e^(-z))/z ≤ z/2 entrywise, with z ≤ (max/σ)^k
        let leading = 0.5 * (max / sigma).powf(k);
        prop_assert!(scaled <= lk && (lk - scaled) / lk <= leading * (1.0 + 1e-9));
    }

    #[test]
    fn weibull_small_scale_tends_to_l0(x in sparse_vec(), k in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
        let min = x.iter().filter(|v| **v != 0.0).fold(f64::INFINITY, |a, v| a.min(v.abs()));
        prop_assume!(min.is_finite());
        let l0 = x.iter().filter(|v| **v != 0.0).count() as f64;
        let j = weibull(k, min / 1e3).penalty(&x).unwrap();
        prop_assert!((j - l0).abs() <= 1e-6);
    }

    #[test]
    fn spec_text_round_trips(m in any_model()) {
        let back: PenaltyModel = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }
}
