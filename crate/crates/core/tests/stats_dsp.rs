mod common;

use aadkit::dsp::{pca_apply, pca_fit, resample_linear, zscore_apply, zscore_fit};
use aadkit::stats::{improvement_map, paired_t_test, pearson, student_t_two_sided};
use aadkit::{Error, SignalMatrix};
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

#[test]
fn t_distribution_matches_reference() {
    for df in [2.0, 4.0, 10.0, 27.0] {
        let reference = StudentsT::new(0.0, 1.0, df).unwrap();
        for i in 0..=160 {
            let t = -8.0 + 0.1 * i as f64;
            let p = 2.0 * reference.cdf(-f64::abs(t));
            assert!((student_t_two_sided(t, df) - p).abs() <= 1e-6, "df {df}, t {t}");
        }
    }
    // tabulated two-sided 5 % critical values
    for (df, t) in [(2.0, 4.302653), (4.0, 2.776445), (10.0, 2.228139), (27.0, 2.051831)] {
        assert!((student_t_two_sided(t, df) - 0.05).abs() < 1e-6);
    }
}

#[test]
fn paired_t_test_reference() {
    let a = [0.31, 0.28, 0.40, 0.35, 0.22, 0.30];
    let b = [0.25, 0.27, 0.33, 0.30, 0.24, 0.21];
    let r = paired_t_test(&a, &b).unwrap();
    let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / 6.0;
    let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0).sqrt();
    assert!((r.t - mean / (sd / 6f64.sqrt())).abs() < 1e-12);
    assert_eq!(r.df, 5);
    let reference = StudentsT::new(0.0, 1.0, 5.0).unwrap();
    assert!((r.p_two_sided - 2.0 * reference.cdf(-r.t.abs())).abs() < 1e-9);
    assert!(matches!(paired_t_test(&a, &a), Err(Error::DegenerateTest(_))));
    assert!(matches!(paired_t_test(&a, &b[..5]), Err(Error::Dimension(_))));
}

#[test]
fn improvement_map_signs_and_masking() {
    let r_a = vec![vec![0.5, 0.6, 0.55, 0.58], vec![0.1, 0.2, 0.1, 0.2], vec![0.3, 0.3, 0.3, 0.3]];
    let r_b = vec![vec![0.1, 0.15, 0.12, 0.11], vec![0.2, 0.1, 0.2, 0.1], vec![0.3, 0.3, 0.3, 0.3]];
    let m = improvement_map(&r_a, &r_b, 0.05).unwrap();
    assert!(m.significant[0] && m.delta_r[0] > 0.4);
    assert!(!m.significant[1] && m.delta_r[1] == 0.0);
    assert!(!m.significant[2] && m.p_values[2].is_none());
    assert!((m.frac_better_a - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(m.frac_better_b, 0.0);
}

#[test]
fn pca_matches_eigendecomposition() {
    let mut rng = common::rng(5);
    // correlated channels so the spectrum is well separated
    let base = common::uniform_matrix(&mut rng, 5, 400, 100.0);
    let data = (0..400)
        .flat_map(|t| {
            let f = base.frame(t).to_vec();
            [f[0] * 3.0, f[0] + f[1] * 2.0, f[2], f[1] - f[3] * 0.5, f[4] * 0.2 + f[0]]
        })
        .collect();
    let m = SignalMatrix::new(5, 400, 100.0, data).unwrap();
    let model = pca_fit(&[&m], 5).unwrap();
    let (vals, vecs) = common::jacobi_eigen(&common::covariance(&[&m]));
    for i in 0..5 {
        assert!((model.explained_variance[i] - vals[i]).abs() <= 1e-6 * vals[0]);
        let sign = (0..5).map(|c| model.components[(i, c)] * vecs[(c, i)]).sum::<f64>().signum();
        for c in 0..5 {
            assert!((model.components[(i, c)] - sign * vecs[(c, i)]).abs() <= 1e-6);
        }
    }
    assert!((model.explained_ratio() - 1.0).abs() < 1e-12);
}

#[test]
fn pca_fit_across_blocks_matches_single_block() {
    // more frames than one streaming block
    let mut rng = common::rng(8);
    let a = common::uniform_matrix(&mut rng, 4, 3000, 100.0);
    let b = common::uniform_matrix(&mut rng, 4, 1500, 100.0);
    let model = pca_fit(&[&a, &b], 3).unwrap();
    let (vals, _) = common::jacobi_eigen(&common::covariance(&[&a, &b]));
    for i in 0..3 {
        assert!((model.explained_variance[i] - vals[i]).abs() < 1e-9);
    }
}

#[test]
fn resample_examples() {
    let m = SignalMatrix::from_channels(&[vec![0.0, 2.0, 4.0, 6.0]], 50.0).unwrap();
    let r = resample_linear(&m, 100.0).unwrap();
    assert_eq!(r.channel(0), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert_eq!(r.sample_rate_hz(), 100.0);
    assert!(matches!(resample_linear(&r, 50.0), Err(Error::UnsupportedRate(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pearson_bounded_and_matches_direct(seed in 0u64..100_000, n in 3usize..60) {
        let mut rng = common::rng(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((r - common::pearson_direct(&x, &y)).abs() <= 1e-12);
        prop_assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
        prop_assert!((pearson(&scaled, &y).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn zscore_standardizes_training_set(seed in 0u64..10_000, ch in 1usize..4) {
        let mut rng = common::rng(seed);
        let a = common::uniform_matrix(&mut rng, ch, 50, 100.0).map(|v| 5.0 * v + 2.0);
        let b = common::uniform_matrix(&mut rng, ch, 30, 100.0).map(|v| 5.0 * v + 2.0);
        let model = zscore_fit(&[&a, &b]).unwrap();
        let (za, zb) = (zscore_apply(&model, &a).unwrap(), zscore_apply(&model, &b).unwrap());
        for c in 0..ch {
            let v: Vec<f64> = za.channel(c).into_iter().chain(zb.channel(c)).collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
            prop_assert!(mean.abs() < 1e-10);
            prop_assert!((var - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pca_components_orthonormal_and_variances_sorted(seed in 0u64..10_000, d in 2usize..7) {
        let mut rng = common::rng(seed);
        let m = common::uniform_matrix(&mut rng, d, 60, 100.0);
        let k = d - 1;
        let model = pca_fit(&[&m], k).unwrap();
        let g = &model.components * model.components.transpose();
        for i in 0..k {
            for j in 0..k {
                let e = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g[(i, j)] - e).abs() < 1e-10);
            }
        }
        prop_assert!(model.explained_variance.windows(2).all(|w| w[0] >= w[1]));
        let scores = pca_apply(&model, &m).unwrap();
        let cov = common::covariance(&[&scores]);
        for i in 0..k {
            prop_assert!((cov[(i, i)] - model.explained_variance[i]).abs() < 1e-9);
            for j in 0..i {
                prop_assert!(cov[(i, j)].abs() < 1e-9);
            }
        }
    }
}
