use proptest::collection::vec;
use proptest::prelude::*;

use clesh::config::Config;
use clesh::curves::{fit_linear, fit_quadratic, sigmoid_jacobian_row, logistic, Coefficients, Family};
use clesh::dataset::{load_dataset, DatasetBundle};
use clesh::format::sig;
use clesh::interaction::{approximate_interactions, binarize_by_mean, margin_test, Partition};
use clesh::pipeline::select_features;
use clesh::selection::{classify_feature_kind, Kind};
use clesh::stats::{anova_oneway, kruskal_wallis, rank_sum_test, signed_rank_test, t_test, TTestMode};

fn sample(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(-100.0..100.0f64, min..max)
}

fn distinct(v: &[f64]) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| w[0] != w[1])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn p_values_are_probabilities(x in sample(3, 40), y in sample(3, 40), mu in -10.0..10.0f64) {
        let mut ps = Vec::new();
        for r in [
            t_test(&x, TTestMode::OneSample { mu }),
            t_test(&x, TTestMode::TwoSample { y: &y }),
            t_test(&x, TTestMode::Welch { y: &y }),
            rank_sum_test(&x, &y),
            signed_rank_test(&x, mu),
            anova_oneway(&[&x, &y]),
            kruskal_wallis(&[&x, &y]),
        ]
        .into_iter()
        .flatten()
        {
            ps.push(r.p_value);
        }
        prop_assert!(ps.iter().all(|p| (0.0..=1.0).contains(p)), "{ps:?}");
    }

    #[test]
    fn two_sample_tests_ignore_group_order(x in sample(2, 25), y in sample(2, 25)) {
        let a = rank_sum_test(&x, &y).unwrap().p_value;
        let b = rank_sum_test(&y, &x).unwrap().p_value;
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
        if let (Ok(a), Ok(b)) = (t_test(&x, TTestMode::TwoSample { y: &y }), t_test(&y, TTestMode::TwoSample { y: &x })) {
            prop_assert!(close(a.p_value, b.p_value, 1e-12));
        }
    }

    #[test]
    fn signed_rank_ignores_sign_flip(x in sample(1, 40), mu in -50.0..50.0f64) {
        let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = signed_rank_test(&x, mu).unwrap().p_value;
        let b = signed_rank_test(&flipped, -mu).unwrap().p_value;
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn rank_sum_p_shrinks_with_shift(x in sample(2, 7), y in sample(2, 7), step in 0.1..50.0f64) {
        prop_assume!(distinct(&x.iter().chain(&y).copied().collect::<Vec<_>>()));
        // Shift y away from x in the direction its U statistic already leans.
        let u_y = rank_sum_test(&y, &x).unwrap().statistic;
        let dir = if u_y >= (x.len() * y.len()) as f64 / 2.0 { 1.0 } else { -1.0 };
        let mut last = rank_sum_test(&x, &y).unwrap().p_value;
        for k in 1..=4 {
            let moved: Vec<f64> = y.iter().map(|v| v + dir * step * k as f64).collect();
            if !distinct(&x.iter().chain(&moved).copied().collect::<Vec<_>>()) {
                break;
            }
            let p = rank_sum_test(&x, &moved).unwrap().p_value;
            prop_assert!(p <= last + 1e-12, "p rose from {last} to {p}");
            last = p;
        }
    }

    #[test]
    fn anova_on_two_groups_is_pooled_t(x in sample(2, 30), y in sample(2, 30)) {
        let (Ok(f), Ok(t)) = (anova_oneway(&[&x, &y]), t_test(&x, TTestMode::TwoSample { y: &y })) else {
            return Ok(());
        };
        prop_assume!(!f.degenerate && !t.degenerate);
        prop_assert!(close(f.statistic, t.statistic * t.statistic, 1e-9));
        prop_assert!((f.p_value - t.p_value).abs() < 1e-9);
    }

    #[test]
    fn ols_residuals_are_orthogonal(pts in vec((-10.0..10.0f64, -10.0..10.0f64), 5..60)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-3));
        for fit in [fit_linear(&x, &y), fit_quadratic(&x, &y)].into_iter().flatten() {
            let r: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - fit.coefficients.eval(*a)).collect();
            let columns: Vec<Vec<f64>> = match fit.coefficients {
                Coefficients::Linear { .. } => vec![vec![1.0; x.len()], x.clone()],
                _ => vec![vec![1.0; x.len()], x.clone(), x.iter().map(|v| v * v).collect()],
            };
            for col in columns {
                let dot: f64 = col.iter().zip(&r).map(|(a, b)| a * b).sum();
                let scale: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt() * r.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(dot.abs() <= 1e-8 * scale.max(1e-12), "dot {dot} scale {scale}");
            }
        }
    }

    #[test]
    fn linear_fit_scales_with_x(pts in vec((-10.0..10.0f64, -10.0..10.0f64), 5..60), s in 0.01..100.0f64) {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-3));
        let base = fit_linear(&x, &y).unwrap();
        let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
        let scaled = fit_linear(&sx, &y).unwrap();
        prop_assume!(!base.degenerate);
        prop_assert!(close(scaled.coefficients.a(), base.coefficients.a() / s, 1e-9));
        prop_assert!((scaled.p_value_a.unwrap() - base.p_value_a.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn quadratic_never_fits_worse(pts in vec((-10.0..10.0f64, -10.0..10.0f64), 5..60)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        if let (Ok(l), Ok(q)) = (fit_linear(&x, &y), fit_quadratic(&x, &y)) {
            prop_assert!(q.rmse <= l.rmse + 1e-12 * (1.0 + l.rmse), "{} > {}", q.rmse, l.rmse);
        }
    }

    #[test]
    fn sigmoid_jacobian_matches_differences(
        l in -5.0..5.0f64, a in 0.1..3.0f64, x0 in -2.0..2.0f64, b in -2.0..2.0f64, x in -4.0..4.0f64,
    ) {
        let f = |p: [f64; 4]| p[0] * logistic(p[1] * (x - p[2])) + p[3];
        let params = [l, a, x0, b];
        let row = sigmoid_jacobian_row(params, x);
        let h = 1e-6;
        for i in 0..4 {
            let (mut up, mut down) = (params, params);
            up[i] += h;
            down[i] -= h;
            let fd = (f(up) - f(down)) / (2.0 * h);
            prop_assert!((row[i] - fd).abs() <= 1e-4 * fd.abs().max(1e-3), "d{i}: {} vs {fd}", row[i]);
        }
    }

    #[test]
    fn sig_round_trips(v in -1e6..1e6f64, digits in 1usize..6) {
        let s = sig(v, digits);
        let back: f64 = s.parse().unwrap();
        let ulp = if v == 0.0 { 0.0 } else { 10f64.powi(v.abs().log10().floor() as i32 + 1 - digits as i32) };
        prop_assert!((back - v).abs() <= ulp, "{v} -> {s}");
    }

    #[test]
    fn kind_ignores_order_and_duplicates(values in vec(0u8..30, 1..80), bound in 2usize..25) {
        let col: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let mut shuffled = col.clone();
        shuffled.reverse();
        shuffled.extend_from_slice(&col[..col.len() / 2]);
        prop_assert_eq!(classify_feature_kind(&col, bound), classify_feature_kind(&shuffled, bound));
    }

    #[test]
    fn mean_partition_covers_every_sample(col in sample(2, 200)) {
        let Ok(above) = binarize_by_mean(&col) else { return Ok(()); };
        let part = Partition::of_partner(&col, Kind::Continuous).unwrap();
        prop_assert_eq!(above.len(), col.len());
        prop_assert_eq!(part.members(0).len() + part.members(1).len(), col.len());
        for (i, &g) in part.assignment.iter().enumerate() {
            prop_assert!(g < part.n_groups());
            prop_assert_eq!(g == 1, above[i]);
        }
    }

    #[test]
    fn margin_test_ignores_group_order(f1 in sample(3, 60), shift in -5.0..5.0f64, strict in any::<bool>()) {
        let f2: Vec<f64> = f1.iter().enumerate().map(|(i, v)| 0.9 * v + shift + (i % 3) as f64).collect();
        let a = margin_test(&f1, &f2, 0.05, strict);
        let b = margin_test(&f2, &f1, 0.05, strict);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!(close(a.p_value, b.p_value, 1e-12), "{} vs {}", a.p_value, b.p_value);
        }
    }
}

fn bundle_from(seed_rows: &[(f64, f64, f64, f64)], scale: f64, shift: f64) -> DatasetBundle {
    let t: Vec<f64> = seed_rows.iter().map(|r| r.0).collect();
    let c: Vec<f64> = seed_rows.iter().map(|r| r.1 * scale + shift).collect();
    let st: Vec<f64> = seed_rows.iter().map(|r| r.2).collect();
    let sc: Vec<f64> = seed_rows.iter().map(|r| r.3).collect();
    DatasetBundle::new(vec!["t".into(), "c".into()], "y", vec![t, c], vec![st, sc]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partner_scores_are_affine_invariant(
        rows in vec((-5.0..5.0f64, -5.0..5.0f64, -1.0..1.0f64, -1.0..1.0f64), 20..120),
        scale in 0.01..50.0f64,
        shift in -20.0..20.0f64,
    ) {
        let base = approximate_interactions(0, &bundle_from(&rows, 1.0, 0.0), 0);
        let moved = approximate_interactions(0, &bundle_from(&rows, scale, shift), 0);
        prop_assert_eq!(&base.ranked_partners, &moved.ranked_partners);
        for (a, b) in base.partner_scores.iter().zip(&moved.partner_scores) {
            prop_assert!(close(*a, *b, 1e-9), "{a} vs {b}");
        }
        prop_assert_eq!(base, approximate_interactions(0, &bundle_from(&rows, 1.0, 0.0), 0));
    }

    #[test]
    fn chosen_k_is_bounded(
        n_features in 2usize..25,
        columns in vec(vec(-2.0..2.0f64, 30), 25),
        manual in proptest::option::of(1usize..40),
        scale in 0.1..10.0f64,
    ) {
        let shap: Vec<Vec<f64>> = columns[..n_features]
            .iter()
            .enumerate()
            .map(|(j, c)| c.iter().map(|v| v * (j + 1) as f64 * 0.3).collect())
            .collect();
        let features: Vec<Vec<f64>> = (0..n_features).map(|j| (0..30).map(|i| ((i * (j + 3)) % 7) as f64).collect()).collect();
        let names: Vec<String> = (0..n_features).map(|j| format!("f{j}")).collect();
        let bundle = DatasetBundle::new(names.clone(), "y", features.clone(), shap.clone()).unwrap();
        let config = Config { manual_num: manual, ..Config::default() };
        let (ranking, cuts) = select_features(&bundle, &config);
        prop_assert!(cuts.chosen_k <= n_features);
        if let Some(m) = manual {
            prop_assert_eq!(cuts.chosen_k, m.min(n_features));
        } else if cuts.cut_positions.iter().any(|k| (config.candidate_num_min..=config.candidate_num_max).contains(k)) {
            prop_assert!(cuts.cut_positions.contains(&cuts.chosen_k));
        }

        let scaled: Vec<Vec<f64>> = shap.iter().map(|c| c.iter().map(|v| v * scale).collect()).collect();
        let bundle = DatasetBundle::new(names, "y", features, scaled).unwrap();
        let (ranking2, cuts2) = select_features(&bundle, &config);
        prop_assert_eq!(ranking.order, ranking2.order);
        prop_assert_eq!(cuts.cut_positions, cuts2.cut_positions);
        prop_assert_eq!(cuts.chosen_k, cuts2.chosen_k);
    }

    #[test]
    fn dataset_round_trips_through_csv(
        columns in vec(vec(-1e3..1e3f64, 12), 1..6),
    ) {
        let k = columns.len();
        let names: Vec<String> = (0..k).map(|j| format!("col {j}")).collect();
        let shap: Vec<Vec<f64>> = columns.iter().map(|c| c.iter().map(|v| v / 7.0).collect()).collect();
        let bundle = DatasetBundle::new(names, "label", columns, shap).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (f, s) = (dir.path().join("f.csv"), dir.path().join("s.csv"));
        bundle.write_csv(&f, &s).unwrap();
        prop_assert_eq!(load_dataset(&f, &s, "label").unwrap(), bundle);
    }
}

#[test]
fn noiseless_families_refit_exactly() {
    let x: Vec<f64> = (0..50).map(|i| -3.0 + i as f64 * 0.12).collect();
    let cases = [
        (Family::Linear, Coefficients::Linear { a: 1.7, b: -0.4 }),
        (Family::Quadratic, Coefficients::Quadratic { a: 0.6, b: -1.1, c: 2.0 }),
        (Family::Sigmoid, Coefficients::Sigmoid { l: 2.0, a: 1.5, x0: 0.3, b: -1.0 }),
    ];
    for (family, truth) in cases {
        let y: Vec<f64> = x.iter().map(|v| truth.eval(*v)).collect();
        let fit = family.fit(&x, &y).unwrap();
        for v in &x {
            assert!((fit.coefficients.eval(*v) - truth.eval(*v)).abs() < 1e-6, "{family:?}");
        }
        assert!((fit.coefficients.a() - truth.a()).abs() < 1e-6, "{family:?}: {:?}", fit.coefficients);
    }
}
