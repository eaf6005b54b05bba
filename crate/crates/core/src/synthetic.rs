//! Seeded synthetic datasets with known SHAP structure.
//!
//! Used for the bundled demo dataset, the examples, and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::curves::{logistic, Family};
use crate::dataset::DatasetBundle;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    Normal::new(0.0, sd).expect("positive sd").sample(rng)
}

/// Generating curve of each family on `x in [-3, 3]`.
pub fn family_signal(family: Family, x: f64) -> f64 {
    match family {
        Family::Linear => 2.0 * x,
        Family::Quadratic => x * x,
        Family::Sigmoid => 2.0 * logistic(3.0 * x) - 1.0,
    }
}

/// `n` points with `x ~ U(-3, 3)` and `y = signal(x) + noise`, where the
/// noise sd is `noise_frac` of the signal's peak-to-peak amplitude on the
/// sample. `family = None` gives pure standard normal noise.
pub fn family_sample(family: Option<Family>, n: usize, noise_frac: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
    let Some(family) = family else {
        let y = (0..n).map(|_| gaussian(&mut r, 1.0)).collect();
        return (x, y);
    };
    let signal: Vec<f64> = x.iter().map(|&v| family_signal(family, v)).collect();
    let (lo, hi) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let sd = noise_frac * (hi - lo);
    let y = signal.iter().map(|s| s + gaussian(&mut r, sd)).collect();
    (x, y)
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|j| format!("{prefix}{:02}", j + 1)).collect()
}

/// `n_features` features whose |SHAP| clusters around 1.0 for the first
/// `n_strong` and 0.5 for the rest, with sd `sigma` (a `0.5 / sigma` sd gap
/// at the cut) and random signs. Features within a cluster are identically
/// distributed.
pub fn cut_profile(n_samples: usize, n_features: usize, n_strong: usize, sigma: f64, seed: u64) -> DatasetBundle {
    let mut r = rng(seed);
    let mut features = Vec::with_capacity(n_features);
    let mut shap = Vec::with_capacity(n_features);
    for j in 0..n_features {
        let centre = if j < n_strong { 1.0 } else { 0.5 };
        let x: Vec<f64> = (0..n_samples).map(|_| r.random_range(0.0..1.0)).collect();
        let s: Vec<f64> = (0..n_samples)
            .map(|_| {
                let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * (centre + gaussian(&mut r, sigma))
            })
            .collect();
        features.push(x);
        shap.push(s);
    }
    // Shuffle column order so the ranking has work to do.
    let mut order: Vec<usize> = (0..n_features).collect();
    for i in (1..n_features).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let features = order.iter().map(|&j| features[j].clone()).collect();
    let shap = order.iter().map(|&j| shap[j].clone()).collect();
    DatasetBundle::new(names("f", n_features), "outcome", features, shap).expect("valid synthetic bundle")
}

/// Discrete target with three categories and a continuous partner. When
/// `modulated`, category 2 adds `effect` to the target's SHAP value only for
/// samples whose partner lies above its mean; otherwise the target's SHAP
/// values are noise in every group.
pub fn modulated_interaction(n: usize, effect: f64, modulated: bool, seed: u64) -> DatasetBundle {
    let mut r = rng(seed);
    let target: Vec<f64> = (0..n).map(|_| r.random_range(0..3) as f64).collect();
    let partner: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
    let partner_mean = partner.iter().sum::<f64>() / n as f64;
    let shap_target: Vec<f64> = (0..n)
        .map(|i| {
            let bump = if modulated && target[i] == 2.0 && partner[i] > partner_mean { effect } else { 0.0 };
            bump + gaussian(&mut r, 0.1)
        })
        .collect();
    let shap_partner: Vec<f64> = partner.iter().map(|v| 0.05 * (v - 0.5) + gaussian(&mut r, 0.01)).collect();
    DatasetBundle::new(
        vec!["target".into(), "partner".into()],
        "outcome",
        vec![target, partner],
        vec![shap_target, shap_partner],
    )
    .expect("valid synthetic bundle")
}

/// Continuous target whose sigmoid SHAP curve is shifted by `shift` when
/// the binary partner is 1. `x ~ U(-5, 5)`, noise sd 0.02.
pub fn shifted_sigmoids(n: usize, shift: f64, seed: u64) -> DatasetBundle {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
    let g: Vec<f64> = (0..n).map(|_| r.random_range(0..2) as f64).collect();
    let shap: Vec<f64> = (0..n)
        .map(|i| 2.0 * logistic(2.0 * (x[i] - shift * g[i])) - 1.0 + gaussian(&mut r, 0.02))
        .collect();
    let shap_g: Vec<f64> = g.iter().map(|v| 0.1 * (v - 0.5)).collect();
    DatasetBundle::new(vec!["x".into(), "group".into()], "outcome", vec![x, g], vec![shap, shap_g])
        .expect("valid synthetic bundle")
}

/// Continuous target with the same linear SHAP trend in both partner groups.
pub fn parallel_lines(n: usize, seed: u64) -> DatasetBundle {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
    let g: Vec<f64> = (0..n).map(|_| r.random_range(0..2) as f64).collect();
    let shap: Vec<f64> = x.iter().map(|v| 0.2 * v + gaussian(&mut r, 0.02)).collect();
    let shap_g: Vec<f64> = g.iter().map(|v| 0.1 * (v - 0.5)).collect();
    DatasetBundle::new(vec!["x".into(), "group".into()], "outcome", vec![x, g], vec![shap, shap_g])
        .expect("valid synthetic bundle")
}

/// Label of the demo dataset.
pub const DEMO_LABEL: &str = "Metabolic Syndrome";

/// Seed of the bundled demo CSV files in `data/`.
pub const DEMO_SEED: u64 = 7;

/// Demo dataset: 500 samples, 15 features of mixed kinds with known effects.
///
/// | feature | kind | SHAP pattern |
/// |---|---|---|
/// | waist | continuous | sigmoid, shifted by `sex` |
/// | glucose | continuous | linear |
/// | hdl | continuous | decreasing linear |
/// | sex | binary | +/- |
/// | albuminuria | discrete (0-2) | category 2 high when triglycerides above mean |
/// | age | continuous | quadratic |
/// | triglycerides | continuous | weak linear |
/// | bp_stage | discrete (0-3) | increasing steps |
/// | smoker | binary | small positive |
/// | remaining six | mixed | weak noise |
pub fn demo_dataset(seed: u64) -> DatasetBundle {
    let n = 500;
    let mut r = rng(seed);
    let uniform = |r: &mut ChaCha8Rng, lo: f64, hi: f64| -> Vec<f64> {
        (0..n).map(|_| (r.random_range(lo..hi) * 10.0_f64).round() / 10.0).collect()
    };
    let waist = uniform(&mut r, 60.0, 120.0);
    let glucose = uniform(&mut r, 70.0, 160.0);
    let hdl = uniform(&mut r, 25.0, 90.0);
    let sex: Vec<f64> = (0..n).map(|_| r.random_range(0..2) as f64).collect();
    let albuminuria: Vec<f64> = (0..n).map(|_| r.random_range(0..3) as f64).collect();
    let age = uniform(&mut r, 20.0, 80.0);
    let triglycerides = uniform(&mut r, 50.0, 300.0);
    let bp_stage: Vec<f64> = (0..n).map(|_| r.random_range(0..4) as f64).collect();
    let smoker: Vec<f64> = (0..n).map(|_| f64::from(r.random_bool(0.3))).collect();
    let activity: Vec<f64> = (0..n).map(|_| r.random_range(0..5) as f64).collect();
    let sleep = uniform(&mut r, 4.0, 10.0);
    let alcohol: Vec<f64> = (0..n).map(|_| r.random_range(0..4) as f64).collect();
    let family_history: Vec<f64> = (0..n).map(|_| f64::from(r.random_bool(0.4))).collect();
    let crp = uniform(&mut r, 0.1, 10.0);
    let income = uniform(&mut r, 1.0, 9.0);

    let tg_mean = triglycerides.iter().sum::<f64>() / n as f64;
    let mut noise = |sd: f64| -> Vec<f64> { (0..n).map(|_| gaussian(&mut r, sd)).collect() };
    let e: Vec<Vec<f64>> = (0..15).map(|j| noise(if j < 9 { 0.05 } else { 0.02 })).collect();

    let shap: Vec<Vec<f64>> = vec![
        (0..n)
            .map(|i| 1.6 * logistic(0.15 * (waist[i] - 90.0 + 8.0 * sex[i])) - 0.8 + e[0][i])
            .collect(),
        (0..n).map(|i| 0.012 * (glucose[i] - 115.0) + e[1][i]).collect(),
        (0..n).map(|i| -0.012 * (hdl[i] - 57.0) + e[2][i]).collect(),
        (0..n).map(|i| if sex[i] == 1.0 { 0.35 } else { -0.3 } + e[3][i]).collect(),
        (0..n)
            .map(|i| {
                let base = 0.1 * albuminuria[i] - 0.1;
                let bump = if albuminuria[i] == 2.0 && triglycerides[i] > tg_mean { 0.35 } else { 0.0 };
                base + bump + e[4][i]
            })
            .collect(),
        (0..n).map(|i| 0.0006 * (age[i] - 50.0).powi(2) - 0.18 + e[5][i]).collect(),
        (0..n).map(|i| 0.0012 * (triglycerides[i] - 175.0) + e[6][i]).collect(),
        (0..n).map(|i| 0.09 * (bp_stage[i] - 1.5) + e[7][i]).collect(),
        (0..n).map(|i| 0.12 * smoker[i] - 0.04 + e[8][i]).collect(),
        (0..n).map(|i| 0.004 * (activity[i] - 2.0) + e[9][i]).collect(),
        (0..n).map(|i| 0.002 * (sleep[i] - 7.0) + e[10][i]).collect(),
        (0..n).map(|i| 0.004 * (alcohol[i] - 1.5) + e[11][i]).collect(),
        (0..n).map(|i| 0.006 * family_history[i] + e[12][i]).collect(),
        (0..n).map(|i| 0.001 * (crp[i] - 5.0) + e[13][i]).collect(),
        e[14].clone(),
    ];
    let features = vec![
        waist,
        glucose,
        hdl,
        sex,
        albuminuria,
        age,
        triglycerides,
        bp_stage,
        smoker,
        activity,
        sleep,
        alcohol,
        family_history,
        crp,
        income,
    ];
    let names = [
        "waist",
        "glucose",
        "hdl",
        "sex",
        "albuminuria",
        "age",
        "triglycerides",
        "bp_stage",
        "smoker",
        "activity",
        "sleep_hours",
        "alcohol",
        "family_history",
        "crp",
        "income",
    ];
    DatasetBundle::new(names.iter().map(|s| s.to_string()).collect(), DEMO_LABEL, features, shap)
        .expect("valid demo bundle")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(demo_dataset(0), demo_dataset(0));
        assert_ne!(demo_dataset(0), demo_dataset(1));
        assert_eq!(family_sample(Some(Family::Sigmoid), 50, 0.05, 3), family_sample(Some(Family::Sigmoid), 50, 0.05, 3));
    }

    #[test]
    fn demo_shape() {
        let d = demo_dataset(0);
        assert_eq!((d.n_samples(), d.n_features()), (500, 15));
        assert_eq!(d.label_name(), DEMO_LABEL);
    }

    #[test]
    fn cut_profile_shape() {
        let b = cut_profile(100, 30, 12, 0.01, 1);
        assert_eq!(b.n_features(), 30);
        let strong = (0..30)
            .filter(|&j| b.shap_column(j).iter().map(|v| v.abs()).sum::<f64>() / 100.0 > 0.75)
            .count();
        assert_eq!(strong, 12);
    }
}
