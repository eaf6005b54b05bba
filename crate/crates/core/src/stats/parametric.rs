//! Student t-tests and one-way ANOVA.

use super::dist::{f_sf, t_two_sided};
use super::{
    all_finite, max_abs, mean, negligible_ss, sum_sq_dev, StatError, TestKind, TestResult,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TTestMode<'a> {
    /// `x` against a hypothesized mean.
    OneSample { mu: f64 },
    /// Differences `x - y` against zero.
    Paired { y: &'a [f64] },
    /// Pooled-variance Student test.
    TwoSample { y: &'a [f64] },
    /// Unequal-variance Welch test.
    Welch { y: &'a [f64] },
}

/// Two-sided t-test in the requested mode.
pub fn t_test(x: &[f64], mode: TTestMode<'_>) -> Result<TestResult, StatError> {
    if !all_finite(x) {
        return Err(StatError::NonFinite);
    }
    match mode {
        TTestMode::OneSample { mu } => one_sample(x, mu, TestKind::TOneSample),
        TTestMode::Paired { y } => {
            if x.len() != y.len() {
                return Err(StatError::LengthMismatch(x.len(), y.len()));
            }
            if !all_finite(y) {
                return Err(StatError::NonFinite);
            }
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            one_sample(&d, 0.0, TestKind::TPaired)
        }
        TTestMode::TwoSample { y } => two_sample(x, y, false),
        TTestMode::Welch { y } => two_sample(x, y, true),
    }
}

fn one_sample(x: &[f64], mu: f64, kind: TestKind) -> Result<TestResult, StatError> {
    let n = x.len();
    if n < 2 {
        return Err(StatError::TooFewObservations { needed: 2, got: n });
    }
    let df = (n - 1) as f64;
    let m = mean(x);
    let ss = sum_sq_dev(x);
    let scale = max_abs(x).max(mu.abs());
    if negligible_ss(ss, n, scale) {
        let effect = (m - mu).abs() > 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        return Ok(degenerate_result(kind, m - mu, effect, true).with_df(df));
    }
    let se = (ss / df / n as f64).sqrt();
    let t = (m - mu) / se;
    Ok(TestResult::new(kind, t, t_two_sided(t, df), true).with_df(df))
}

fn two_sample(x: &[f64], y: &[f64], welch: bool) -> Result<TestResult, StatError> {
    let (n1, n2) = (x.len(), y.len());
    if n1 < 2 || n2 < 2 {
        return Err(StatError::TooFewObservations {
            needed: 2,
            got: n1.min(n2),
        });
    }
    if !all_finite(y) {
        return Err(StatError::NonFinite);
    }
    let kind = if welch { TestKind::TWelch } else { TestKind::TTwoSample };
    let (m1, m2) = (mean(x), mean(y));
    let (ss1, ss2) = (sum_sq_dev(x), sum_sq_dev(y));
    let (f1, f2) = (n1 as f64, n2 as f64);
    let scale = max_abs(x).max(max_abs(y));

    if negligible_ss(ss1 + ss2, n1 + n2, scale) {
        let effect = (m1 - m2).abs() > 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        return Ok(degenerate_result(kind, m1 - m2, effect, true).with_df(f1 + f2 - 2.0));
    }

    let (t, df) = if welch {
        let (v1, v2) = (ss1 / (f1 - 1.0) / f1, ss2 / (f2 - 1.0) / f2);
        let df = (v1 + v2).powi(2) / (v1 * v1 / (f1 - 1.0) + v2 * v2 / (f2 - 1.0));
        ((m1 - m2) / (v1 + v2).sqrt(), df)
    } else {
        let df = f1 + f2 - 2.0;
        let pooled = (ss1 + ss2) / df;
        ((m1 - m2) / (pooled * (1.0 / f1 + 1.0 / f2)).sqrt(), df)
    };
    Ok(TestResult::new(kind, t, t_two_sided(t, df), true).with_df(df))
}

/// Boundary result for zero-variance data: p = 0 with an effect, p = 1 without.
fn degenerate_result(kind: TestKind, effect: f64, has_effect: bool, parametric: bool) -> TestResult {
    let (stat, p) = if has_effect {
        (f64::INFINITY.copysign(effect), 0.0)
    } else {
        (0.0, 1.0)
    };
    TestResult::new(kind, stat, p, parametric).degenerate()
}

/// One-way ANOVA F test.
pub fn anova_oneway(groups: &[&[f64]]) -> Result<TestResult, StatError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatError::TooFewGroups { needed: 2, got: k });
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(StatError::TooFewObservations {
            needed: 2,
            got: g.len(),
        });
    }
    if !groups.iter().all(|g| all_finite(g)) {
        return Err(StatError::NonFinite);
    }
    let total_n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total_n as f64;
    let ss_between: f64 = groups
        .iter()
        .map(|g| g.len() as f64 * (mean(g) - grand).powi(2))
        .sum();
    let ss_within: f64 = groups.iter().map(|g| sum_sq_dev(g)).sum();
    let df1 = (k - 1) as f64;
    let df2 = (total_n - k) as f64;
    let scale = groups.iter().map(|g| max_abs(g)).fold(0.0, f64::max);

    if negligible_ss(ss_within, total_n, scale) {
        let effect = !negligible_ss(ss_between, total_n, scale);
        let (stat, p) = if effect { (f64::INFINITY, 0.0) } else { (0.0, 1.0) };
        return Ok(TestResult::new(TestKind::Anova, stat, p, true)
            .with_df(df1)
            .degenerate());
    }
    let f = (ss_between / df1) / (ss_within / df2);
    Ok(TestResult::new(TestKind::Anova, f, f_sf(f, df1, df2), true).with_df(df1))
}
