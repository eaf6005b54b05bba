//! Hypothesis tests and probability distributions.
//!
//! Every test is two-sided. Zero-variance inputs never panic: they produce a
//! result with `degenerate = true` and a boundary p-value (1 when there is no
//! effect, 0 when the effect is nonzero).

pub mod dist;
mod parametric;
pub mod quadrature;
mod rank;
mod routes;
mod shapiro;
mod tukey;

use serde::Serialize;
use thiserror::Error;

pub use dist::{dist_cdf, Distribution};
pub use parametric::{anova_oneway, t_test, TTestMode};
pub use rank::{kruskal_wallis, rank_sum_test, rankdata, signed_rank_test};
pub use routes::{omnibus_test, paired_comparison, two_group_test, zero_mean_test};
pub use shapiro::shapiro_wilk;
pub use tukey::{tukey_hsd, TukeyPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatError {
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ShapiroWilk,
    TOneSample,
    TPaired,
    TTwoSample,
    TWelch,
    SignedRank,
    RankSum,
    Anova,
    KruskalWallis,
    TukeyHsdPair,
}

impl TestKind {
    /// Human-readable test name used in reports.
    pub fn display_name(self) -> &'static str {
        match self {
            TestKind::ShapiroWilk => "Shapiro-Wilk test",
            TestKind::TOneSample => "one-sample t-test",
            TestKind::TPaired => "paired t-test",
            TestKind::TTwoSample => "two-sample t-test",
            TestKind::TWelch => "Welch t-test",
            TestKind::SignedRank => "Wilcoxon signed-rank test",
            TestKind::RankSum => "Wilcoxon rank-sum (Mann-Whitney U) test",
            TestKind::Anova => "one-way ANOVA",
            TestKind::KruskalWallis => "Kruskal-Wallis test",
            TestKind::TukeyHsdPair => "Tukey HSD",
        }
    }
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    /// True when the parametric branch produced this result.
    pub parametric: bool,
    pub df: Option<f64>,
    pub groups: Option<(String, String)>,
    /// Zero-variance input; the p-value is a boundary value.
    pub degenerate: bool,
}

impl TestResult {
    pub(crate) fn new(test: TestKind, statistic: f64, p_value: f64, parametric: bool) -> Self {
        Self {
            test,
            statistic,
            p_value: clamp_p(p_value),
            parametric,
            df: None,
            groups: None,
            degenerate: false,
        }
    }

    pub(crate) fn with_df(mut self, df: f64) -> Self {
        self.df = Some(df);
        self
    }

    pub(crate) fn degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Shapiro–Wilk result, compared against a caller-supplied level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityGate {
    pub w_statistic: f64,
    pub p_value: f64,
    pub is_normal: bool,
}

impl NormalityGate {
    pub fn from_w(w_statistic: f64, p_value: f64, alpha: f64) -> Self {
        Self {
            w_statistic,
            p_value,
            is_normal: p_value > alpha,
        }
    }
}

/// True when Shapiro–Wilk accepts normality at `alpha`.
///
/// Degenerate samples (too small, too large, or constant) count as non-normal.
pub fn passes_normality(sample: &[f64], alpha: f64) -> bool {
    shapiro_wilk(sample, alpha).is_ok_and(|g| g.is_normal)
}

pub(crate) fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sum of squared deviations from the mean (two-pass).
pub(crate) fn sum_sq_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

pub(crate) fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// True if every value equals the first.
pub(crate) fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

/// Threshold below which a sum of squares counts as zero, relative to the
/// magnitude of the data it was computed from.
pub(crate) fn negligible_ss(ss: f64, n: usize, scale: f64) -> bool {
    let tol = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    ss <= n as f64 * tol * tol
}

pub(crate) fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
