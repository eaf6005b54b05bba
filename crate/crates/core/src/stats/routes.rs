//! Parametric / rank-based routing behind Shapiro–Wilk gates.

use super::{
    anova_oneway, kruskal_wallis, passes_normality, rank_sum_test, signed_rank_test, t_test,
    StatError, TTestMode, TestResult,
};

/// Is the mean of `x` different from zero? One-sample t when `x` passes
/// the normality gate at `alpha`, signed-rank otherwise.
pub fn zero_mean_test(x: &[f64], alpha: f64) -> Result<TestResult, StatError> {
    if passes_normality(x, alpha) {
        t_test(x, TTestMode::OneSample { mu: 0.0 })
    } else {
        signed_rank_test(x, 0.0)
    }
}

/// Independent two-group comparison. Two-sample t when both groups pass
/// the gate at `alpha` (Welch when `welch`), rank-sum otherwise.
pub fn two_group_test(x: &[f64], y: &[f64], alpha: f64, welch: bool) -> Result<TestResult, StatError> {
    if passes_normality(x, alpha) && passes_normality(y, alpha) {
        let mode = if welch {
            TTestMode::Welch { y }
        } else {
            TTestMode::TwoSample { y }
        };
        t_test(x, mode)
    } else {
        rank_sum_test(x, y)
    }
}

/// Comparison of two aligned series. The parametric branch is the paired
/// t-test; the other branch is rank-sum, or signed-rank on the differences
/// when `strict` is set.
pub fn paired_comparison(
    x: &[f64],
    y: &[f64],
    parametric: bool,
    strict: bool,
) -> Result<TestResult, StatError> {
    if x.len() != y.len() {
        return Err(StatError::LengthMismatch(x.len(), y.len()));
    }
    if parametric {
        t_test(x, TTestMode::Paired { y })
    } else if strict {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        signed_rank_test(&d, 0.0)
    } else {
        rank_sum_test(x, y)
    }
}

/// Omnibus comparison of `k >= 2` groups: ANOVA when every group passes the
/// gate at `alpha`, Kruskal–Wallis otherwise.
pub fn omnibus_test(groups: &[&[f64]], alpha: f64) -> Result<TestResult, StatError> {
    if groups.iter().all(|g| passes_normality(g, alpha)) {
        anova_oneway(groups)
    } else {
        kruskal_wallis(groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::TestKind;

    const NORMALISH: [f64; 8] = [-1.2, -0.6, -0.3, 0.0, 0.1, 0.4, 0.7, 1.3];
    const SKEWED: [f64; 8] = [0.0, 0.0, 0.01, 0.02, 0.03, 0.05, 0.4, 5.0];

    #[test]
    fn gates_pick_the_expected_test() {
        assert_eq!(zero_mean_test(&NORMALISH, 0.05).unwrap().test, TestKind::TOneSample);
        assert_eq!(zero_mean_test(&SKEWED, 0.05).unwrap().test, TestKind::SignedRank);
        assert_eq!(two_group_test(&NORMALISH, &NORMALISH, 0.05, false).unwrap().test, TestKind::TTwoSample);
        assert_eq!(two_group_test(&NORMALISH, &NORMALISH, 0.05, true).unwrap().test, TestKind::TWelch);
        assert_eq!(two_group_test(&NORMALISH, &SKEWED, 0.05, false).unwrap().test, TestKind::RankSum);
        assert_eq!(omnibus_test(&[&NORMALISH, &NORMALISH], 0.05).unwrap().test, TestKind::Anova);
        assert_eq!(omnibus_test(&[&NORMALISH, &SKEWED], 0.05).unwrap().test, TestKind::KruskalWallis);
    }

    #[test]
    fn paired_routes() {
        let y: Vec<f64> = SKEWED.iter().map(|v| v + 0.1).collect();
        assert_eq!(paired_comparison(&SKEWED, &y, true, false).unwrap().test, TestKind::TPaired);
        assert_eq!(paired_comparison(&SKEWED, &y, false, false).unwrap().test, TestKind::RankSum);
        assert_eq!(paired_comparison(&SKEWED, &y, false, true).unwrap().test, TestKind::SignedRank);
        assert!(paired_comparison(&SKEWED, &y[..4], false, false).is_err());
    }

    #[test]
    fn constant_groups_route_to_rank_tests() {
        let r = zero_mean_test(&[0.0; 5], 0.05).unwrap();
        assert_eq!(r.test, TestKind::SignedRank);
        assert!(r.degenerate && r.p_value == 1.0);
    }
}
