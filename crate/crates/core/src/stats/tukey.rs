//! Tukey's honestly significant difference with the Tukey–Kramer standard error.

use serde::Serialize;

use super::dist::{studentized_range_quantile, studentized_range_sf};
use super::{all_finite, max_abs, mean, negligible_ss, sum_sq_dev, StatError, TestKind, TestResult};

/// One pairwise comparison. `mean_diff` is `mean(first) - mean(second)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyPair {
    pub first: usize,
    pub second: usize,
    pub mean_diff: f64,
    /// Simultaneous confidence interval for `mean_diff` at `1 - alpha`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub result: TestResult,
}

impl TukeyPair {
    /// The same comparison seen from the other group.
    pub fn reversed(&self) -> Self {
        let mut result = self.result.clone();
        result.groups = result.groups.map(|(a, b)| (b, a));
        Self {
            first: self.second,
            second: self.first,
            mean_diff: -self.mean_diff,
            ci_low: -self.ci_high,
            ci_high: -self.ci_low,
            result,
        }
    }
}

/// All pairwise Tukey HSD comparisons, in `(0,1), (0,2), ..., (k-2,k-1)` order.
///
/// `alpha` sets the confidence level of the reported intervals.
pub fn tukey_hsd(groups: &[&[f64]], labels: &[String], alpha: f64) -> Result<Vec<TukeyPair>, StatError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatError::TooFewGroups { needed: 2, got: k });
    }
    if labels.len() != k {
        return Err(StatError::LengthMismatch(labels.len(), k));
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
    let total: usize = groups.iter().map(|g| g.len()).sum();
    let df = (total - k) as f64;
    let ss_within: f64 = groups.iter().map(|g| sum_sq_dev(g)).sum();
    let scale = groups.iter().map(|g| max_abs(g)).fold(0.0, f64::max);
    let degenerate = negligible_ss(ss_within, total, scale);
    let mse = ss_within / df;
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let q_crit = if degenerate {
        0.0
    } else {
        studentized_range_quantile(1.0 - alpha, k, df)
    };
    let effect_tol = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = means[i] - means[j];
            let (q, p, half_width) = if degenerate {
                if diff.abs() > effect_tol {
                    (f64::INFINITY, 0.0, 0.0)
                } else {
                    (0.0, 1.0, 0.0)
                }
            } else {
                let se = (mse / 2.0 * (1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64))
                    .sqrt();
                let q = diff.abs() / se;
                (q, studentized_range_sf(q, k, df), q_crit * se)
            };
            let mut result = TestResult::new(TestKind::TukeyHsdPair, q, p, true).with_df(df);
            result.groups = Some((labels[i].clone(), labels[j].clone()));
            result.degenerate = degenerate;
            pairs.push(TukeyPair {
                first: i,
                second: j,
                mean_diff: diff,
                ci_low: diff - half_width,
                ci_high: diff + half_width,
                result,
            });
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("g{i}")).collect()
    }

    #[test]
    fn identical_groups_have_no_differences() {
        let g = [1.0, 2.0, 3.0, 4.0];
        let pairs = tukey_hsd(&[&g, &g, &g], &labels(3), 0.05).unwrap();
        assert_eq!(pairs.len(), 3);
        for p in pairs {
            assert_eq!(p.result.statistic, 0.0);
            assert!((p.result.p_value - 1.0).abs() < 1e-9);
            assert!(p.ci_low < 0.0 && p.ci_high > 0.0);
        }
    }

    #[test]
    fn matches_reference_p_values() {
        // Frozen reference output (Tukey–Kramer, unequal n).
        let a = [24.5, 23.5, 26.4, 27.1, 29.9];
        let b = [28.4, 34.2, 29.5, 32.2, 30.1, 31.0];
        let c = [26.1, 28.3, 24.3, 26.2, 27.8];
        let pairs = tukey_hsd(&[&a, &b, &c], &labels(3), 0.05).unwrap();
        let want = [0.007_393_060_558_033_904, 0.978_692_188_387_382_7, 0.010_875_155_454_623_586];
        for (p, w) in pairs.iter().zip(want) {
            assert!((p.result.p_value - w).abs() < 1e-6, "{} vs {w}", p.result.p_value);
        }
    }

    #[test]
    fn pair_order_symmetry() {
        let a = [0.1, 0.4, 0.3, 0.2];
        let b = [1.1, 1.0, 1.4, 1.2, 0.9];
        let c = [0.5, 0.7, 0.4];
        let fwd = tukey_hsd(&[&a, &b, &c], &labels(3), 0.05).unwrap();
        let rev = tukey_hsd(&[&b, &a, &c], &["g1".into(), "g0".into(), "g2".into()], 0.05).unwrap();
        let ab = &fwd[0];
        let ba = &rev[0];
        assert!((ab.mean_diff + ba.mean_diff).abs() < 1e-15);
        assert!((ab.result.p_value - ba.result.p_value).abs() < 1e-15);
        let flipped = ab.reversed();
        assert_eq!(flipped.mean_diff, -ab.mean_diff);
        assert_eq!(flipped.result.groups, Some(("g1".into(), "g0".into())));
    }

    #[test]
    fn zero_pooled_variance_is_degenerate() {
        let pairs = tukey_hsd(&[&[1.0, 1.0], &[1.0, 1.0], &[2.0, 2.0]], &labels(3), 0.05).unwrap();
        assert!(pairs.iter().all(|p| p.result.degenerate));
        assert_eq!(pairs[0].result.p_value, 1.0);
        assert_eq!(pairs[1].result.p_value, 0.0);
    }
}
