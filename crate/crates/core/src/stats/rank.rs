//! Rank-based tests: Wilcoxon signed-rank, Wilcoxon rank-sum (Mann–Whitney U)
//! and Kruskal–Wallis.

use super::dist::{chi2_sf, normal_sf};
use super::{all_finite, StatError, TestKind, TestResult};

/// Exact signed-rank distribution is used up to this many nonzero differences.
pub const SIGNED_RANK_EXACT_MAX: usize = 25;
/// Exact rank-sum distribution is used up to this combined size (without ties).
pub const RANK_SUM_EXACT_MAX: usize = 12;

/// Midranks (1-based) and the tie term `sum(t^3 - t)` over tie groups.
pub fn rankdata(x: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; n];
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon signed-rank test of `x` around `mu`.
///
/// Differences equal to zero are dropped. With at most
/// [`SIGNED_RANK_EXACT_MAX`] remaining values the p-value comes from the
/// exact distribution over all `2^n` sign assignments (midranks included);
/// beyond that a normal approximation with tie and continuity correction
/// is used. The reported statistic is the positive-rank sum `T+`.
pub fn signed_rank_test(x: &[f64], mu: f64) -> Result<TestResult, StatError> {
    if !all_finite(x) || !mu.is_finite() {
        return Err(StatError::NonFinite);
    }
    let d: Vec<f64> = x.iter().map(|v| v - mu).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Ok(TestResult::new(TestKind::SignedRank, 0.0, 1.0, false).degenerate());
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = rankdata(&abs);
    let t_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();

    let p = if n <= SIGNED_RANK_EXACT_MAX {
        signed_rank_exact_p(&ranks, t_plus)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        if var <= 0.0 {
            1.0
        } else {
            let dev = ((t_plus - mean).abs() - 0.5).max(0.0);
            2.0 * normal_sf(dev / var.sqrt())
        }
    };
    Ok(TestResult::new(TestKind::SignedRank, t_plus, p, false))
}

/// Exact two-sided p of `T+` given the (mid)ranks, by counting sign patterns.
fn signed_rank_exact_p(ranks: &[f64], t_plus: f64) -> f64 {
    // Midranks are multiples of 1/2, so doubling makes every rank an integer.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0.0_f64; max_sum + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let target = (2.0 * t_plus).round() as usize;
    two_sided_from_counts(&counts, target)
}

/// `min(1, 2 min(P(S <= s), P(S >= s)))` for a distribution given by counts.
fn two_sided_from_counts(counts: &[f64], s: usize) -> f64 {
    let total: f64 = counts.iter().sum();
    let lower: f64 = counts[..=s].iter().sum();
    let upper: f64 = counts[s..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Two-sided Wilcoxon rank-sum / Mann–Whitney U test.
///
/// The statistic is `U` for `x`. The p-value is exact when
/// `n1 + n2 <= 12` and there are no ties; otherwise a normal approximation
/// with tie correction is used.
pub fn rank_sum_test(x: &[f64], y: &[f64]) -> Result<TestResult, StatError> {
    let (n1, n2) = (x.len(), y.len());
    if n1 < 2 || n2 < 2 {
        return Err(StatError::TooFewObservations {
            needed: 2,
            got: n1.min(n2),
        });
    }
    if !all_finite(x) || !all_finite(y) {
        return Err(StatError::NonFinite);
    }
    let combined: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = rankdata(&combined);
    let r1: f64 = ranks[..n1].iter().sum();
    let (f1, f2) = (n1 as f64, n2 as f64);
    let u = r1 - f1 * (f1 + 1.0) / 2.0;
    let total = n1 + n2;

    if ties == 0.0 && total <= RANK_SUM_EXACT_MAX {
        let counts = rank_sum_counts(n1, n2);
        let p = two_sided_from_counts(&counts, u.round() as usize);
        return Ok(TestResult::new(TestKind::RankSum, u, p, false));
    }

    let nf = total as f64;
    let mean = f1 * f2 / 2.0;
    let var = f1 * f2 / 12.0 * ((nf + 1.0) - ties / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return Ok(TestResult::new(TestKind::RankSum, u, 1.0, false).degenerate());
    }
    let z = (u - mean) / var.sqrt();
    Ok(TestResult::new(TestKind::RankSum, u, 2.0 * normal_sf(z.abs()), false))
}

/// Number of rank assignments giving each value of `U` (index = U).
fn rank_sum_counts(n1: usize, n2: usize) -> Vec<f64> {
    let total = n1 + n2;
    let max_sum = total * (total + 1) / 2;
    // ways[j][s]: subsets of size j of {1..i} with rank sum s.
    let mut ways = vec![vec![0.0_f64; max_sum + 1]; n1 + 1];
    ways[0][0] = 1.0;
    for rank in 1..=total {
        for j in (1..=n1.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                let add = ways[j - 1][s - rank];
                if add != 0.0 {
                    ways[j][s] += add;
                }
            }
        }
    }
    let offset = n1 * (n1 + 1) / 2;
    ways[n1][offset..=offset + n1 * n2].to_vec()
}

/// Kruskal–Wallis H test with tie correction.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<TestResult, StatError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatError::TooFewGroups { needed: 2, got: k });
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(StatError::TooFewObservations { needed: 1, got: 0 });
    }
    if !groups.iter().all(|g| all_finite(g)) {
        return Err(StatError::NonFinite);
    }
    let combined: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = combined.len();
    if n < 3 {
        return Err(StatError::TooFewObservations { needed: 3, got: n });
    }
    let (ranks, ties) = rankdata(&combined);
    let nf = n as f64;
    let correction = 1.0 - ties / (nf * nf * nf - nf);
    let df = (k - 1) as f64;
    if correction <= 0.0 {
        return Ok(TestResult::new(TestKind::KruskalWallis, 0.0, 1.0, false)
            .with_df(df)
            .degenerate());
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = (12.0 / (nf * (nf + 1.0)) * sum - 3.0 * (nf + 1.0)) / correction;
    let h = h.max(0.0);
    Ok(TestResult::new(TestKind::KruskalWallis, h, chi2_sf(h, df), false).with_df(df))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_and_ties() {
        let (r, t) = rankdata(&[10.0, 20.0, 10.0, 30.0]);
        assert_eq!(r, vec![1.5, 3.0, 1.5, 4.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn signed_rank_examples() {
        let r = signed_rank_test(&[1.0, -1.0, 2.0, -2.0], 0.0).unwrap();
        assert_eq!(r.p_value, 1.0);

        let r = signed_rank_test(&[1.0, 2.0, 3.0], 0.0).unwrap();
        assert_eq!(r.statistic, 6.0);
        assert!((r.p_value - 0.25).abs() < 1e-15);

        let r = signed_rank_test(&[5.0, 5.0, 5.0], 5.0).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn signed_rank_sign_flip_invariance() {
        let x = [0.3, -1.2, 2.5, 0.9, -0.4, 1.7, 3.1];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = signed_rank_test(&x, 0.0).unwrap();
        let b = signed_rank_test(&neg, 0.0).unwrap();
        assert!((a.p_value - b.p_value).abs() < 1e-15);
    }

    #[test]
    fn signed_rank_large_sample_uses_normal_approximation() {
        let x: Vec<f64> = (1..=40).map(|i| i as f64 - 15.5).collect();
        let r = signed_rank_test(&x, 0.0).unwrap();
        assert!(r.p_value > 0.0 && r.p_value < 0.05, "{}", r.p_value);
    }

    #[test]
    fn rank_sum_examples() {
        let r = rank_sum_test(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-15);

        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.statistic, 4.5);
        assert!((r.p_value - 1.0).abs() < 1e-12);

        let x: Vec<f64> = (1..=5).map(f64::from).collect();
        let y: Vec<f64> = (6..=10).map(f64::from).collect();
        let r = rank_sum_test(&x, &y).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 2.0 / 252.0).abs() < 1e-15);
    }

    #[test]
    fn rank_sum_all_tied_is_degenerate() {
        let r = rank_sum_test(&[2.0; 7], &[2.0; 8]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn exact_counts_total_binomial() {
        let c = rank_sum_counts(4, 5);
        assert_eq!(c.iter().sum::<f64>(), 126.0);
        assert_eq!(c.len(), 21);
    }

    #[test]
    fn kruskal_examples() {
        let r = kruskal_wallis(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        assert!((r.statistic - 4.571_428_571_428_571).abs() < 1e-12);
        assert!((r.p_value - (-r.statistic / 2.0).exp()).abs() < 1e-12);

        let r = kruskal_wallis(&[&[7.0, 7.0], &[7.0, 7.0]]).unwrap();
        assert!(r.degenerate && r.p_value == 1.0);

        let a = kruskal_wallis(&[&[3.0, 4.0], &[5.0, 6.0], &[1.0, 2.0]]).unwrap();
        assert!((a.statistic - 4.571_428_571_428_571).abs() < 1e-12);
    }
}
