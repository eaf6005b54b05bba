//! Feature ranking, the number of important features, and feature kinds.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::dataset::DatasetBundle;
use crate::stats::{paired_comparison, passes_normality, TestKind, TestResult};

/// Features ordered by decreasing mean |SHAP|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRanking {
    /// Feature indices, most important first.
    pub order: Vec<usize>,
    /// Mean |SHAP| per feature, indexed by feature.
    pub mean_abs_shap: Vec<f64>,
}

impl FeatureRanking {
    /// Mean |SHAP| in rank order.
    pub fn ranked_means(&self) -> Vec<f64> {
        self.order.iter().map(|&j| self.mean_abs_shap[j]).collect()
    }

    /// The rank (0-based) of each feature.
    pub fn rank_of(&self, feature: usize) -> usize {
        self.order.iter().position(|&j| j == feature).expect("feature in ranking")
    }

    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }
}

pub fn rank_features(bundle: &DatasetBundle) -> FeatureRanking {
    let n = bundle.n_samples() as f64;
    let mean_abs_shap: Vec<f64> = (0..bundle.n_features())
        .map(|j| bundle.shap_column(j).iter().map(|v| v.abs()).sum::<f64>() / n)
        .collect();
    let mut order: Vec<usize> = (0..bundle.n_features()).collect();
    order.sort_by(|&a, &b| mean_abs_shap[b].total_cmp(&mean_abs_shap[a]));
    FeatureRanking { order, mean_abs_shap }
}

/// How `chosen_k` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    /// `manual_num` was set.
    Manual,
    /// Best-gap cut inside `[candidate_num_min, candidate_num_max]`.
    CutInRange,
    /// No cut in range; largest cut below the range.
    FallbackCutBelow,
    /// No usable cut; `min(candidate_num_max, n_features)`.
    FallbackDefault,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutAnalysis {
    /// Test between rank `i` and rank `i + 1`, one per adjacent pair.
    pub adjacent: Vec<TestResult>,
    pub adjacent_p: Vec<f64>,
    /// Number of features kept at each cut (rank `k` vs `k + 1` differed), ascending.
    pub cut_positions: Vec<usize>,
    /// Gap score of each cut, aligned with `cut_positions`.
    pub gap_scores: Vec<f64>,
    pub chosen_k: usize,
    pub rule: KRule,
}

/// Tests adjacent ranked features on their |SHAP| columns and chooses the
/// number of important features.
///
/// Both columns passing Shapiro–Wilk at `p_feature_selection` gives the
/// paired t-test; otherwise rank-sum (signed-rank when
/// `strict_paired_nonparametric`).
pub fn adjacent_significance_cuts(
    bundle: &DatasetBundle,
    ranking: &FeatureRanking,
    config: &Config,
) -> CutAnalysis {
    let alpha = config.p_feature_selection;
    let abs_cols: Vec<Vec<f64>> = ranking
        .order
        .iter()
        .map(|&j| bundle.shap_column(j).iter().map(|v| v.abs()).collect())
        .collect();
    let adjacent: Vec<TestResult> = (0..abs_cols.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let (x, y) = (&abs_cols[i], &abs_cols[i + 1]);
            let parametric = passes_normality(x, alpha) && passes_normality(y, alpha);
            paired_comparison(x, y, parametric, config.strict_paired_nonparametric)
                .unwrap_or_else(|_| untestable(parametric))
        })
        .collect();
    let adjacent_p: Vec<f64> = adjacent.iter().map(|r| r.p_value).collect();
    let cut_positions: Vec<usize> = adjacent_p
        .iter()
        .enumerate()
        .filter(|(_, p)| **p < alpha)
        .map(|(i, _)| i + 1)
        .collect();
    let gap_scores = gap_scores(&cut_positions, &ranking.ranked_means());
    let mut cuts = CutAnalysis {
        adjacent,
        adjacent_p,
        cut_positions,
        gap_scores,
        chosen_k: 0,
        rule: KRule::FallbackDefault,
    };
    let (k, rule) = choose_num_important(&cuts, ranking, config);
    cuts.chosen_k = k;
    cuts.rule = rule;
    cuts
}

fn untestable(parametric: bool) -> TestResult {
    let kind = if parametric { TestKind::TPaired } else { TestKind::RankSum };
    TestResult::new(kind, 0.0, 1.0, parametric).degenerate()
}

/// Drop in mean |SHAP| from the last feature kept at each cut to the last
/// feature kept at the next cut, or to the smallest mean for the final cut.
pub fn gap_scores(cut_positions: &[usize], ranked_means: &[f64]) -> Vec<f64> {
    let floor = ranked_means.iter().copied().fold(f64::INFINITY, f64::min);
    cut_positions
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let next = cut_positions
                .get(i + 1)
                .map_or(floor, |&k2| ranked_means[k2 - 1]);
            ranked_means[k - 1] - next
        })
        .collect()
}

/// Number of features to analyze, and which rule produced it.
pub fn choose_num_important(cuts: &CutAnalysis, ranking: &FeatureRanking, config: &Config) -> (usize, KRule) {
    let n_features = ranking.order.len();
    if let Some(m) = config.manual_num {
        return (m.min(n_features), KRule::Manual);
    }
    let (lo, hi) = (config.candidate_num_min, config.candidate_num_max);
    let mut best: Option<(usize, f64)> = None;
    for (&k, &g) in cuts.cut_positions.iter().zip(&cuts.gap_scores) {
        if k < lo || k > hi {
            continue;
        }
        if best.is_none_or(|(_, bg)| g > bg) {
            best = Some((k, g));
        }
    }
    if let Some((k, _)) = best {
        return (k, KRule::CutInRange);
    }
    if let Some(&k) = cuts.cut_positions.iter().filter(|&&k| k < lo).max() {
        return (k, KRule::FallbackCutBelow);
    }
    (hi.min(n_features), KRule::FallbackDefault)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Binary,
    Discrete,
    Continuous,
    /// A single distinct value; excluded from analysis.
    Constant,
}

impl Kind {
    pub fn is_categorical(self) -> bool {
        matches!(self, Kind::Binary | Kind::Discrete)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Binary => "binary",
            Kind::Discrete => "discrete",
            Kind::Continuous => "continuous",
            Kind::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureKind {
    pub kind: Kind,
    pub n_unique: usize,
}

/// Sorted distinct values of a column.
pub fn unique_values(column: &[f64]) -> Vec<f64> {
    let mut v = column.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a == b);
    v
}

/// Two distinct values is binary, more than `cont_bound` is continuous,
/// anything in between is discrete.
pub fn classify_feature_kind(column: &[f64], cont_bound: usize) -> FeatureKind {
    let n_unique = unique_values(column).len();
    let kind = match n_unique {
        0 | 1 => Kind::Constant,
        2 => Kind::Binary,
        u if u > cont_bound => Kind::Continuous,
        _ => Kind::Discrete,
    };
    FeatureKind { kind, n_unique }
}
