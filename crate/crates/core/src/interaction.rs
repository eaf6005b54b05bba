//! Interaction partners and whether they modulate a target's SHAP pattern.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::Config;
use crate::curves::{evaluate_fit, Family, FitResult};
use crate::dataset::DatasetBundle;
use crate::format::{category_label, sig};
use crate::selection::{FeatureKind, Kind};
use crate::stats::{is_constant, mean, paired_comparison, passes_normality, TestResult};
use crate::univariate::{analyze_categories, group_by_value, CategoricalAnalysis, ContinuousFinding};

/// Rows beyond this are subsampled before ranking partners.
pub const MAX_INTERACTION_ROWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionAssignment {
    pub target: usize,
    /// Candidates by decreasing score, target excluded; ties keep column order.
    pub ranked_partners: Vec<usize>,
    /// Score per feature; the target itself scores 0.
    pub partner_scores: Vec<f64>,
}

impl InteractionAssignment {
    pub fn partner(&self) -> Option<usize> {
        self.ranked_partners.first().copied()
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Ranks every other feature as an interaction partner of `target`.
///
/// Samples are sorted by the target's feature value and cut into
/// consecutive chunks of `max(min(n / 10, 50), 1)` rows. A candidate's
/// score is the sum over chunks of |Pearson(target SHAP, candidate value)|;
/// chunks where either series is constant add nothing. Candidates with
/// total |value| below 1e-8 score 0. More than 10 000 rows are first
/// subsampled with `seed`.
pub fn approximate_interactions(target: usize, bundle: &DatasetBundle, seed: u64) -> InteractionAssignment {
    let n = bundle.n_samples();
    let mut rows: Vec<usize> = (0..n).collect();
    if n > MAX_INTERACTION_ROWS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rows.shuffle(&mut rng);
        rows.truncate(MAX_INTERACTION_ROWS);
    }
    let x = bundle.feature_column(target);
    rows.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let shap = bundle.shap_column(target);
    let shap_sorted: Vec<f64> = rows.iter().map(|&i| shap[i]).collect();
    let m = rows.len();
    let inc = (m / 10).clamp(1, 50);

    let partner_scores: Vec<f64> = (0..bundle.n_features())
        .map(|j| {
            if j == target {
                return 0.0;
            }
            let col = bundle.feature_column(j);
            let other: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
            if other.iter().map(|v| v.abs()).sum::<f64>() < 1e-8 {
                return 0.0;
            }
            (0..m)
                .step_by(inc)
                .map(|start| {
                    let end = (start + inc).min(m);
                    let (a, b) = (&shap_sorted[start..end], &other[start..end]);
                    if is_constant(a) || is_constant(b) {
                        0.0
                    } else {
                        pearson(a, b).abs()
                    }
                })
                .sum()
        })
        .collect();
    let mut ranked_partners: Vec<usize> = (0..bundle.n_features()).filter(|&j| j != target).collect();
    ranked_partners.sort_by(|&a, &b| partner_scores[b].total_cmp(&partner_scores[a]));
    InteractionAssignment {
        target,
        ranked_partners,
        partner_scores,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column is constant; it cannot be split at its mean")]
pub struct ConstantColumn;

/// `true` for values strictly above the mean; values equal to the mean go below.
pub fn binarize_by_mean(column: &[f64]) -> Result<Vec<bool>, ConstantColumn> {
    if column.is_empty() || is_constant(column) {
        return Err(ConstantColumn);
    }
    let m = mean(column);
    Ok(column.iter().map(|&v| v > m).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionCase {
    CatCat,
    CatCont,
    ContCat,
    ContCont,
}

impl InteractionCase {
    pub fn from_kinds(target: Kind, partner: Kind) -> Self {
        match (target == Kind::Continuous, partner == Kind::Continuous) {
            (false, false) => InteractionCase::CatCat,
            (false, true) => InteractionCase::CatCont,
            (true, false) => InteractionCase::ContCat,
            (true, true) => InteractionCase::ContCont,
        }
    }
}

/// Assignment of every sample to one partner group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub labels: Vec<String>,
    /// Group index of each sample.
    pub assignment: Vec<usize>,
    /// Split point when the partner was binarized at its mean.
    pub split_mean: Option<f64>,
}

impl Partition {
    pub fn n_groups(&self) -> usize {
        self.labels.len()
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == group).collect()
    }

    /// Groups by distinct value (categorical) or at the mean (continuous).
    pub fn of_partner(column: &[f64], kind: Kind) -> Result<Self, ConstantColumn> {
        if kind == Kind::Continuous {
            let above = binarize_by_mean(column)?;
            return Ok(Partition {
                labels: vec!["below mean".into(), "above mean".into()],
                assignment: above.iter().map(|&a| usize::from(a)).collect(),
                split_mean: Some(mean(column)),
            });
        }
        let idx: Vec<f64> = (0..column.len()).map(|i| i as f64).collect();
        let groups = group_by_value(column, &idx);
        let mut assignment = vec![0; column.len()];
        for (g, (_, members)) in groups.iter().enumerate() {
            for &i in members {
                assignment[i as usize] = g;
            }
        }
        Ok(Partition {
            labels: groups.iter().map(|(v, _)| category_label(*v)).collect(),
            assignment,
            split_mean: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub label: String,
    pub n: usize,
    /// Categorical target: the between-category tests inside this group.
    pub categorical: Option<CategoricalAnalysis>,
    /// Continuous target: the refit of the univariate family inside this group.
    pub fit: Option<FitResult>,
    /// Continuous target: the refit has `p_a < p_interaction`.
    pub fit_significant: bool,
    pub note: Option<String>,
}

/// Comparison of two groups' fitted curves over all observed target values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginTest {
    pub first: usize,
    pub second: usize,
    /// Mean of `f_first(x) - f_second(x)` over the evaluation points.
    pub mean_margin: f64,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionFinding {
    pub target: usize,
    pub partner: usize,
    pub case: InteractionCase,
    pub partition: Option<Partition>,
    pub groups: Vec<GroupResult>,
    /// Family refit per group (continuous target).
    pub family: Option<Family>,
    pub margin_tests: Vec<MarginTest>,
    pub significant: bool,
    /// Why the analysis was skipped or only partly done.
    pub note: Option<String>,
}

impl InteractionFinding {
    pub fn margin_test(&self) -> Option<&TestResult> {
        self.margin_tests.first().map(|m| &m.result)
    }

    fn skipped(target: usize, partner: usize, case: InteractionCase, note: String) -> Self {
        InteractionFinding {
            target,
            partner,
            case,
            partition: None,
            groups: Vec::new(),
            family: None,
            margin_tests: Vec::new(),
            significant: false,
            note: Some(note),
        }
    }

    pub fn degenerate(&self) -> bool {
        self.groups.iter().any(|g| {
            g.categorical.as_ref().is_some_and(|c| c.degenerate()) || g.fit.as_ref().is_some_and(|f| f.degenerate)
        }) || self.margin_tests.iter().any(|m| m.result.degenerate)
    }
}

fn subset(values: &[f64], rows: &[usize]) -> Vec<f64> {
    rows.iter().map(|&i| values[i]).collect()
}

/// Categorical target: in each partner group, compare the target's
/// categories exactly as in the univariate analysis. Significant if any
/// group's between-category test has `p < p_interaction`.
pub fn analyze_interaction_categorical_target(
    bundle: &DatasetBundle,
    target: usize,
    partner: usize,
    kinds: &[FeatureKind],
    config: &Config,
) -> InteractionFinding {
    let alpha = config.p_interaction;
    let case = InteractionCase::from_kinds(kinds[target].kind, kinds[partner].kind);
    let partition = match Partition::of_partner(bundle.feature_column(partner), kinds[partner].kind) {
        Ok(p) => p,
        Err(e) => return InteractionFinding::skipped(target, partner, case, e.to_string()),
    };
    let (x, shap) = (bundle.feature_column(target), bundle.shap_column(target));
    let groups: Vec<GroupResult> = (0..partition.n_groups())
        .map(|g| {
            let rows = partition.members(g);
            let analysis = analyze_categories(
                &subset(x, &rows),
                &subset(shap, &rows),
                kinds[target].kind,
                alpha,
                config.welch_two_sample,
            );
            GroupResult {
                label: partition.labels[g].clone(),
                n: rows.len(),
                note: analysis.untestable.clone(),
                categorical: Some(analysis),
                fit: None,
                fit_significant: false,
            }
        })
        .collect();
    let significant = groups
        .iter()
        .any(|g| g.categorical.as_ref().is_some_and(|c| c.between_significant(alpha)));
    InteractionFinding {
        target,
        partner,
        case,
        partition: Some(partition),
        groups,
        family: None,
        margin_tests: Vec::new(),
        significant,
        note: None,
    }
}

/// Continuous target: refit the univariate family in each partner group,
/// keep groups whose `a` is significant at `p_interaction`, and compare
/// kept groups pairwise through their curves evaluated at every observed
/// target value.
///
/// The differences pass the normality gate at `p_interaction` for the
/// paired t-test; otherwise rank-sum (signed-rank when
/// `strict_paired_nonparametric`). Significant iff any margin test has
/// `p < p_interaction`.
pub fn analyze_interaction_continuous_target(
    bundle: &DatasetBundle,
    target: usize,
    partner: usize,
    kinds: &[FeatureKind],
    univariate: &ContinuousFinding,
    config: &Config,
) -> InteractionFinding {
    let alpha = config.p_interaction;
    let case = InteractionCase::from_kinds(kinds[target].kind, kinds[partner].kind);
    let Some(best) = univariate.selection.best.as_ref() else {
        return InteractionFinding::skipped(
            target,
            partner,
            case,
            "target has no significant univariate pattern to refit".into(),
        );
    };
    let family = best.family;
    let partition = match Partition::of_partner(bundle.feature_column(partner), kinds[partner].kind) {
        Ok(p) => p,
        Err(e) => return InteractionFinding::skipped(target, partner, case, e.to_string()),
    };
    let (x, shap) = (bundle.feature_column(target), bundle.shap_column(target));
    let groups: Vec<GroupResult> = (0..partition.n_groups())
        .map(|g| {
            let rows = partition.members(g);
            let (gx, gy) = (subset(x, &rows), subset(shap, &rows));
            let (fit, note) = match family.fit(&gx, &gy) {
                Ok(f) if f.converged => (Some(f), None),
                Ok(f) => (Some(f), Some("fit did not converge".to_string())),
                Err(e) => (None, Some(e.to_string())),
            };
            let fit_significant = fit.as_ref().is_some_and(|f| f.is_significant(alpha));
            GroupResult {
                label: partition.labels[g].clone(),
                n: rows.len(),
                categorical: None,
                fit,
                fit_significant,
                note,
            }
        })
        .collect();

    let kept: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].fit_significant).collect();
    let curves: Vec<Vec<f64>> = kept
        .iter()
        .map(|&g| evaluate_fit(groups[g].fit.as_ref().expect("kept fit"), x))
        .collect();
    let mut margin_tests = Vec::new();
    for a in 0..kept.len() {
        for b in (a + 1)..kept.len() {
            if let Some(result) = margin_test(&curves[a], &curves[b], alpha, config.strict_paired_nonparametric) {
                let d_mean = curves[a].iter().zip(&curves[b]).map(|(p, q)| p - q).sum::<f64>() / x.len() as f64;
                margin_tests.push(MarginTest {
                    first: kept[a],
                    second: kept[b],
                    mean_margin: d_mean,
                    result,
                });
            }
        }
    }
    let note = (kept.len() < 2).then(|| {
        format!(
            "{} of {} partner groups have a significant {} fit; no margin comparison",
            kept.len(),
            groups.len(),
            family.name()
        )
    });
    let significant = margin_tests.iter().any(|m| m.result.is_significant(alpha));
    InteractionFinding {
        target,
        partner,
        case,
        partition: Some(partition),
        groups,
        family: Some(family),
        margin_tests,
        significant,
        note,
    }
}

/// Paired comparison of two curve evaluations.
pub fn margin_test(f1: &[f64], f2: &[f64], alpha: f64, strict: bool) -> Option<TestResult> {
    let d: Vec<f64> = f1.iter().zip(f2).map(|(a, b)| a - b).collect();
    let parametric = passes_normality(&d, alpha);
    paired_comparison(f1, f2, parametric, strict).ok()
}

/// All interaction findings for one target: its top `interaction_top_k` partners.
pub fn analyze_target(
    bundle: &DatasetBundle,
    target: usize,
    kinds: &[FeatureKind],
    univariate: Option<&ContinuousFinding>,
    config: &Config,
) -> (InteractionAssignment, Vec<InteractionFinding>) {
    let assignment = approximate_interactions(target, bundle, config.rng_seed);
    let findings = assignment
        .ranked_partners
        .iter()
        .take(config.interaction_top_k)
        .map(|&partner| match kinds[target].kind {
            Kind::Binary | Kind::Discrete => {
                analyze_interaction_categorical_target(bundle, target, partner, kinds, config)
            }
            Kind::Continuous => match univariate {
                Some(u) => analyze_interaction_continuous_target(bundle, target, partner, kinds, u, config),
                None => InteractionFinding::skipped(
                    target,
                    partner,
                    InteractionCase::from_kinds(Kind::Continuous, kinds[partner].kind),
                    "no univariate fit available".into(),
                ),
            },
            Kind::Constant => InteractionFinding::skipped(
                target,
                partner,
                InteractionCase::from_kinds(Kind::Constant, kinds[partner].kind),
                "target feature is constant".into(),
            ),
        })
        .collect();
    (assignment, findings)
}

/// Short description of a partition group, e.g. `triglycerides above mean (1.23)`.
pub fn describe_group(partner_name: &str, partition: &Partition, group: usize) -> String {
    match partition.split_mean {
        Some(m) => format!("{partner_name} {} ({})", partition.labels[group], sig(m, 3)),
        None => format!("{partner_name} = {}", partition.labels[group]),
    }
}
