//! Per-feature analysis of SHAP values, dispatched on the feature kind.

use serde::Serialize;

use crate::config::Config;
use crate::curves::{select_best_fit, FitSelection};
use crate::dataset::DatasetBundle;
use crate::format::category_label;
use crate::selection::{FeatureKind, Kind};
use crate::stats::{omnibus_test, tukey_hsd, two_group_test, zero_mean_test, TestResult, TukeyPair};

/// Categories smaller than this are shown but not tested.
pub const MIN_CATEGORY_N: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStats {
    pub value: f64,
    pub label: String,
    pub n: usize,
    pub mean_shap: f64,
    /// Zero-mean test of the category's SHAP values; absent when `n` is too small.
    pub zero_test: Option<TestResult>,
}

impl CategoryStats {
    pub fn excluded(&self) -> bool {
        self.n < MIN_CATEGORY_N
    }
}

/// Tests on SHAP values grouped by the categories of one feature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalAnalysis {
    pub kind: Kind,
    pub per_category: Vec<CategoryStats>,
    /// Two-group test (binary) or omnibus test (discrete) across usable categories.
    pub between: Option<TestResult>,
    /// Tukey HSD pairs, present when the omnibus test is significant with
    /// at least three usable categories. Indices refer to `per_category`.
    pub posthoc: Option<Vec<TukeyPair>>,
    /// Why `between` could not be computed.
    pub untestable: Option<String>,
}

impl CategoricalAnalysis {
    pub fn between_significant(&self, alpha: f64) -> bool {
        self.between.as_ref().is_some_and(|t| t.is_significant(alpha))
    }

    pub fn any_significant(&self, alpha: f64) -> bool {
        self.between_significant(alpha)
            || self
                .per_category
                .iter()
                .any(|c| c.zero_test.as_ref().is_some_and(|t| t.is_significant(alpha)))
    }

    pub fn degenerate(&self) -> bool {
        self.between.as_ref().is_some_and(|t| t.degenerate)
            || self.per_category.iter().any(|c| c.zero_test.as_ref().is_some_and(|t| t.degenerate))
            || self.posthoc.iter().flatten().any(|p| p.result.degenerate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalFinding {
    pub feature: usize,
    pub kind: FeatureKind,
    pub analysis: CategoricalAnalysis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousFinding {
    pub feature: usize,
    pub kind: FeatureKind,
    pub selection: FitSelection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UnivariateFinding {
    Categorical(CategoricalFinding),
    Continuous(ContinuousFinding),
    /// Not analyzable, e.g. a constant feature.
    Degenerate { feature: usize, kind: FeatureKind, reason: String },
}

impl UnivariateFinding {
    pub fn feature(&self) -> usize {
        match self {
            UnivariateFinding::Categorical(f) => f.feature,
            UnivariateFinding::Continuous(f) => f.feature,
            UnivariateFinding::Degenerate { feature, .. } => *feature,
        }
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            UnivariateFinding::Categorical(f) => f.kind,
            UnivariateFinding::Continuous(f) => f.kind,
            UnivariateFinding::Degenerate { kind, .. } => *kind,
        }
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        match self {
            UnivariateFinding::Categorical(f) => f.analysis.any_significant(alpha),
            UnivariateFinding::Continuous(f) => f.selection.best.is_some(),
            UnivariateFinding::Degenerate { .. } => false,
        }
    }
}

/// Groups `values` by the distinct entries of `keys`, in ascending key order.
pub fn group_by_value(keys: &[f64], values: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some((k, g)) if *k == keys[i] => g.push(values[i]),
            _ => groups.push((keys[i], vec![values[i]])),
        }
    }
    groups
}

/// The categorical tests for one feature column and its SHAP values.
///
/// In each category the mean SHAP is tested against zero (t-test when
/// normal at `alpha`, signed-rank otherwise). Binary features compare the
/// two categories directly; discrete features use ANOVA or Kruskal–Wallis,
/// followed by Tukey HSD when significant with three or more categories.
pub fn analyze_categories(
    categories: &[f64],
    shap: &[f64],
    kind: Kind,
    alpha: f64,
    welch: bool,
) -> CategoricalAnalysis {
    let groups = group_by_value(categories, shap);
    let per_category: Vec<CategoryStats> = groups
        .iter()
        .map(|(v, g)| CategoryStats {
            value: *v,
            label: category_label(*v),
            n: g.len(),
            mean_shap: g.iter().sum::<f64>() / g.len() as f64,
            zero_test: (g.len() >= MIN_CATEGORY_N)
                .then(|| zero_mean_test(g, alpha).ok())
                .flatten(),
        })
        .collect();
    let usable: Vec<usize> = (0..groups.len())
        .filter(|&i| groups[i].1.len() >= MIN_CATEGORY_N)
        .collect();
    let mut analysis = CategoricalAnalysis {
        kind,
        per_category,
        between: None,
        posthoc: None,
        untestable: None,
    };
    if usable.len() < 2 {
        analysis.untestable = Some(format!(
            "fewer than 2 categories with at least {MIN_CATEGORY_N} samples"
        ));
        return analysis;
    }
    let samples: Vec<&[f64]> = usable.iter().map(|&i| groups[i].1.as_slice()).collect();
    let between = if kind == Kind::Binary {
        two_group_test(samples[0], samples[1], alpha, welch)
    } else {
        omnibus_test(&samples, alpha)
    };
    match between {
        Ok(t) => analysis.between = Some(t),
        Err(e) => {
            analysis.untestable = Some(e.to_string());
            return analysis;
        }
    }
    if kind != Kind::Binary && usable.len() >= 3 && analysis.between_significant(alpha) {
        let labels: Vec<String> = usable.iter().map(|&i| analysis.per_category[i].label.clone()).collect();
        if let Ok(pairs) = tukey_hsd(&samples, &labels, alpha) {
            let remapped = pairs
                .into_iter()
                .map(|mut p| {
                    p.first = usable[p.first];
                    p.second = usable[p.second];
                    p
                })
                .collect();
            analysis.posthoc = Some(remapped);
        }
    }
    analysis
}

pub fn analyze_categorical_feature(
    bundle: &DatasetBundle,
    feature: usize,
    kind: FeatureKind,
    config: &Config,
) -> CategoricalFinding {
    CategoricalFinding {
        feature,
        kind,
        analysis: analyze_categories(
            bundle.feature_column(feature),
            bundle.shap_column(feature),
            kind.kind,
            config.p_univariate,
            config.welch_two_sample,
        ),
    }
}

pub fn analyze_continuous_feature(
    bundle: &DatasetBundle,
    feature: usize,
    kind: FeatureKind,
    config: &Config,
) -> ContinuousFinding {
    ContinuousFinding {
        feature,
        kind,
        selection: select_best_fit(
            bundle.feature_column(feature),
            bundle.shap_column(feature),
            config.p_univariate,
        ),
    }
}

/// Exactly one finding per feature, whatever its kind.
pub fn analyze_feature(
    bundle: &DatasetBundle,
    feature: usize,
    kind: FeatureKind,
    config: &Config,
) -> UnivariateFinding {
    match kind.kind {
        Kind::Binary | Kind::Discrete => {
            UnivariateFinding::Categorical(analyze_categorical_feature(bundle, feature, kind, config))
        }
        Kind::Continuous => {
            UnivariateFinding::Continuous(analyze_continuous_feature(bundle, feature, kind, config))
        }
        Kind::Constant => UnivariateFinding::Degenerate {
            feature,
            kind,
            reason: "feature takes a single value".into(),
        },
    }
}
