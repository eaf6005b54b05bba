//! Plain-language sentences built from a fixed, versioned template table.

use serde::Serialize;

use crate::config::Config;
use crate::curves::{Coefficients, FitResult};
use crate::dataset::DatasetBundle;
use crate::format::{p_value, sig, signed};
use crate::interaction::{describe_group, InteractionFinding};
use crate::selection::{CutAnalysis, KRule};
use crate::stats::TestResult;
use crate::univariate::{CategoricalAnalysis, UnivariateFinding};

/// Bumped whenever any template text changes.
pub const TEMPLATE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    SelectionCut,
    SelectionManual,
    SelectionFallbackBelow,
    SelectionFallbackDefault,
    CategoryClause,
    BetweenClause,
    TukeyClause,
    CategoricalPattern,
    CategoricalNone,
    Linear,
    Quadratic,
    Sigmoid,
    ContinuousNone,
    Degenerate,
    GroupClause,
    MarginClause,
    InteractionCategorical,
    InteractionContinuous,
    InteractionNone,
    InteractionSkipped,
}

impl TemplateId {
    pub const ALL: [TemplateId; 20] = [
        TemplateId::SelectionCut,
        TemplateId::SelectionManual,
        TemplateId::SelectionFallbackBelow,
        TemplateId::SelectionFallbackDefault,
        TemplateId::CategoryClause,
        TemplateId::BetweenClause,
        TemplateId::TukeyClause,
        TemplateId::CategoricalPattern,
        TemplateId::CategoricalNone,
        TemplateId::Linear,
        TemplateId::Quadratic,
        TemplateId::Sigmoid,
        TemplateId::ContinuousNone,
        TemplateId::Degenerate,
        TemplateId::GroupClause,
        TemplateId::MarginClause,
        TemplateId::InteractionCategorical,
        TemplateId::InteractionContinuous,
        TemplateId::InteractionNone,
        TemplateId::InteractionSkipped,
    ];

    pub fn text(self) -> &'static str {
        match self {
            TemplateId::SelectionCut => {
                "Adjacent-rank tests on |SHAP| found {n_cuts} significant {cut_word} among {n_features} ranked features; \
                 the cut with the largest mean |SHAP| gap between {min} and {max} features keeps the top {k}."
            }
            TemplateId::SelectionManual => {
                "Adjacent-rank tests on |SHAP| found {n_cuts} significant {cut_word} among {n_features} ranked features; \
                 the number of analyzed features was fixed manually at {k}."
            }
            TemplateId::SelectionFallbackBelow => {
                "Adjacent-rank tests on |SHAP| found {n_cuts} significant {cut_word} among {n_features} ranked features; \
                 none lies between {min} and {max} features, so the largest cut below that range keeps the top {k}."
            }
            TemplateId::SelectionFallbackDefault => {
                "Adjacent-rank tests on |SHAP| found {n_cuts} significant {cut_word} among {n_features} ranked features; \
                 none lies at or below {max} features, so the default of the top {k} was used."
            }
            TemplateId::CategoryClause => {
                "feature '{feature}' = {category} pushes predictions {direction} (mean SHAP {mean}, {p})"
            }
            TemplateId::BetweenClause => "the categories of '{feature}' differ from each other ({test}, {p})",
            TemplateId::TukeyClause => {
                "'{feature}' = {first} and '{feature}' = {second} differ by {diff} in mean SHAP ({test}, {p})"
            }
            TemplateId::CategoricalPattern => "For predicting {label}, {clauses}.",
            TemplateId::CategoricalNone => {
                "No category of feature '{feature}' showed a statistically significant effect on predictions of {label}{detail}."
            }
            TemplateId::Linear => {
                "For predicting {label}, feature '{feature}' follows a linear pattern: higher values push predictions \
                 {direction} (a = {a}, {p}, RMSE {rmse})."
            }
            TemplateId::Quadratic => {
                "For predicting {label}, feature '{feature}' follows {shape} quadratic pattern with its turning point \
                 at {vertex} (a = {a}, {p}, RMSE {rmse})."
            }
            TemplateId::Sigmoid => {
                "For predicting {label}, feature '{feature}' follows a sigmoid pattern: predictions shift {direction} \
                 as the feature increases, with the inflection at {x0} (a = {a}, {p}, RMSE {rmse})."
            }
            TemplateId::ContinuousNone => {
                "No statistically significant linear, quadratic, or sigmoid pattern was found for feature '{feature}'."
            }
            TemplateId::Degenerate => "Feature '{feature}' could not be analyzed: {reason}.",
            TemplateId::GroupClause => "within {group}, the categories of '{feature}' differ ({test}, {p})",
            TemplateId::MarginClause => {
                "the {family} pattern of '{feature}' differs between {first} and {second} \
                 (mean SHAP margin {margin}, {test}, {p})"
            }
            TemplateId::InteractionCategorical => {
                "For predicting {label}, splitting by interaction partner '{partner}' shows that {clauses}."
            }
            TemplateId::InteractionContinuous => {
                "For predicting {label}, the effect of feature '{feature}' depends on '{partner}': {clauses}."
            }
            TemplateId::InteractionNone => {
                "No statistically significant interaction was found between feature '{feature}' and '{partner}'{detail}."
            }
            TemplateId::InteractionSkipped => {
                "The interaction between feature '{feature}' and '{partner}' was not tested: {reason}."
            }
        }
    }

    /// Substitutes `{key}` placeholders in a single pass, so values that
    /// themselves contain braces are never rescanned.
    ///
    /// # Panics
    /// If a placeholder has no value; templates and callers are fixed in code.
    pub fn fill(self, values: &[(&str, String)]) -> String {
        let text = self.text();
        let mut out = String::with_capacity(text.len() + 64);
        let mut rest = text;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = rest[open..].find('}').expect("unterminated placeholder") + open;
            let key = &rest[open + 1..close];
            let value = values
                .iter()
                .find(|(k, _)| *k == key)
                .unwrap_or_else(|| panic!("template {self:?} has no value for {key}"));
            out.push_str(&value.1);
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sentence {
    pub template_id: TemplateId,
    pub rendered: String,
    /// `selection`, `univariate/<feature>` or `interaction/<target>/<partner>`.
    pub finding_ref: String,
}

fn p_text(t: &TestResult) -> String {
    p_value(t.p_value)
}

pub fn render_selection_sentence(cuts: &CutAnalysis, n_features: usize, config: &Config) -> Sentence {
    let id = match cuts.rule {
        KRule::CutInRange => TemplateId::SelectionCut,
        KRule::Manual => TemplateId::SelectionManual,
        KRule::FallbackCutBelow => TemplateId::SelectionFallbackBelow,
        KRule::FallbackDefault => TemplateId::SelectionFallbackDefault,
    };
    let n_cuts = cuts.cut_positions.len();
    let rendered = id.fill(&[
        ("n_cuts", n_cuts.to_string()),
        ("cut_word", if n_cuts == 1 { "cut" } else { "cuts" }.to_string()),
        ("n_features", n_features.to_string()),
        ("min", config.candidate_num_min.to_string()),
        ("max", config.candidate_num_max.to_string()),
        ("k", cuts.chosen_k.to_string()),
    ]);
    Sentence {
        template_id: id,
        rendered,
        finding_ref: "selection".into(),
    }
}

/// Clauses describing significant effects within one categorical analysis.
fn categorical_clauses(feature: &str, analysis: &CategoricalAnalysis, alpha: f64) -> Vec<String> {
    let mut clauses = Vec::new();
    for c in &analysis.per_category {
        let Some(t) = c.zero_test.as_ref().filter(|t| t.is_significant(alpha)) else {
            continue;
        };
        clauses.push(TemplateId::CategoryClause.fill(&[
            ("feature", feature.to_string()),
            ("category", c.label.clone()),
            ("direction", if c.mean_shap > 0.0 { "higher" } else { "lower" }.to_string()),
            ("mean", signed(c.mean_shap, 3)),
            ("p", p_text(t)),
        ]));
    }
    if let Some(t) = analysis.between.as_ref().filter(|t| t.is_significant(alpha)) {
        clauses.push(TemplateId::BetweenClause.fill(&[
            ("feature", feature.to_string()),
            ("test", t.test.display_name().to_string()),
            ("p", p_text(t)),
        ]));
    }
    for pair in analysis.posthoc.iter().flatten() {
        if !pair.result.is_significant(alpha) {
            continue;
        }
        clauses.push(TemplateId::TukeyClause.fill(&[
            ("feature", feature.to_string()),
            ("first", analysis.per_category[pair.first].label.clone()),
            ("second", analysis.per_category[pair.second].label.clone()),
            ("diff", signed(pair.mean_diff, 3)),
            ("test", pair.result.test.display_name().to_string()),
            ("p", p_text(&pair.result)),
        ]));
    }
    clauses
}

fn fit_sentence(feature: &str, label: &str, fit: &FitResult) -> (TemplateId, String) {
    let p = fit.p_value_a.map_or_else(|| "p unavailable".to_string(), p_value);
    let common = |extra: Vec<(&'static str, String)>| {
        let mut v = vec![
            ("label", label.to_string()),
            ("feature", feature.to_string()),
            ("a", sig(fit.coefficients.a(), 3)),
            ("p", p.clone()),
            ("rmse", sig(fit.rmse, 3)),
        ];
        v.extend(extra);
        v
    };
    match fit.coefficients {
        Coefficients::Linear { a, .. } => {
            let dir = if a > 0.0 { "higher" } else { "lower" };
            (TemplateId::Linear, TemplateId::Linear.fill(&common(vec![("direction", dir.into())])))
        }
        Coefficients::Quadratic { a, b, .. } => {
            let shape = if a > 0.0 { "a U-shaped" } else { "an inverted-U" };
            let vertex = sig(-b / (2.0 * a), 3);
            (
                TemplateId::Quadratic,
                TemplateId::Quadratic.fill(&common(vec![("shape", shape.into()), ("vertex", vertex)])),
            )
        }
        Coefficients::Sigmoid { l, a, x0, .. } => {
            let dir = if a * l > 0.0 { "higher" } else { "lower" };
            (
                TemplateId::Sigmoid,
                TemplateId::Sigmoid.fill(&common(vec![("direction", dir.into()), ("x0", sig(x0, 3))])),
            )
        }
    }
}

pub fn render_univariate_sentence(finding: &UnivariateFinding, bundle: &DatasetBundle, config: &Config) -> Sentence {
    let feature = bundle.feature_name(finding.feature());
    let label = bundle.label_name();
    let alpha = config.p_univariate;
    let (template_id, rendered) = match finding {
        UnivariateFinding::Categorical(c) => {
            let clauses = categorical_clauses(feature, &c.analysis, alpha);
            if clauses.is_empty() {
                let detail = match (&c.analysis.between, &c.analysis.untestable) {
                    (Some(t), _) => format!(" ({}, {})", t.test.display_name(), p_text(t)),
                    (None, Some(reason)) => format!(" ({reason})"),
                    (None, None) => String::new(),
                };
                (
                    TemplateId::CategoricalNone,
                    TemplateId::CategoricalNone.fill(&[
                        ("feature", feature.to_string()),
                        ("label", label.to_string()),
                        ("detail", detail),
                    ]),
                )
            } else {
                (
                    TemplateId::CategoricalPattern,
                    TemplateId::CategoricalPattern.fill(&[("label", label.to_string()), ("clauses", clauses.join("; "))]),
                )
            }
        }
        UnivariateFinding::Continuous(c) => match &c.selection.best {
            Some(fit) => fit_sentence(feature, label, fit),
            None => (
                TemplateId::ContinuousNone,
                TemplateId::ContinuousNone.fill(&[("feature", feature.to_string())]),
            ),
        },
        UnivariateFinding::Degenerate { reason, .. } => (
            TemplateId::Degenerate,
            TemplateId::Degenerate.fill(&[("feature", feature.to_string()), ("reason", reason.clone())]),
        ),
    };
    Sentence {
        template_id,
        rendered,
        finding_ref: format!("univariate/{feature}"),
    }
}

pub fn render_interaction_sentence(finding: &InteractionFinding, bundle: &DatasetBundle, config: &Config) -> Sentence {
    let feature = bundle.feature_name(finding.target);
    let partner = bundle.feature_name(finding.partner);
    let label = bundle.label_name();
    let alpha = config.p_interaction;
    let finding_ref = format!("interaction/{feature}/{partner}");
    let base = |id: TemplateId, extra: Vec<(&'static str, String)>| {
        let mut v = vec![
            ("label", label.to_string()),
            ("feature", feature.to_string()),
            ("partner", partner.to_string()),
        ];
        v.extend(extra);
        (id, id.fill(&v))
    };
    let Some(partition) = finding.partition.as_ref() else {
        let reason = finding.note.clone().unwrap_or_else(|| "not applicable".into());
        let (template_id, rendered) = base(TemplateId::InteractionSkipped, vec![("reason", reason)]);
        return Sentence {
            template_id,
            rendered,
            finding_ref,
        };
    };

    let mut clauses = Vec::new();
    let mut strongest: Option<&TestResult> = None;
    for (g, group) in finding.groups.iter().enumerate() {
        let Some(t) = group.categorical.as_ref().and_then(|c| c.between.as_ref()) else {
            continue;
        };
        if strongest.is_none_or(|s| t.p_value < s.p_value) {
            strongest = Some(t);
        }
        if t.is_significant(alpha) {
            clauses.push(TemplateId::GroupClause.fill(&[
                ("group", describe_group(partner, partition, g)),
                ("feature", feature.to_string()),
                ("test", t.test.display_name().to_string()),
                ("p", p_text(t)),
            ]));
        }
    }
    for m in &finding.margin_tests {
        if strongest.is_none_or(|s| m.result.p_value < s.p_value) {
            strongest = Some(&m.result);
        }
        if m.result.is_significant(alpha) {
            clauses.push(TemplateId::MarginClause.fill(&[
                ("family", finding.family.map_or("fitted", |f| f.name()).to_string()),
                ("feature", feature.to_string()),
                ("first", describe_group(partner, partition, m.first)),
                ("second", describe_group(partner, partition, m.second)),
                ("margin", signed(m.mean_margin, 3)),
                ("test", m.result.test.display_name().to_string()),
                ("p", p_text(&m.result)),
            ]));
        }
    }

    let (template_id, rendered) = if clauses.is_empty() {
        let detail = match (strongest, &finding.note) {
            (Some(t), _) => format!(" (smallest p: {}, {})", t.test.display_name(), p_text(t)),
            (None, Some(note)) => format!(" ({note})"),
            (None, None) => String::new(),
        };
        base(TemplateId::InteractionNone, vec![("detail", detail)])
    } else {
        let id = if finding.margin_tests.is_empty() {
            TemplateId::InteractionCategorical
        } else {
            TemplateId::InteractionContinuous
        };
        base(id, vec![("clauses", clauses.join("; "))])
    };
    Sentence {
        template_id,
        rendered,
        finding_ref,
    }
}

/// True for templates that assert a significant effect.
pub fn claims_significance(id: TemplateId) -> bool {
    matches!(
        id,
        TemplateId::CategoricalPattern
            | TemplateId::Linear
            | TemplateId::Quadratic
            | TemplateId::Sigmoid
            | TemplateId::InteractionCategorical
            | TemplateId::InteractionContinuous
    )
}
