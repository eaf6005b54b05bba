//! Report generation: plots, sentences, the report document and the manifest.
//!
//! Layout under `output_dir`:
//!
//! ```text
//! feature_selection.svg
//! univariate_analysis/<rank>_<feature>_*.svg
//! interaction_analysis/<rank>_<target>_x_<partner>_*.svg
//! report.md
//! report.html        (optional)
//! manifest.json
//! ```

pub mod doc;
pub mod sentence;
pub mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Component, Path};

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::curves::{Family, FitResult, FitSelection};
use crate::dataset::DatasetBundle;
use crate::error::{CleshError, Result};
use crate::format::{category_label, p_value, sig, signed};
use crate::interaction::{describe_group, InteractionFinding};
use crate::pipeline::{Analysis, TargetInteractions};
use crate::selection::KRule;
use crate::stats::{TestResult, TukeyPair};
use crate::univariate::{group_by_value, CategoricalAnalysis, UnivariateFinding, MIN_CATEGORY_N};

use doc::Block;
pub use sentence::{
    claims_significance, render_interaction_sentence, render_selection_sentence, render_univariate_sentence,
    Sentence, TemplateId, TEMPLATE_VERSION,
};
pub use svg::{render_svg, BoxGroup, Interval, PlotPayload, ScatterSeries};

pub const SELECTION_PLOT: &str = "feature_selection.svg";
pub const UNIVARIATE_DIR: &str = "univariate_analysis";
pub const INTERACTION_DIR: &str = "interaction_analysis";
pub const REPORT_MD: &str = "report.md";
pub const REPORT_HTML: &str = "report.html";
pub const MANIFEST: &str = "manifest.json";

/// Number of points on which fitted curves are drawn.
const CURVE_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Plot,
    Report,
    Manifest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    /// Relative to `output_dir`, with `/` separators.
    pub path: String,
    pub kind: FileKind,
    /// Hex SHA-256 of the file; `None` for the manifest itself.
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportManifest {
    /// Sorted by path.
    pub files: Vec<ManifestEntry>,
    pub config: Config,
    pub version: String,
}

/// A plot waiting to be rendered.
#[derive(Debug, Clone)]
struct PlotJob {
    path: String,
    payload: PlotPayload,
}

/// Lowercase ASCII slug of a feature name for file names.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_').to_string();
    if out.is_empty() { "feature".into() } else { out }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(dir: &Path, rel: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CleshError::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(&path, bytes).map_err(|source| CleshError::Write { path, source })
}

/// Writes one plot and returns its manifest entry.
pub fn render_plot(payload: &PlotPayload, output_dir: &Path, rel: &str) -> Result<ManifestEntry> {
    let svg = render_svg(payload);
    write_file(output_dir, rel, svg.as_bytes())?;
    Ok(ManifestEntry {
        path: rel.to_string(),
        kind: FileKind::Plot,
        sha256: Some(sha256_hex(svg.as_bytes())),
    })
}

fn is_safe_relative(p: &str) -> bool {
    let path = Path::new(p);
    !p.is_empty() && path.components().all(|c| matches!(c, Component::Normal(_)))
}

/// Deletes the files listed by a manifest from an earlier run.
fn remove_previous_outputs(output_dir: &Path) {
    let Ok(text) = fs::read_to_string(output_dir.join(MANIFEST)) else {
        return;
    };
    let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) else {
        warn!("ignoring unreadable {MANIFEST} from an earlier run");
        return;
    };
    let paths = value["files"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|f| f["path"].as_str());
    for p in paths {
        if is_safe_relative(p) {
            let _ = fs::remove_file(output_dir.join(p));
        }
    }
}

/// Any degenerate flag on a univariate finding.
pub fn univariate_degenerate(finding: &UnivariateFinding) -> bool {
    match finding {
        UnivariateFinding::Categorical(c) => c.analysis.degenerate(),
        UnivariateFinding::Continuous(c) => c.selection.attempted.iter().any(|f| f.degenerate),
        UnivariateFinding::Degenerate { .. } => true,
    }
}

fn curve_points(fit: &FitResult, x: &[f64]) -> Vec<(f64, f64)> {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    (0..CURVE_POINTS)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
            (t, fit.coefficients.eval(t))
        })
        .collect()
}

fn category_boxes(keys: &[f64], shap: &[f64], series: usize) -> Vec<BoxGroup> {
    group_by_value(keys, shap)
        .into_iter()
        .map(|(v, values)| BoxGroup {
            label: category_label(v),
            values,
            series,
        })
        .collect()
}

fn tukey_payload(title: String, analysis: &CategoricalAnalysis, pairs: &[TukeyPair], alpha: f64) -> PlotPayload {
    PlotPayload::Tukey {
        title,
        intervals: pairs
            .iter()
            .map(|p| Interval {
                label: format!(
                    "{} vs {}",
                    analysis.per_category[p.first].label, analysis.per_category[p.second].label
                ),
                estimate: p.mean_diff,
                low: p.ci_low,
                high: p.ci_high,
                significant: p.result.is_significant(alpha),
            })
            .collect(),
    }
}

fn test_cell(t: &TestResult) -> String {
    let mut s = format!("{}, {}", t.test.display_name(), p_value(t.p_value));
    if t.degenerate {
        s.push_str(" (degenerate)");
    }
    s
}

fn fit_rows(selection: &FitSelection, alpha: f64) -> Vec<Vec<String>> {
    let best = selection.best.as_ref().map(|b| b.family);
    Family::ALL
        .iter()
        .map(|&family| match selection.attempted.iter().find(|f| f.family == family) {
            Some(f) => vec![
                family.name().to_string(),
                sig(f.coefficients.a(), 3),
                f.std_error_a.map_or("n/a".into(), |s| sig(s, 3)),
                f.p_value_a.map_or("n/a".into(), p_value),
                sig(f.rmse, 3),
                if !f.converged {
                    "did not converge".into()
                } else if Some(family) == best {
                    "best".into()
                } else if f.is_significant(alpha) {
                    "significant".into()
                } else {
                    "not significant".into()
                },
            ],
            None => vec![
                family.name().to_string(),
                "n/a".into(),
                "n/a".into(),
                "n/a".into(),
                "n/a".into(),
                "not attempted".into(),
            ],
        })
        .collect()
}

fn category_table(analysis: &CategoricalAnalysis) -> Block {
    Block::Table {
        header: vec!["category".into(), "n".into(), "mean SHAP".into(), "zero-mean test".into()],
        rows: analysis
            .per_category
            .iter()
            .map(|c| {
                vec![
                    c.label.clone(),
                    c.n.to_string(),
                    signed(c.mean_shap, 3),
                    c.zero_test
                        .as_ref()
                        .map_or_else(|| format!("not tested (n < {MIN_CATEGORY_N})"), test_cell),
                ]
            })
            .collect(),
    }
}

fn tukey_table(analysis: &CategoricalAnalysis, pairs: &[TukeyPair]) -> Block {
    Block::Table {
        header: vec!["pair".into(), "mean difference".into(), "simultaneous CI".into(), "p".into()],
        rows: pairs
            .iter()
            .map(|p| {
                vec![
                    format!(
                        "{} vs {}",
                        analysis.per_category[p.first].label, analysis.per_category[p.second].label
                    ),
                    signed(p.mean_diff, 3),
                    format!("[{}, {}]", sig(p.ci_low, 3), sig(p.ci_high, 3)),
                    p_value(p.result.p_value),
                ]
            })
            .collect(),
    }
}

/// Everything gathered while laying out the report.
struct Builder<'a> {
    bundle: &'a DatasetBundle,
    analysis: &'a Analysis,
    config: &'a Config,
    plots: Vec<PlotJob>,
    sentences: Vec<Sentence>,
    caveats: Vec<String>,
}

impl<'a> Builder<'a> {
    fn name(&self, j: usize) -> &'a str {
        self.bundle.feature_name(j)
    }

    fn plot(&mut self, blocks: &mut Vec<Block>, path: String, alt: String, payload: PlotPayload) {
        blocks.push(Block::Image {
            alt,
            path: path.clone(),
        });
        self.plots.push(PlotJob { path, payload });
    }

    fn methods(&self) -> Vec<Block> {
        let b = self.bundle;
        let mut blocks = vec![
            Block::Heading { level: 2, text: "Methods".into() },
            Block::Paragraph(format!(
                "{} samples and {} features were analyzed for predicting {}. Features were ranked by mean |SHAP|. \
                 Adjacent ranked features were compared on their |SHAP| values with a paired t-test when both \
                 pass the Shapiro-Wilk normality test at p_feature_selection, and with a {} otherwise. \
                 A significant difference marks a cut, and the number of analyzed features is chosen among the cuts.",
                b.n_samples(),
                b.n_features(),
                b.label_name(),
                if self.config.strict_paired_nonparametric {
                    "Wilcoxon signed-rank test on the differences"
                } else {
                    "Wilcoxon rank-sum test"
                }
            )),
            Block::Paragraph(format!(
                "Features with 2 distinct values are binary, those with more than cont_bound = {} distinct values \
                 are continuous, and the rest are discrete. For categorical features each category's SHAP values \
                 are tested against zero and the categories are compared with each other (t-test or rank-sum for \
                 two categories; ANOVA or Kruskal-Wallis for more, followed by Tukey HSD when significant). \
                 Categories with fewer than {MIN_CATEGORY_N} samples are shown but not tested. Continuous features \
                 are fitted with linear, quadratic and sigmoid curves of SHAP against the feature value; a family \
                 counts when its leading coefficient a is significant, and the significant family with the lowest \
                 RMSE is reported. Duplicate feature values are weighted by occurrence.",
                self.config.cont_bound
            )),
            Block::Paragraph(
                "Interaction partners are ranked by how well they explain local variation of the target's SHAP \
                 values. Samples are split by the partner's categories, or at its mean for a continuous partner. \
                 Categorical targets are re-tested inside each partner group; continuous targets are refitted per \
                 group and the fitted curves are compared over all observed target values with a paired test."
                    .into(),
            ),
            Block::Note(
                "Sigmoid coefficient p-values use the asymptotic normal-theory covariance of the nonlinear \
                 least-squares fit and are approximate in small samples."
                    .into(),
            ),
            Block::Paragraph("Configuration used for this run:".into()),
        ];
        blocks.push(Block::Table {
            header: vec!["setting".into(), "value".into()],
            rows: self
                .config
                .to_pairs()
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), v])
                .collect(),
        });
        blocks
    }

    fn selection(&mut self) -> Vec<Block> {
        let cuts = &self.analysis.cuts;
        let ranking = &self.analysis.ranking;
        let mut blocks = vec![Block::Heading {
            level: 2,
            text: "Feature-count selection".into(),
        }];
        let s = render_selection_sentence(cuts, self.bundle.n_features(), self.config);
        blocks.push(Block::Paragraph(s.rendered.clone()));
        self.sentences.push(s);
        self.plot(
            &mut blocks,
            SELECTION_PLOT.into(),
            "Mean |SHAP| by rank with significant cuts".into(),
            PlotPayload::Selection {
                title: "Mean |SHAP| by feature rank".into(),
                ranked_means: ranking.ranked_means(),
                cut_positions: cuts.cut_positions.clone(),
                chosen_k: cuts.chosen_k,
            },
        );
        let rows: Vec<Vec<String>> = ranking
            .order
            .iter()
            .enumerate()
            .map(|(r, &j)| {
                let next = cuts.adjacent.get(r);
                vec![
                    (r + 1).to_string(),
                    self.name(j).to_string(),
                    sig(ranking.mean_abs_shap[j], 3),
                    next.map_or("".into(), test_cell),
                    if cuts.cut_positions.contains(&(r + 1)) { "cut".into() } else { String::new() },
                    if r < cuts.chosen_k { "yes".into() } else { "no".into() },
                ]
            })
            .collect();
        blocks.push(Block::Table {
            header: vec![
                "rank".into(),
                "feature".into(),
                "mean |SHAP|".into(),
                "test vs next rank".into(),
                "cut".into(),
                "analyzed".into(),
            ],
            rows,
        });
        match cuts.rule {
            KRule::FallbackCutBelow | KRule::FallbackDefault => self.caveats.push(format!(
                "No significant cut lies between candidate_num_min = {} and candidate_num_max = {}; \
                 the feature count {} comes from a fallback rule.",
                self.config.candidate_num_min, self.config.candidate_num_max, cuts.chosen_k
            )),
            KRule::Manual if self.config.manual_num.is_some_and(|m| m > self.bundle.n_features()) => {
                self.caveats.push(format!(
                    "manual_num exceeds the {} available features and was clamped.",
                    self.bundle.n_features()
                ))
            }
            _ => {}
        }
        let n_degenerate = cuts.adjacent.iter().filter(|t| t.degenerate).count();
        if n_degenerate > 0 {
            self.caveats.push(format!(
                "{n_degenerate} adjacent-rank comparisons had zero variance and were assigned boundary p-values."
            ));
        }
        blocks
    }

    fn univariate(&mut self) -> Vec<Block> {
        let alpha = self.config.p_univariate;
        let mut blocks = vec![Block::Heading {
            level: 2,
            text: "Univariate findings".into(),
        }];
        let n_sig = self.analysis.n_significant_univariate(self.config);
        if n_sig == 0 {
            blocks.push(Block::Paragraph(format!(
                "No significant univariate patterns were found among the {} analyzed features (threshold p_univariate = {}).",
                self.analysis.important.len(),
                self.config.p_univariate
            )));
        } else {
            blocks.push(Block::Paragraph(format!(
                "{n_sig} of {} analyzed features show a significant pattern at p_univariate = {}.",
                self.analysis.important.len(),
                self.config.p_univariate
            )));
        }
        for (rank, finding) in self.analysis.univariate.iter().enumerate() {
            let j = finding.feature();
            let name = self.name(j);
            let kind = finding.kind();
            let prefix = format!("{UNIVARIATE_DIR}/{:02}_{}", rank + 1, slug(name));
            blocks.push(Block::Heading {
                level: 3,
                text: format!("{}. {name}", rank + 1),
            });
            blocks.push(Block::Note(format!(
                "{} feature, {} distinct values, mean |SHAP| {}",
                kind.kind.name(),
                kind.n_unique,
                sig(self.analysis.ranking.mean_abs_shap[j], 3)
            )));
            let s = render_univariate_sentence(finding, self.bundle, self.config);
            blocks.push(Block::Paragraph(s.rendered.clone()));
            self.sentences.push(s);
            let (x, shap) = (self.bundle.feature_column(j), self.bundle.shap_column(j));
            match finding {
                UnivariateFinding::Categorical(c) => {
                    let a = &c.analysis;
                    blocks.push(category_table(a));
                    if let Some(t) = &a.between {
                        blocks.push(Block::Paragraph(format!("Between categories: {}.", test_cell(t))));
                    }
                    if let Some(reason) = &a.untestable {
                        blocks.push(Block::Paragraph(format!("Between categories: not tested ({reason}).")));
                    }
                    self.plot(
                        &mut blocks,
                        format!("{prefix}_box.svg"),
                        format!("SHAP values of {name} by category"),
                        PlotPayload::Box {
                            title: format!("{name}: SHAP by category"),
                            x_label: name.to_string(),
                            y_label: "SHAP value".into(),
                            groups: category_boxes(x, shap, 0),
                            legend: vec![],
                        },
                    );
                    if let Some(pairs) = &a.posthoc {
                        blocks.push(tukey_table(a, pairs));
                        self.plot(
                            &mut blocks,
                            format!("{prefix}_tukey.svg"),
                            format!("Tukey HSD intervals for {name}"),
                            tukey_payload(format!("{name}: Tukey HSD"), a, pairs, alpha),
                        );
                    }
                    self.categorical_caveats(name, a);
                }
                UnivariateFinding::Continuous(c) => {
                    blocks.push(Block::Table {
                        header: vec![
                            "family".into(),
                            "a".into(),
                            "SE(a)".into(),
                            "p(a)".into(),
                            "RMSE".into(),
                            "status".into(),
                        ],
                        rows: fit_rows(&c.selection, alpha),
                    });
                    self.plot(
                        &mut blocks,
                        format!("{prefix}_scatter.svg"),
                        format!("SHAP values of {name} with the selected fit"),
                        PlotPayload::Scatter {
                            title: match &c.selection.best {
                                Some(f) => format!("{name}: {} fit", f.family.name()),
                                None => format!("{name}: no significant fit"),
                            },
                            x_label: name.to_string(),
                            y_label: "SHAP value".into(),
                            series: vec![ScatterSeries {
                                label: name.to_string(),
                                x: x.to_vec(),
                                y: shap.to_vec(),
                                curve: c.selection.best.as_ref().map(|f| curve_points(f, x)),
                            }],
                        },
                    );
                    for f in &c.selection.attempted {
                        if !f.converged {
                            self.caveats
                                .push(format!("'{name}': the {} fit did not converge.", f.family.name()));
                        } else if f.degenerate {
                            self.caveats.push(format!(
                                "'{name}': the {} fit has zero residuals; its p-value is a boundary value.",
                                f.family.name()
                            ));
                        }
                    }
                }
                UnivariateFinding::Degenerate { reason, .. } => {
                    self.caveats.push(format!("'{name}' was not analyzed: {reason}."));
                }
            }
        }
        blocks
    }

    fn categorical_caveats(&mut self, context: &str, a: &CategoricalAnalysis) {
        if a.degenerate() {
            self.caveats.push(format!(
                "{context}: at least one test had zero-variance input and reports a boundary p-value."
            ));
        }
        let small: Vec<&str> = a
            .per_category
            .iter()
            .filter(|c| c.excluded())
            .map(|c| c.label.as_str())
            .collect();
        if !small.is_empty() {
            self.caveats.push(format!(
                "{context}: categories {} have fewer than {MIN_CATEGORY_N} samples and were not tested.",
                small.join(", ")
            ));
        }
    }

    fn interactions(&mut self) -> Vec<Block> {
        let mut blocks = vec![Block::Heading {
            level: 2,
            text: "Interaction findings".into(),
        }];
        let n_sig = self.analysis.n_significant_interactions();
        let n_total: usize = self.analysis.interactions.iter().map(|t| t.findings.len()).sum();
        if n_sig == 0 {
            blocks.push(Block::Paragraph(format!(
                "No significant interaction patterns were found among {n_total} analyzed feature pairs \
                 (threshold p_interaction = {}).",
                self.config.p_interaction
            )));
        } else {
            blocks.push(Block::Paragraph(format!(
                "{n_sig} of {n_total} analyzed feature pairs show a significant interaction at p_interaction = {}.",
                self.config.p_interaction
            )));
        }
        for (rank, t) in self.analysis.interactions.iter().enumerate() {
            self.target_interactions(&mut blocks, rank, t);
        }
        blocks
    }

    fn target_interactions(&mut self, blocks: &mut Vec<Block>, rank: usize, t: &TargetInteractions) {
        let target = self.name(t.target);
        let candidates: Vec<String> = t
            .assignment
            .ranked_partners
            .iter()
            .take(3)
            .map(|&p| format!("{} ({})", self.name(p), sig(t.assignment.partner_scores[p], 3)))
            .collect();
        for finding in &t.findings {
            let partner = self.name(finding.partner);
            blocks.push(Block::Heading {
                level: 3,
                text: format!("{}. {target} with {partner}", rank + 1),
            });
            blocks.push(Block::Note(format!(
                "strongest partner candidates (interaction score): {}",
                candidates.join(", ")
            )));
            let s = render_interaction_sentence(finding, self.bundle, self.config);
            blocks.push(Block::Paragraph(s.rendered.clone()));
            self.sentences.push(s);
            let prefix = format!("{INTERACTION_DIR}/{:02}_{}_x_{}", rank + 1, slug(target), slug(partner));
            self.interaction_details(blocks, finding, &prefix);
        }
    }

    fn interaction_details(&mut self, blocks: &mut Vec<Block>, finding: &InteractionFinding, prefix: &str) {
        let alpha = self.config.p_interaction;
        let (target, partner) = (self.name(finding.target), self.name(finding.partner));
        let context = format!("'{target}' with '{partner}'");
        let Some(partition) = &finding.partition else {
            if let Some(note) = &finding.note {
                self.caveats.push(format!("{context}: not tested ({note})."));
            }
            return;
        };
        let (x, shap) = (self.bundle.feature_column(finding.target), self.bundle.shap_column(finding.target));
        let members: Vec<Vec<usize>> = (0..partition.n_groups()).map(|g| partition.members(g)).collect();
        let pick = |v: &[f64], rows: &[usize]| rows.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let group_names: Vec<String> = (0..partition.n_groups())
            .map(|g| describe_group(partner, partition, g))
            .collect();

        if finding.margin_tests.is_empty() && finding.family.is_none() {
            // Categorical target.
            let rows: Vec<Vec<String>> = finding
                .groups
                .iter()
                .enumerate()
                .map(|(g, gr)| {
                    let between = gr.categorical.as_ref().and_then(|c| c.between.as_ref());
                    vec![
                        group_names[g].clone(),
                        gr.n.to_string(),
                        between.map_or_else(
                            || gr.note.clone().unwrap_or_else(|| "not tested".into()),
                            test_cell,
                        ),
                    ]
                })
                .collect();
            blocks.push(Block::Table {
                header: vec!["partner group".into(), "n".into(), "between categories".into()],
                rows,
            });
            let mut groups = Vec::new();
            for (g, rows) in members.iter().enumerate() {
                groups.extend(category_boxes(&pick(x, rows), &pick(shap, rows), g));
            }
            self.plot(
                blocks,
                format!("{prefix}_box.svg"),
                format!("SHAP values of {target} by category, grouped by {partner}"),
                PlotPayload::Box {
                    title: format!("{target} by {partner}"),
                    x_label: target.to_string(),
                    y_label: "SHAP value".into(),
                    groups,
                    legend: group_names.iter().cloned().enumerate().collect(),
                },
            );
            for (g, gr) in finding.groups.iter().enumerate() {
                let Some(c) = &gr.categorical else { continue };
                self.categorical_caveats(&format!("{context}, {}", group_names[g]), c);
                if let Some(pairs) = &c.posthoc {
                    self.plot(
                        blocks,
                        format!("{prefix}_tukey_g{}.svg", g + 1),
                        format!("Tukey HSD intervals for {target} within {}", group_names[g]),
                        tukey_payload(format!("{target} within {}: Tukey HSD", group_names[g]), c, pairs, alpha),
                    );
                }
            }
        } else {
            // Continuous target.
            let rows: Vec<Vec<String>> = finding
                .groups
                .iter()
                .enumerate()
                .map(|(g, gr)| {
                    let fit = gr.fit.as_ref();
                    vec![
                        group_names[g].clone(),
                        gr.n.to_string(),
                        fit.map_or("n/a".into(), |f| sig(f.coefficients.a(), 3)),
                        fit.and_then(|f| f.p_value_a).map_or("n/a".into(), p_value),
                        if gr.fit_significant {
                            "kept".into()
                        } else {
                            gr.note.clone().unwrap_or_else(|| "a not significant".into())
                        },
                    ]
                })
                .collect();
            blocks.push(Block::Table {
                header: vec!["partner group".into(), "n".into(), "a".into(), "p(a)".into(), "status".into()],
                rows,
            });
            if !finding.margin_tests.is_empty() {
                blocks.push(Block::Table {
                    header: vec!["groups compared".into(), "mean SHAP margin".into(), "margin test".into()],
                    rows: finding
                        .margin_tests
                        .iter()
                        .map(|m| {
                            vec![
                                format!("{} vs {}", group_names[m.first], group_names[m.second]),
                                signed(m.mean_margin, 3),
                                test_cell(&m.result),
                            ]
                        })
                        .collect(),
                });
            }
            let series: Vec<ScatterSeries> = finding
                .groups
                .iter()
                .enumerate()
                .map(|(g, gr)| {
                    let gx = pick(x, &members[g]);
                    ScatterSeries {
                        label: if gr.fit_significant {
                            group_names[g].clone()
                        } else {
                            format!("{} (no fit)", group_names[g])
                        },
                        curve: gr
                            .fit
                            .as_ref()
                            .filter(|_| gr.fit_significant)
                            .map(|f| curve_points(f, &gx)),
                        y: pick(shap, &members[g]),
                        x: gx,
                    }
                })
                .collect();
            self.plot(
                blocks,
                format!("{prefix}_scatter.svg"),
                format!("SHAP values of {target} with per-group fits, grouped by {partner}"),
                PlotPayload::Scatter {
                    title: format!(
                        "{target} by {partner}: {} fits",
                        finding.family.map_or("curve", |f| f.name())
                    ),
                    x_label: target.to_string(),
                    y_label: "SHAP value".into(),
                    series,
                },
            );
            if let Some(note) = &finding.note {
                self.caveats.push(format!("{context}: {note}."));
            }
            if finding.degenerate() {
                self.caveats.push(format!(
                    "{context}: at least one fit or margin test had zero residuals and reports a boundary p-value."
                ));
            }
        }
    }

    fn caveats_section(&self) -> Vec<Block> {
        let mut items = self.caveats.clone();
        items.push(
            "SHAP values describe the fitted model, not the data-generating process; patterns are associations \
             the model has learned, not causal effects."
                .into(),
        );
        items.push(format!(
            "Many tests are run without multiplicity correction beyond Tukey HSD; at p = {} some findings \
             are expected by chance.",
            self.config.p_univariate
        ));
        vec![
            Block::Heading { level: 2, text: "Caveats".into() },
            Block::Bullets(items),
        ]
    }
}

/// Title line of the report.
pub fn report_title(label: &str) -> String {
    format!("SHAP analysis report: {label}")
}

/// Lays out the report without writing anything.
fn build(bundle: &DatasetBundle, analysis: &Analysis, config: &Config) -> (Vec<Block>, Vec<PlotJob>, Vec<Sentence>) {
    let mut b = Builder {
        bundle,
        analysis,
        config,
        plots: Vec::new(),
        sentences: Vec::new(),
        caveats: Vec::new(),
    };
    let mut blocks = vec![Block::Heading {
        level: 1,
        text: report_title(bundle.label_name()),
    }];
    blocks.extend(b.methods());
    blocks.extend(b.selection());
    blocks.extend(b.univariate());
    blocks.extend(b.interactions());
    blocks.extend(b.caveats_section());
    (blocks, b.plots, b.sentences)
}

/// Sentences of a report in document order.
pub fn report_sentences(bundle: &DatasetBundle, analysis: &Analysis, config: &Config) -> Vec<Sentence> {
    build(bundle, analysis, config).2
}

/// Writes plots, `report.md`, optional `report.html` and finally `manifest.json`.
pub fn assemble_report(bundle: &DatasetBundle, analysis: &Analysis, config: &Config) -> Result<ReportManifest> {
    let out = config.output_dir.as_path();
    fs::create_dir_all(out).map_err(|source| CleshError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    remove_previous_outputs(out);
    for sub in [UNIVARIATE_DIR, INTERACTION_DIR] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).map_err(|source| CleshError::Write { path: dir, source })?;
    }

    let (blocks, plots, sentences) = build(bundle, analysis, config);
    debug!("{} plots, {} sentences", plots.len(), sentences.len());

    let rendered: Vec<(String, String)> = plots
        .par_iter()
        .map(|job| (job.path.clone(), render_svg(&job.payload)))
        .collect();
    let mut files = Vec::new();
    for (path, svg) in &rendered {
        write_file(out, path, svg.as_bytes())?;
        files.push(ManifestEntry {
            path: path.clone(),
            kind: FileKind::Plot,
            sha256: Some(sha256_hex(svg.as_bytes())),
        });
    }

    let md = doc::to_markdown(&blocks);
    write_file(out, REPORT_MD, md.as_bytes())?;
    files.push(ManifestEntry {
        path: REPORT_MD.into(),
        kind: FileKind::Report,
        sha256: Some(sha256_hex(md.as_bytes())),
    });
    if config.html {
        let images: BTreeMap<String, String> = rendered.into_iter().collect();
        let html = doc::to_html(&report_title(bundle.label_name()), &blocks, &images);
        write_file(out, REPORT_HTML, html.as_bytes())?;
        files.push(ManifestEntry {
            path: REPORT_HTML.into(),
            kind: FileKind::Report,
            sha256: Some(sha256_hex(html.as_bytes())),
        });
    }
    files.push(ManifestEntry {
        path: MANIFEST.into(),
        kind: FileKind::Manifest,
        sha256: None,
    });
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let manifest = ReportManifest {
        files,
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CleshError::Analysis(e.to_string()))?;
    write_file(out, MANIFEST, format!("{json}\n").as_bytes())?;
    Ok(manifest)
}
