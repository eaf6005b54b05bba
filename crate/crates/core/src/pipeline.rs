//! End-to-end orchestration: rank, cut, classify, analyze, report.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::dataset::DatasetBundle;
use crate::error::Result;
use crate::interaction::{analyze_target, InteractionAssignment, InteractionFinding};
use crate::report::{assemble_report, ReportManifest};
use crate::selection::{
    adjacent_significance_cuts, classify_feature_kind, rank_features, CutAnalysis, FeatureKind, FeatureRanking,
};
use crate::univariate::{analyze_feature, UnivariateFinding};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetInteractions {
    pub target: usize,
    pub assignment: InteractionAssignment,
    pub findings: Vec<InteractionFinding>,
}

/// Everything computed for one dataset, before any file is written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub ranking: FeatureRanking,
    pub cuts: CutAnalysis,
    /// Kind of every feature, indexed by feature.
    pub kinds: Vec<FeatureKind>,
    /// Selected features in rank order.
    pub important: Vec<usize>,
    /// One finding per selected feature, in rank order.
    pub univariate: Vec<UnivariateFinding>,
    /// One entry per selected feature, in rank order.
    pub interactions: Vec<TargetInteractions>,
}

impl Analysis {
    pub fn n_significant_univariate(&self, config: &Config) -> usize {
        self.univariate
            .iter()
            .filter(|f| f.is_significant(config.p_univariate))
            .count()
    }

    pub fn n_significant_interactions(&self) -> usize {
        self.interactions
            .iter()
            .flat_map(|t| &t.findings)
            .filter(|f| f.significant)
            .count()
    }

    pub fn univariate_of(&self, feature: usize) -> Option<&UnivariateFinding> {
        self.univariate.iter().find(|f| f.feature() == feature)
    }
}

/// Ranking and feature-count selection only.
pub fn select_features(bundle: &DatasetBundle, config: &Config) -> (FeatureRanking, CutAnalysis) {
    let ranking = rank_features(bundle);
    let cuts = adjacent_significance_cuts(bundle, &ranking, config);
    (ranking, cuts)
}

/// Runs every analysis stage in order.
pub fn analyze(bundle: &DatasetBundle, config: &Config) -> Analysis {
    info!("stage 1/5: ranking {} features", bundle.n_features());
    let ranking = rank_features(bundle);
    info!("stage 2/5: adjacent significance cuts");
    let cuts = adjacent_significance_cuts(bundle, &ranking, config);
    info!(
        "selected {} features ({} cuts at {:?}, rule {:?})",
        cuts.chosen_k,
        cuts.cut_positions.len(),
        cuts.cut_positions,
        cuts.rule
    );
    info!("stage 3/5: classifying feature kinds");
    let kinds: Vec<FeatureKind> = (0..bundle.n_features())
        .into_par_iter()
        .map(|j| classify_feature_kind(bundle.feature_column(j), config.cont_bound))
        .collect();
    let important = ranking.top(cuts.chosen_k).to_vec();

    info!("stage 4/5: univariate analysis of {} features", important.len());
    let univariate: Vec<UnivariateFinding> = important
        .par_iter()
        .map(|&j| analyze_feature(bundle, j, kinds[j], config))
        .collect();

    info!("stage 5/5: interaction analysis");
    let interactions: Vec<TargetInteractions> = if bundle.n_features() < 2 {
        Vec::new()
    } else {
        important
            .par_iter()
            .zip(univariate.par_iter())
            .map(|(&target, finding)| {
                let continuous = match finding {
                    UnivariateFinding::Continuous(c) => Some(c),
                    _ => None,
                };
                let (assignment, findings) = analyze_target(bundle, target, &kinds, continuous, config);
                TargetInteractions {
                    target,
                    assignment,
                    findings,
                }
            })
            .collect()
    };
    Analysis {
        ranking,
        cuts,
        kinds,
        important,
        univariate,
        interactions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// 0 when every output was written.
    pub exit_code: i32,
    pub n_important: usize,
    pub n_significant_univariate: usize,
    pub n_significant_interactions: usize,
    /// Findings carrying a degenerate flag; reported as warnings.
    pub n_degenerate: usize,
    pub output_dir: PathBuf,
    pub elapsed: Duration,
}

/// Analysis plus report; the manifest is returned alongside the summary.
pub fn run_pipeline(bundle: &DatasetBundle, config: &Config) -> Result<(RunSummary, ReportManifest)> {
    let start = Instant::now();
    let analysis = analyze(bundle, config);
    info!("writing report to {}", config.output_dir.display());
    let manifest = assemble_report(bundle, &analysis, config)?;
    let n_degenerate = analysis
        .univariate
        .iter()
        .filter(|f| crate::report::univariate_degenerate(f))
        .count()
        + analysis
            .interactions
            .iter()
            .flat_map(|t| &t.findings)
            .filter(|f| f.degenerate())
            .count();
    let summary = RunSummary {
        exit_code: 0,
        n_important: analysis.important.len(),
        n_significant_univariate: analysis.n_significant_univariate(config),
        n_significant_interactions: analysis.n_significant_interactions(),
        n_degenerate,
        output_dir: config.output_dir.clone(),
        elapsed: start.elapsed(),
    };
    Ok((summary, manifest))
}
