//! Command-line front end.
//!
//! Exit codes: 0 success (warnings allowed), 1 input or configuration
//! error, 2 analysis or output failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::warn;

use clesh::config::{load_config, Config};
use clesh::dataset::load_dataset;
use clesh::pipeline::{run_pipeline, select_features};

#[derive(Debug, Parser)]
#[command(name = "clesh", version, about = "Statistically validated analysis of SHAP values")]
struct Args {
    /// Feature matrix CSV (header row, one column per feature).
    #[arg(long)]
    features: PathBuf,
    /// SHAP matrix CSV with the same headers as the features file.
    #[arg(long)]
    shap: PathBuf,
    /// Name of the predicted label, used in report sentences.
    #[arg(long)]
    label: String,
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    candidate_num_min: Option<String>,
    #[arg(long)]
    candidate_num_max: Option<String>,
    #[arg(long)]
    p_feature_selection: Option<String>,
    #[arg(long)]
    cont_bound: Option<String>,
    /// Analyze exactly this many top-ranked features.
    #[arg(long)]
    manual_num: Option<String>,
    #[arg(long)]
    p_univariate: Option<String>,
    #[arg(long)]
    p_interaction: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    #[arg(long)]
    rng_seed: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    strict_paired_nonparametric: Option<String>,
    #[arg(long)]
    interaction_top_k: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    welch_two_sample: Option<String>,
    /// Also write a self-contained report.html.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    html: Option<String>,

    /// Stop after choosing the number of important features and print it.
    #[arg(long)]
    dry_run: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Log stage progress to stderr; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Args {
    fn overrides(&self) -> BTreeMap<String, String> {
        let flags = [
            ("candidate_num_min", &self.candidate_num_min),
            ("candidate_num_max", &self.candidate_num_max),
            ("p_feature_selection", &self.p_feature_selection),
            ("cont_bound", &self.cont_bound),
            ("manual_num", &self.manual_num),
            ("p_univariate", &self.p_univariate),
            ("p_interaction", &self.p_interaction),
            ("output_dir", &self.output_dir),
            ("rng_seed", &self.rng_seed),
            ("strict_paired_nonparametric", &self.strict_paired_nonparametric),
            ("interaction_top_k", &self.interaction_top_k),
            ("welch_two_sample", &self.welch_two_sample),
            ("html", &self.html),
        ];
        flags
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn print_summary(config: &Config, n_samples: usize, n_features: usize, summary: &clesh::pipeline::RunSummary, n_files: usize) {
    println!("clesh {}", env!("CARGO_PKG_VERSION"));
    println!("  samples x features        {n_samples} x {n_features}");
    println!("  important features        {}", summary.n_important);
    println!("  significant univariate    {}", summary.n_significant_univariate);
    println!("  significant interactions  {}", summary.n_significant_interactions);
    println!("  degenerate findings       {}", summary.n_degenerate);
    println!(
        "  output                    {} ({n_files} files, report.md{})",
        summary.output_dir.display(),
        if config.html { ", report.html" } else { "" }
    );
    println!("  elapsed                   {:.2} s", summary.elapsed.as_secs_f64());
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_logging(args.verbose);

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not configure {n} threads: {e}");
        }
    }

    let config = match load_config(args.config.as_deref(), &args.overrides()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let bundle = match load_dataset(&args.features, &args.shap, &args.label) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if args.dry_run {
        let (_, cuts) = select_features(&bundle, &config);
        println!("chosen_k = {}", cuts.chosen_k);
        println!("rule = {}", serde_json::to_string(&cuts.rule).unwrap_or_default().trim_matches('"'));
        println!("cut_positions = {:?}", cuts.cut_positions);
        return ExitCode::SUCCESS;
    }

    match run_pipeline(&bundle, &config) {
        Ok((summary, manifest)) => {
            if summary.n_degenerate > 0 {
                warn!("{} findings are degenerate; see the report caveats", summary.n_degenerate);
            }
            print_summary(&config, bundle.n_samples(), bundle.n_features(), &summary, manifest.files.len());
            ExitCode::from(summary.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
