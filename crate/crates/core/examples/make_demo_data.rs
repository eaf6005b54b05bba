//! Regenerates `data/demo_features.csv` and `data/demo_shap.csv`.
//!
//! ```text
//! cargo run -p clesh --example make_demo_data [output-dir]
//! ```

use std::path::PathBuf;

use clesh::synthetic::{demo_dataset, DEMO_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;
    let bundle = demo_dataset(DEMO_SEED);
    bundle.write_csv(&dir.join("demo_features.csv"), &dir.join("demo_shap.csv"))?;
    println!(
        "wrote {} samples x {} features to {}",
        bundle.n_samples(),
        bundle.n_features(),
        dir.display()
    );
    Ok(())
}
