//! Full `train` workflow into a directory: tables, VTK grid, parameter
//! snapshot and summary. Pass the output directory as the first argument.

use std::path::PathBuf;

use potential_dcm::bench::CaseId;
use potential_dcm::cli::{run_train, RunConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("dcm-case2"));
    let cfg = RunConfig {
        case: CaseId::Case2Poly3D,
        output_dir: dir.clone(),
        ..RunConfig::default()
    };
    let summary = run_train(&cfg, RunOptions::default())?;
    println!("relative error {:.3e}", summary.relative_error);
    for f in &summary.files {
        println!("{}", dir.join(f).display());
    }
    Ok(())
}
