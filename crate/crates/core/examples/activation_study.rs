//! Trains case 1 once per activation function and ranks them by the
//! relative error of the trained potential.

use potential_dcm::cli::{run_matrix, variants, RunConfig, RunOptions, VaryAxis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("dcm-activation-study");
    let base = RunConfig {
        output_dir: dir.clone(),
        ..RunConfig::default()
    };
    let vs = variants(&base, VaryAxis::Activation, &[])?;
    let mut rows = run_matrix(&base, VaryAxis::Activation, &vs, RunOptions { quiet: true })?;
    rows.sort_by(|a, b| a.metric.relative_error.total_cmp(&b.metric.relative_error));
    for r in &rows {
        println!(
            "{:<16} rel err {:.3e}  loss {:.3e}  {:.1} s",
            r.variant, r.metric.relative_error, r.final_loss.total, r.wall_clock_s
        );
    }
    println!("table written to {}", dir.join("bench_activation.csv").display());
    Ok(())
}
