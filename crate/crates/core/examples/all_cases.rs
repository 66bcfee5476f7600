//! Trains the default network on each of the five benchmark cases and
//! prints the accuracy table.

use potential_dcm::bench::CaseId;
use potential_dcm::cli::{execute, RunConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:<20} {:>11} {:>11} {:>11} {:>8}",
        "case", "loss", "rel err", "L2 err", "time s"
    );
    for case in CaseId::ALL {
        let cfg = RunConfig {
            case,
            ..RunConfig::default()
        };
        let out = execute(&cfg, RunOptions { quiet: true })?;
        println!(
            "{:<20} {:>11.3e} {:>11.3e} {:>11.3e} {:>8.1}",
            case.name(),
            out.history.final_loss.total,
            out.evaluation.metric.relative_error,
            out.evaluation.metric.l2_relative_error,
            out.wall_clock_s
        );
    }
    Ok(())
}
