//! Adam alone, L-BFGS alone and Adam followed by L-BFGS on case 1, each
//! with the same total iteration budget, over three seeds.

use potential_dcm::cli::{execute, RunConfig, RunOptions, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:<10} {:>5} {:>11} {:>11} {:>7}",
        "schedule", "seed", "loss", "rel err", "iters"
    );
    for schedule in Schedule::ALL {
        for seed in 0..3 {
            let cfg = schedule.apply(&RunConfig::default().with_seed(seed));
            let out = execute(&cfg, RunOptions { quiet: true })?;
            println!(
                "{:<10} {:>5} {:>11.3e} {:>11.3e} {:>7}",
                schedule.name(),
                seed,
                out.history.final_loss.total,
                out.evaluation.metric.relative_error,
                out.history.records.len()
            );
        }
    }
    Ok(())
}
