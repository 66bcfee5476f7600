//! Compares the seven collocation samplers: uniformity of 1000 points in
//! the unit cube, then accuracy after a short training run on case 1.

use potential_dcm::cli::{execute, RunConfig, RunOptions};
use potential_dcm::optim::{AdamConfig, LbfgsConfig};
use potential_dcm::sampling::{anchored_box_discrepancy, unit_points, SamplerKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig {
        adam: AdamConfig {
            max_iters: 500,
            ..Default::default()
        },
        lbfgs: LbfgsConfig {
            max_iters: 500,
            ..Default::default()
        },
        ..RunConfig::default()
    };
    println!(
        "{:<16} {:>12} {:>11} {:>11}",
        "sampler", "discrepancy", "loss", "rel err"
    );
    for kind in SamplerKind::all(0) {
        let disc = anchored_box_discrepancy(&unit_points(kind, 1000, 3)?, 16);
        let out = execute(
            &RunConfig {
                sampler: kind,
                ..base.clone()
            },
            RunOptions { quiet: true },
        )?;
        println!(
            "{:<16} {:>12.4e} {:>11.3e} {:>11.3e}",
            kind.name(),
            disc,
            out.history.final_loss.total,
            out.evaluation.metric.relative_error
        );
    }
    Ok(())
}
