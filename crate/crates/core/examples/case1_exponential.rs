//! Headline run: exponentially graded cube, arctan 2x30 network, LHS
//! collocation, 1000 Adam steps followed by L-BFGS.

use potential_dcm::bench::{evaluate_case, flux_profile, CaseId, EvalGrid};
use potential_dcm::net::{init_params, ActivationKind, NetworkSpec};
use potential_dcm::optim::{train_with, AdamConfig, LbfgsConfig};
use potential_dcm::physics::attach_case_bcs;
use potential_dcm::sampling::{sample_domain, SamplerKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = CaseId::Case1Exponential;
    let raw = sample_domain(SamplerKind::LatinHypercube { seed: 0 }, case.geometry(), 3000, 300)?;
    let set = attach_case_bcs(case, raw)?;
    let params = init_params(&NetworkSpec::scalar_field(vec![30, 30], ActivationKind::Arctan, 0))?;

    let (trained, history) = train_with(
        params,
        &case.material(),
        &set,
        &AdamConfig::default(),
        &LbfgsConfig::default(),
        |rec, _| {
            if rec.iter % 250 == 0 {
                println!("{:>5} {:<5} loss {:.3e}", rec.iter, rec.phase.name(), rec.loss.total);
            }
        },
    )?;
    println!(
        "adam {} + lbfgs {} iterations ({:?}) in {:.1} s, final loss {:.3e}",
        history.adam_iters,
        history.lbfgs_iters,
        history.lbfgs_status,
        history.total_ms / 1e3,
        history.final_loss.total
    );

    let eval = evaluate_case(case, &trained, EvalGrid::for_case(case, 21)?)?;
    println!(
        "relative error {:.3e}, L2 {:.3e}, max abs {:.3e}",
        eval.metric.relative_error, eval.metric.l2_relative_error, eval.metric.max_abs_error
    );

    let q_exact = -1000.0 / (1.0 - (-2.0f64).exp());
    let profile = flux_profile(case, &trained, case.default_profile(), 21)?;
    let worst = profile
        .iter()
        .map(|r| ((r.q_pred - q_exact) / q_exact).abs())
        .fold(0.0, f64::max);
    for r in profile.iter().step_by(5) {
        println!(
            "z = {:.2}  phi {:>9.4} / {:>9.4}  q {:>10.3} / {:>10.3}",
            r.point[2], r.phi_pred, r.phi_exact, r.q_pred, r.q_exact
        );
    }
    println!("worst flux deviation along the center line: {:.3}%", 100.0 * worst);
    Ok(())
}
