//! The forward pass carries value, gradient and per-axis second
//! derivatives together. This checks them against central differences and
//! evaluates the PDE residual of an untrained network.

use potential_dcm::bench::CaseId;
use potential_dcm::net::{forward, forward_jet, init_params, ActivationKind, NetworkSpec};
use potential_dcm::physics::pde_residual;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = init_params(&NetworkSpec::scalar_field(vec![20, 20], ActivationKind::Mish, 1))?;
    let x = [0.3, 0.6, 0.45];
    let jet = forward_jet(&params, x);
    let h = 1e-4;
    println!("value {:.12}", jet.value);
    for axis in 0..3 {
        let mut lo = x;
        let mut hi = x;
        lo[axis] -= h;
        hi[axis] += h;
        let (f_lo, f0, f_hi) = (forward(&params, lo), forward(&params, x), forward(&params, hi));
        let d1 = (f_hi - f_lo) / (2.0 * h);
        let d2 = (f_hi - 2.0 * f0 + f_lo) / (h * h);
        println!(
            "axis {axis}: d/dx {:+.10} (fd {:+.10})  d2/dx2 {:+.8} (fd {:+.8})",
            jet.grad[axis], d1, jet.lap_diag[axis], d2
        );
    }
    println!("laplacian {:+.8}", jet.laplacian());
    let case = CaseId::Case1Exponential;
    println!(
        "residual of the untrained network: {:+.6e}",
        pde_residual(&params, &case.material(), x)
    );
    println!(
        "residual of the exact solution:    {:+.6e}",
        pde_residual(&case.solution(), &case.material(), x)
    );
    Ok(())
}
