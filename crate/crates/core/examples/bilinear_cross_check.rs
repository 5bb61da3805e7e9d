//! One smeared Hadamard bilinear by quasi-Monte Carlo and by the tensor
//! Gauss-Legendre rule, for a spacelike pair and a self-pair.
//!
//! `cargo run --release --example bilinear_cross_check`

use diamond_chsh::quad::tensor_oracle_with_error;
use diamond_chsh::{hadamard_bilinear, DiamondSide, DiamondTestFunction, HadamardKernel, MassParam, QuadPlan};

fn main() -> diamond_chsh::Result<()> {
    let m = MassParam::new(0.01)?;
    let f = DiamondTestFunction::new(DiamondSide::Right, 1.5, 0.5, 1.0)?;
    let g = DiamondTestFunction::new(DiamondSide::Left, 1.0, 0.8, 2.0)?;
    let plan = QuadPlan::default();
    for (label, u, v) in [("H(f, g)", &f, &g), ("H(f, f)", &f, &f)] {
        let qmc = hadamard_bilinear(u, v, m, &plan)?;
        let (oracle, step) = tensor_oracle_with_error(u, v, &HadamardKernel::new(m), 4)?;
        let z = (qmc.value - oracle).abs() / qmc.std_error.hypot(step);
        println!(
            "{label}: QMC {:.8} ± {:.1e}   tensor {oracle:.8} ± {step:.1e}   |diff| = {z:.2} combined errors",
            qmc.value, qmc.std_error
        );
    }
    Ok(())
}
