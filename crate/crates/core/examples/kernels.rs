//! The two kernels across the light cone of the origin.
//!
//! `cargo run --example kernels`

use diamond_chsh::{
    hadamard_kernel, lorentz_interval, pauli_jordan_kernel, KernelGuard, MassParam, SpacetimePoint,
};

fn main() -> diamond_chsh::Result<()> {
    let m = MassParam::new(0.1)?;
    let guard = KernelGuard::default();
    println!("{:>6} {:>6} {:>10} {:>14} {:>14}", "t", "x", "lambda", "Pauli-Jordan", "Hadamard");
    for (t, x) in [(2.0, 0.0), (1.0, 0.5), (1.0, 0.999), (1.0, 1.0), (0.5, 1.0), (0.0, 2.0), (-1.0, 0.5)] {
        let p = SpacetimePoint::new(t, x);
        println!(
            "{t:>6} {x:>6} {:>10.4} {:>14.6e} {:>14.6e}",
            lorentz_interval(p),
            pauli_jordan_kernel(p, m),
            hadamard_kernel(p, m, guard)
        );
    }
    Ok(())
}
