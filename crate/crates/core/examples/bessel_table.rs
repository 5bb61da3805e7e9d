//! J0, Y0 and K0 on a logarithmic grid.
//!
//! `cargo run --example bessel_table`

use diamond_chsh::cli::{bessel_grid, GridScale};
use diamond_chsh::{bessel_j0, bessel_k0, bessel_y0};

fn main() -> diamond_chsh::Result<()> {
    println!("{:>12} {:>22} {:>22} {:>22}", "x", "J0", "Y0", "K0");
    for x in bessel_grid(1e-6, 50.0, 15, GridScale::Log)? {
        println!(
            "{x:>12.4e} {:>22.15e} {:>22.15e} {:>22.15e}",
            bessel_j0(x)?,
            bessel_y0(x)?,
            bessel_k0(x)?
        );
    }
    Ok(())
}
