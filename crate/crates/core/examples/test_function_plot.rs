//! Samples a diamond bump on a grid and writes `t,x,value` CSV to stdout,
//! ready for any plotting tool.
//!
//! `cargo run --example test_function_plot > bump.csv`

use diamond_chsh::cli::plot_grid;
use diamond_chsh::{DiamondSide, DiamondTestFunction};

fn main() -> diamond_chsh::Result<()> {
    let f = DiamondTestFunction::new(DiamondSide::Right, 2.0, 0.1, 1.0)?;
    let rows = plot_grid(&f, 60);
    println!("t,x,value");
    for (t, x, v) in &rows {
        println!("{t},{x},{v}");
    }
    let peak = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    eprintln!("{} samples, peak {peak:.6} at the diamond center x = {}", rows.len(), f.center_x());
    Ok(())
}
