//! Evaluates the correlator for each built-in reference parameter set and
//! prints all eight bilinears.
//!
//! `cargo run --release --example reference_rows`

use diamond_chsh::{chsh_correlator, BilinearSet, QuadPlan, REFERENCE_ROWS};

fn main() -> diamond_chsh::Result<()> {
    let plan = QuadPlan::default();
    for (i, (params, reference)) in REFERENCE_ROWS.iter().enumerate() {
        let result = chsh_correlator(&params.scenario()?, &plan)?;
        println!("row {}: {params:?}", i + 1);
        for (name, e) in BilinearSet::NAMES.iter().zip(result.bilinears.to_array()) {
            println!("  {name:<6} {:>14.8} ± {:.1e}", e.value, e.std_error);
        }
        println!(
            "  C = {:.6} ± {:.1e} ({}), reference {reference}\n",
            result.correlator,
            result.correlator_error,
            result.classification.as_str()
        );
    }
    Ok(())
}
