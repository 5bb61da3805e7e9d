//! A small random search over the default parameter box.
//!
//! `cargo run --release --example random_search -- 2000`

use diamond_chsh::cli::format_table;
use diamond_chsh::{random_search, ParamRanges, QuadPlan};

fn main() -> diamond_chsh::Result<()> {
    let samples = std::env::args().nth(1).map_or(Ok(500), |s| s.parse()).unwrap_or(500);
    let plan = QuadPlan::default().with_seed(11);
    let records = random_search(&ParamRanges::default(), samples, 11, &plan, 5)?;
    print!("{}", format_table(&records));
    Ok(())
}
