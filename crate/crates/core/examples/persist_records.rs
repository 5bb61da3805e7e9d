//! Writes search records to CSV and reads them back.
//!
//! `cargo run --release --example persist_records`

use diamond_chsh::{load_records, persist_records, random_search, ParamRanges, QuadPlan};

fn main() -> diamond_chsh::Result<()> {
    let plan = QuadPlan::new(1 << 12, 4, 3)?;
    let records = random_search(&ParamRanges::default(), 50, 3, &plan, 3)?;
    let path = std::env::temp_dir().join("diamond-chsh-records.csv");
    persist_records(&records, &path)?;
    print!("{}", std::fs::read_to_string(&path).map_err(|source| diamond_chsh::Error::Io {
        path: path.clone(),
        source,
    })?);
    let back = load_records(&path)?;
    assert_eq!(back.len(), records.len());
    for (r, b) in records.iter().zip(&back) {
        assert_eq!(r.summary(), *b);
    }
    println!("{} records round-tripped through {}", back.len(), path.display());
    Ok(())
}
