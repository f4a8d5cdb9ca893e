//! Write the optimal-efficiency table for N = 2..=30 as CSV.
//!
//! `cargo run --example figure2_table -- out.csv` writes to a file,
//! otherwise to stdout.

use std::fs::File;

use wstate::efficiency::efficiency_curve;

fn main() -> wstate::Result<()> {
    let curve = efficiency_curve(30)?;
    match std::env::args().nth(1) {
        Some(path) => curve.write_csv(File::create(path)?)?,
        None => curve.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}
