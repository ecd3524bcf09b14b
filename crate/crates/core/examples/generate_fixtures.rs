//! Regenerate the synthetic park log and retail sales fixtures.
//!
//! ```text
//! cargo run --example generate_fixtures -- [OUT_DIR]
//! ```
//!
//! Without an argument the files land in the workspace `fixtures/` directory.

use std::path::PathBuf;

use hypogram::synth::{m5, vast, VastOptions};

fn main() -> std::io::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    std::fs::create_dir_all(&dir)?;

    let log = vast(&VastOptions::default());
    std::fs::write(dir.join("vast.csv"), &log.data.csv)?;
    std::fs::write(dir.join("vast.json"), log.data.schema_json())?;
    println!("vast: {} rows, stranded cars {:?}", log.data.csv.lines().count() - 1, log.stranded);

    let sales = m5(5, 200);
    std::fs::write(dir.join("m5.csv"), &sales.csv)?;
    std::fs::write(dir.join("m5.json"), sales.schema_json())?;
    println!("m5: {} rows", sales.csv.lines().count() - 1);
    Ok(())
}
