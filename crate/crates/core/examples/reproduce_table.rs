//! Fills the expected axiom table from a small generated suite. Pass the
//! number of instances per block as the first argument (default 40).

use fairdiv::cli::table::{block_suites, reproduce, table_manifest};
use fairdiv::model::Limits;

fn main() -> fairdiv::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(40);
    let suites = block_suites(&table_manifest(trials, 1))?;
    let report = reproduce(&suites, &Limits::default(), false)?;
    print!("{}", report.to_text());
    for block in &report.blocks {
        for cell in block.cells.iter().filter(|c| c.witness.is_some()).take(3) {
            let w = cell.witness.as_ref().unwrap();
            println!(
                "{} {} {}: witness on {}",
                block.block, cell.mechanism, cell.property, w.instance
            );
        }
    }
    std::process::exit(report.exit_code);
}
