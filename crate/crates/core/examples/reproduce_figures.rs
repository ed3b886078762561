//! Writes the data for every figure into a directory (default `figures/`).
//!
//! ```text
//! cargo run --release --example reproduce_figures -- out/figures
//! ```

use std::path::PathBuf;

use semantic_rd::figures::{run_figure, FigureId, FigureOptions};

fn main() -> semantic_rd::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    let opts = FigureOptions::default();
    for id in FigureId::ALL {
        let out = run_figure(id, &dir, &opts)?;
        let cells = &out.manifest["cells"];
        println!(
            "{id}: {} tables, {:.1}s, closed form {}, solver {}, converged fraction {}",
            out.tables.len(),
            out.manifest["elapsed_seconds"].as_f64().unwrap_or(0.0),
            cells["closed_form_cells"],
            cells["ba_cells"],
            cells.get("ba_converged_fraction").map_or("-".to_string(), |v| v.to_string()),
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}
